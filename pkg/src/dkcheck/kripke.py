"""Finite multi-agent Kripke models: construction, validation, S5 closure, JSON I/O, random generation."""
from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

K = "K"
S5 = "S5"
FRAMES = (K, S5)


class ModelError(ValueError):
    """Raised when a model file or a model description is not usable."""


@dataclass(frozen=True, eq=False)
class KripkeModel:
    worlds: tuple
    agents: tuple
    atoms: tuple
    valuation: Mapping[str, frozenset]
    relations: Mapping[str, frozenset]
    frame: str = S5

    @classmethod
    def build(cls, worlds, agents, atoms, valuation, relations, frame=S5) -> "KripkeModel":
        """Normalise plain containers into an immutable model (no validation)."""
        valuation = {p: frozenset(valuation.get(p, ())) for p in atoms} | {
            p: frozenset(ws) for p, ws in valuation.items() if p not in atoms
        }
        relations = {a: frozenset(tuple(e) for e in relations.get(a, ())) for a in agents} | {
            a: frozenset(tuple(e) for e in es) for a, es in relations.items() if a not in agents
        }
        return cls(tuple(worlds), tuple(agents), tuple(atoms), valuation, relations, frame)

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            set(self.worlds) == set(other.worlds)
            and set(self.agents) == set(other.agents)
            and set(self.atoms) == set(other.atoms)
            and dict(self.valuation) == dict(other.valuation)
            and dict(self.relations) == dict(other.relations)
            and self.frame == other.frame
        )

    __hash__ = object.__hash__

    @cached_property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def world_set(self) -> frozenset:
        return frozenset(self.worlds)

    @cached_property
    def successors(self) -> dict:
        """``successors[agent][world]`` is the frozenset of accessible worlds."""
        out = {}
        for a in self.agents:
            succ = {w: set() for w in self.worlds}
            for x, y in self.relations.get(a, ()):
                if x in succ:
                    succ[x].add(y)
            out[a] = {w: frozenset(s) for w, s in succ.items()}
        return out

    def access(self, agent: str, world) -> frozenset:
        return self.successors[agent][world]

    def holds_atom(self, atom: str, world) -> bool:
        return world in self.valuation.get(atom, frozenset())

    def restrict_atoms(self, atoms: Iterable[str]) -> "KripkeModel":
        atoms = tuple(atoms)
        return KripkeModel.build(
            self.worlds, self.agents, atoms, {p: self.valuation.get(p, ()) for p in atoms},
            self.relations, self.frame,
        )


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: object

    def __post_init__(self):
        if self.point not in self.model.index:
            raise ModelError(f"point {self.point!r} is not a world of the model")


@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    world_count: int = 4
    agent_count: int = 2
    atom_count: int = 1
    edge_density: float = 0.3
    frame: str = S5

    def __post_init__(self):
        for name in ("world_count", "agent_count", "atom_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0 <= self.edge_density <= 1:
            raise ValueError("edge_density must lie in [0, 1]")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")


# -- validation ---------------------------------------------------------------

def validate(m: KripkeModel) -> list[str]:
    """Return a list of human-readable invariant violations (empty when valid)."""
    problems = []
    if not m.worlds:
        problems.append("worlds must be non-empty")
    if len(set(m.worlds)) != len(m.worlds):
        problems.append("duplicate world identifiers")
    if m.frame not in FRAMES:
        problems.append(f"unknown frame {m.frame!r}")
    ws = set(m.worlds)
    for p, ext in m.valuation.items():
        if p not in m.atoms:
            problems.append(f"valuation for undeclared atom {p!r}")
        for w in sorted(ext - ws, key=str):
            problems.append(f"valuation of {p!r} mentions undeclared world {w!r}")
    for a, rel in m.relations.items():
        if a not in m.agents:
            problems.append(f"relation for undeclared agent {a!r}")
        for x, y in sorted(rel, key=str):
            if x not in ws or y not in ws:
                problems.append(f"relation of {a!r} has pair ({x!r}, {y!r}) with undeclared world")
    if m.frame == S5 and not problems:
        for a in m.agents:
            problems.extend(_s5_violations(m, a))
    return problems


def _s5_violations(m: KripkeModel, agent: str) -> list[str]:
    rel = m.relations.get(agent, frozenset())
    out = []
    for w in m.worlds:
        if (w, w) not in rel:
            out.append(f"agent {agent!r}: missing reflexive pair at world {w!r}")
    for x, y in sorted(rel, key=str):
        if (y, x) not in rel:
            out.append(f"agent {agent!r}: pair ({x!r}, {y!r}) has no symmetric partner")
    succ = m.successors[agent]
    for x, y in sorted(rel, key=str):
        for z in sorted(succ[y] - succ[x], key=str):
            out.append(f"agent {agent!r}: ({x!r}, {y!r}) and ({y!r}, {z!r}) but not ({x!r}, {z!r})")
    return out


def s5_closure(m: KripkeModel) -> KripkeModel:
    """Replace every relation by its reflexive-symmetric-transitive closure."""
    relations = {}
    for a in m.agents:
        parent = {w: w for w in m.worlds}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in m.relations.get(a, ()):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[ry] = rx
        blocks: dict = {}
        for w in m.worlds:
            blocks.setdefault(find(w), []).append(w)
        relations[a] = {(x, y) for block in blocks.values() for x in block for y in block}
    return KripkeModel.build(m.worlds, m.agents, m.atoms, m.valuation, relations, m.frame)


def agent_classes(m: KripkeModel, agent: str) -> list[frozenset]:
    """Distinct successor sets of ``agent``; the equivalence classes on an S5 model."""
    seen = []
    for w in m.worlds:
        s = m.access(agent, w)
        if s not in seen:
            seen.append(s)
    return seen


# -- serialisation ------------------------------------------------------------

def to_json(m: KripkeModel) -> dict:
    return {
        "worlds": list(m.worlds),
        "agents": list(m.agents),
        "atoms": list(m.atoms),
        "valuation": {p: [w for w in m.worlds if w in m.valuation.get(p, ())] for p in m.atoms},
        "relations": {
            a: [list(e) for e in sorted(m.relations.get(a, ()), key=lambda e: (m.index[e[0]], m.index[e[1]]))]
            for a in m.agents
        },
        "frame": m.frame,
    }


def from_json(data: dict, source: str = "<model>") -> KripkeModel:
    """Build and validate a model from the decoded JSON object."""
    if not isinstance(data, dict):
        raise ModelError(f"{source}: top level must be an object")
    for key in ("worlds", "agents", "atoms"):
        if key in data and not isinstance(data[key], list):
            raise ModelError(f"{source}: '{key}' must be an array")
    worlds = [str(w) for w in data.get("worlds", [])]
    if not worlds:
        raise ModelError(f"{source}: worlds must be non-empty")
    agents = [str(a) for a in data.get("agents", [])]
    atoms = [str(p) for p in data.get("atoms", [])]
    frame = data.get("frame", S5)
    if frame not in FRAMES:
        raise ModelError(f"{source}: frame must be 'K' or 'S5', got {frame!r}")
    declared = set(worlds)
    valuation = {}
    for p, ws in (data.get("valuation") or {}).items():
        if p not in atoms:
            raise ModelError(f"{source}: valuation names undeclared atom {p!r}")
        for w in ws:
            if w not in declared:
                raise ModelError(f"{source}: valuation of {p!r} names undeclared world {w!r}")
        valuation[p] = ws
    relations = {}
    for a, pairs in (data.get("relations") or {}).items():
        if a not in agents:
            raise ModelError(f"{source}: relations name undeclared agent {a!r}")
        rel = []
        for pair in pairs:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ModelError(f"{source}: relation entry {pair!r} of {a!r} is not a 2-element array")
            x, y = (str(v) for v in pair)
            if x not in declared or y not in declared:
                raise ModelError(f"{source}: pair [{x!r}, {y!r}] of agent {a!r} names an undeclared world")
            rel.append((x, y))
        relations[a] = rel
    m = KripkeModel.build(worlds, agents, atoms, valuation, relations, frame)
    if data.get("close"):
        m = s5_closure(m)
    problems = validate(m)
    if problems:
        raise ModelError(f"{source}: " + "; ".join(problems))
    return m


def load(path) -> KripkeModel:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_json(data, str(path))


def save(m: KripkeModel, path) -> None:
    Path(path).write_text(json.dumps(to_json(m), indent=2) + "\n", encoding="utf-8")


# -- random generation ----------------------------------------------------------

def _names(prefix_pool: str, count: int, skip: str = "") -> list[str]:
    pool = [c for c in prefix_pool if c not in skip]
    if count <= len(pool):
        return pool[:count]
    return [f"{pool[0]}{i}" for i in range(count)]


def random_model(p: GeneratorParams) -> KripkeModel:
    """Deterministic random model; S5 frames come from closing sampled edges."""
    rng = random.Random(p.seed)
    worlds = [f"w{i}" for i in range(p.world_count)]
    agents = _names(string.ascii_lowercase, p.agent_count)
    atoms = _names("pqrstuvxyz", p.atom_count)
    valuation = {q: [w for w in worlds if rng.random() < 0.5] for q in atoms}
    relations = {}
    for a in agents:
        edges = []
        for x in worlds:
            for y in worlds:
                if rng.random() < p.edge_density:
                    edges.append((x, y))
        relations[a] = edges
    m = KripkeModel.build(worlds, agents, atoms, valuation, relations, p.frame)
    if p.frame == S5:
        m = s5_closure(m)
    return m
