"""Q-bisimulation: partition refinement, closures, cross-model checks, characteristic formulas.

Refinement splits worlds on their Q-valuation, then repeatedly on the set of
blocks each agent can reach, until the block count stops growing. Blocks are
numbered by the first world (in model order) that falls into them, so the
result is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .formula import (
    Atom, Box, Diamond, Formula, Not, conjunction, disjunction,
)
from .kripke import KripkeModel, ModelError, PointedModel


@dataclass(frozen=True, eq=False)
class Partition:
    model: KripkeModel
    atoms: frozenset
    class_of: dict
    classes: list
    # class_of maps for every refinement round, round 0 being the valuation split
    rounds: list = field(repr=False, default_factory=list)

    def __len__(self):
        return len(self.classes)

    def class_index(self, world) -> int:
        return self.class_of[world]


def _refine(worlds, agents, succ, label):
    """Return the list of per-round block maps, ending at the stable one."""
    def renumber(keys):
        ids, out = {}, {}
        for w in worlds:
            out[w] = ids.setdefault(keys[w], len(ids))
        return out

    current = renumber({w: label(w) for w in worlds})
    history = [current]
    while True:
        keys = {
            w: (current[w], tuple(frozenset(current[v] for v in succ(a, w)) for a in agents))
            for w in worlds
        }
        nxt = renumber(keys)
        if len(set(nxt.values())) == len(set(current.values())):
            return history
        current = nxt
        history.append(current)


def partition(m: KripkeModel, atoms: Iterable[str] | None = None) -> Partition:
    """Coarsest auto-bisimulation partition of ``m`` over the atom set ``atoms``."""
    q = frozenset(m.atoms if atoms is None else atoms)
    unknown = q - set(m.atoms)
    if unknown:
        raise ModelError(f"atoms not declared in the model: {sorted(unknown)}")
    order = sorted(q)
    history = _refine(
        m.worlds, m.agents, m.access,
        lambda w: tuple(m.holds_atom(p, w) for p in order),
    )
    final = history[-1]
    classes: list = [[] for _ in range(len(set(final.values())))]
    for w in m.worlds:
        classes[final[w]].append(w)
    return Partition(m, q, dict(final), [frozenset(c) for c in classes], history)


def closure(part: Partition, worlds: Iterable) -> frozenset:
    """Smallest union of classes containing ``worlds``."""
    hit = {part.class_of[w] for w in worlds}
    return frozenset().union(*(part.classes[i] for i in sorted(hit)))


def is_closed(part: Partition, worlds: Iterable) -> bool:
    worlds = frozenset(worlds)
    return closure(part, worlds) == worlds


def disjoint_union(m: KripkeModel, n: KripkeModel) -> KripkeModel:
    """Union with worlds tagged ``(0, w)`` and ``(1, w)``; agents and atoms are merged."""
    agents = list(dict.fromkeys([*m.agents, *n.agents]))
    atoms = list(dict.fromkeys([*m.atoms, *n.atoms]))
    worlds = [(0, w) for w in m.worlds] + [(1, w) for w in n.worlds]
    valuation = {
        p: [(0, w) for w in m.valuation.get(p, ())] + [(1, w) for w in n.valuation.get(p, ())]
        for p in atoms
    }
    relations = {
        a: [((0, x), (0, y)) for x, y in m.relations.get(a, ())]
        + [((1, x), (1, y)) for x, y in n.relations.get(a, ())]
        for a in agents
    }
    frame = m.frame if m.frame == n.frame else "K"
    return KripkeModel.build(worlds, agents, atoms, valuation, relations, frame)


def bisimilar(pm: PointedModel, pn: PointedModel, atoms: Iterable[str] | None = None) -> bool:
    """True iff some Q-bisimulation links the two points."""
    if atoms is None:
        q = set(pm.model.atoms) & set(pn.model.atoms)
    else:
        q = set(atoms)
        missing = q - (set(pm.model.atoms) & set(pn.model.atoms))
        if missing:
            raise ModelError(f"atoms not declared in both models: {sorted(missing)}")
    u = disjoint_union(pm.model, pn.model)
    part = partition(u, q)
    return part.class_of[(0, pm.point)] == part.class_of[(1, pn.point)]


def characteristic_formula(part: Partition, index: int) -> Formula:
    """An L0 formula over the partition's atoms whose extension is exactly class ``index``.

    Round 0 formulas are valuation literals. A round k+1 block is described by
    its literals plus, per agent, a box over the disjunction of the round-k
    blocks it reaches and a diamond for each of them. Subformulas are shared,
    so the result is a DAG rather than an exponentially large tree.
    """
    m = part.model
    order = sorted(part.atoms)
    history = part.rounds

    def literals(w) -> Formula:
        return conjunction(Atom(p) if m.holds_atom(p, w) else Not(Atom(p)) for p in order)

    rep = {}
    for w in m.worlds:
        rep.setdefault(history[0][w], w)
    formulas = {b: literals(w) for b, w in rep.items()}
    for k in range(1, len(history)):
        prev, cur = history[k - 1], history[k]
        rep = {}
        for w in m.worlds:
            rep.setdefault(cur[w], w)
        nxt = {}
        for b, w in rep.items():
            parts = [literals(w)]
            for a in m.agents:
                reached = sorted({prev[v] for v in m.access(a, w)})
                parts.append(Box(a, disjunction(formulas[r] for r in reached)))
                parts.extend(Diamond(a, formulas[r]) for r in reached)
            nxt[b] = conjunction(parts)
        formulas = nxt
    return formulas[index]

