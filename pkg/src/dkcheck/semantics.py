"""Truth evaluation under the twelve distributed-knowledge variants.

A variant is a tuple ``(form, amount, order, quantifier)``. Non-linguistic
pooling (``cap``) intersects the group's relations. Every linguistic (``L0``)
variant quantifies over announcements of L0 formulas known to the speaker.
Over a finite model and a finite atom vocabulary the extension of such a
formula is a union of bisimulation classes that covers the speaker's
accessible set, and every such union is the extension of some formula, so the
quantification runs over closed supersets instead of formulas. Sharing more
never hurts (the target's truth is fixed before communication), hence the
closure of the accessible set is the dominant announcement in every step.

All world sets are frozensets of world identifiers.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .bisim import Partition, closure, partition
from .formula import Atom, Box, D, Formula, Not, Or, Top, is_l0, meta, parse
from .kripke import KripkeModel, PointedModel

CAP, L0 = "cap", "L0"
SINGLE, SET, EPS = "single", "set", "-"
SIM, OMEGA, BIG_OMEGA = "sim", "omega", "Omega"
SOME, ALL = "some", "all"


class VariantError(ValueError):
    pass


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Variant:
    f: str
    a: str
    o: str
    q: str

    def __post_init__(self):
        if self.q not in (SOME, ALL):
            raise VariantError(f"quantifier must be 'some' or 'all', got {self.q!r}")
        if self.f == CAP:
            if self.a != EPS or self.o != EPS:
                raise VariantError("non-linguistic sharing has no amount or order: use (cap,-,-,q)")
        elif self.f == L0:
            if self.a not in (SINGLE, SET):
                raise VariantError(f"amount must be 'single' or 'set', got {self.a!r}")
            if self.o not in (SIM, OMEGA, BIG_OMEGA):
                raise VariantError(f"order must be 'sim', 'omega' or 'Omega', got {self.o!r}")
            if self.a == SINGLE and self.o == BIG_OMEGA:
                raise VariantError("single-formula sharing cannot run trans-finitely: (L0,single,Omega,q) is not a variant")
        else:
            raise VariantError(f"form must be 'cap' or 'L0', got {self.f!r}")

    def __str__(self):
        return f"({self.f},{self.a},{self.o},{self.q})"

    @property
    def linguistic(self) -> bool:
        return self.f == L0

    @classmethod
    def parse(cls, text: str) -> "Variant":
        text = text.strip()
        if text in ALIASES:
            return ALIASES[text]
        m = re.fullmatch(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*,\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)", text)
        if m is None:
            raise VariantError(f"cannot parse variant {text!r}; expected e.g. (L0,set,omega,all)")
        f, a, o, q = m.groups()
        if o == "OMEGA":
            o = BIG_OMEGA
        return cls(f, a, o, q)


INTERSECTION = Variant(CAP, EPS, EPS, ALL)
FULLCOMM = Variant(L0, SINGLE, SIM, ALL)
ALIASES = {"intersection": INTERSECTION, "fullcomm": FULLCOMM}

ALL_VARIANTS: tuple = tuple(
    [Variant(CAP, EPS, EPS, ALL), Variant(CAP, EPS, EPS, SOME)]
    + [Variant(L0, SINGLE, o, q) for o in (SIM, OMEGA) for q in (SOME, ALL)]
    + [Variant(L0, SET, o, q) for o in (SIM, OMEGA, BIG_OMEGA) for q in (SOME, ALL)]
)
L0_VARIANTS = tuple(v for v in ALL_VARIANTS if v.linguistic)


# -- shared helpers -------------------------------------------------------------

def model_partition(m: KripkeModel) -> Partition:
    """Partition over the declared atoms, cached on the model instance."""
    part = m.__dict__.get("_dk_partition")
    if part is None:
        part = partition(m)
        object.__setattr__(m, "_dk_partition", part)
    return part


def _check_group(m: KripkeModel, group) -> tuple:
    group = tuple(sorted(group))
    if not group:
        raise EvaluationError("group must be non-empty")
    missing = [a for a in group if a not in m.successors]
    if missing:
        raise EvaluationError(f"group mentions agents not in the model: {missing}")
    return group


def _succeeds(m, s, group, allowed: frozenset, target: frozenset, q: str) -> bool:
    """q-test: after restricting targets to ``allowed``, some/all agents know ``target``."""
    tests = (m.access(b, s) & allowed <= target for b in group)
    return any(tests) if q == SOME else all(tests)


# -- D algorithms ---------------------------------------------------------------

def dk_intersection(m: KripkeModel, s, group, target, q: str = ALL) -> bool:
    group = _check_group(m, group)
    pooled = frozenset.intersection(*(m.access(b, s) for b in group))
    target = frozenset(target)
    # every member ends with the pooled relation
    tests = (pooled <= target for _ in group)
    return any(tests) if q == SOME else all(tests)


def maximal_shares(m: KripkeModel, s, group, part: Partition | None = None) -> dict:
    """Per agent, the closure of its accessible set: the strongest legal announcement."""
    group = _check_group(m, group)
    part = part or model_partition(m)
    return {a: closure(part, m.access(a, s)) for a in group}


def dk_simultaneous(m: KripkeModel, s, group, target, q: str = ALL, part: Partition | None = None) -> bool:
    group = _check_group(m, group)
    shares = maximal_shares(m, s, group, part)
    allowed = frozenset.intersection(*shares.values())
    return _succeeds(m, s, group, allowed, frozenset(target), q)


def sequential_single_state(m, s, order: Sequence[str], part: Partition | None = None) -> frozenset:
    """Worlds left after each agent in ``order`` announces the closure of what it still considers possible."""
    part = part or model_partition(m)
    allowed = m.world_set
    for a in order:
        allowed = allowed & closure(part, m.access(a, s) & allowed)
    return allowed


def dk_sequential_single(m: KripkeModel, s, group, target, q: str = ALL, part: Partition | None = None) -> bool:
    group = _check_group(m, group)
    target = frozenset(target)
    for order in itertools.permutations(group):
        allowed = sequential_single_state(m, s, order, part)
        if _succeeds(m, s, group, allowed, target, q):
            return True
    return False


def sequential_sets_fixpoint(m, s, group, part: Partition | None = None) -> tuple[frozenset, int]:
    """Round-robin maximal announcements until nothing changes; returns (worlds, rounds)."""
    part = part or model_partition(m)
    allowed = m.world_set
    rounds = 0
    while True:
        nxt = allowed
        for a in group:
            nxt = nxt & closure(part, m.access(a, s) & allowed)
        rounds += 1
        if nxt == allowed:
            return allowed, rounds
        allowed = nxt


def dk_sequential_sets(m: KripkeModel, s, group, target, ordinal_mode: str = OMEGA, q: str = ALL,
                       part: Partition | None = None) -> bool:
    """Set-sharing in turns, for omega-length or arbitrary ordinal-length sequences.

    Relations only shrink and the model is finite, so the sequence of
    information states stabilises after finitely many rounds; at that point no
    further announcement (finite, omega or beyond) removes anything. Both
    ordinal modes therefore reduce to the same fixpoint.
    """
    if ordinal_mode not in (OMEGA, BIG_OMEGA, "OMEGA"):
        raise VariantError(f"ordinal_mode must be 'omega' or 'Omega', got {ordinal_mode!r}")
    group = _check_group(m, group)
    allowed, _ = sequential_sets_fixpoint(m, s, group, part)
    return _succeeds(m, s, group, allowed, frozenset(target), q)


def dk_holds(m: KripkeModel, s, group, target, variant: Variant, part: Partition | None = None) -> bool:
    """``M, s |= D_G phi`` under ``variant`` given ``target`` = the extension of phi."""
    if variant.f == CAP:
        return dk_intersection(m, s, group, target, variant.q)
    if variant.o == SIM:
        return dk_simultaneous(m, s, group, target, variant.q, part)
    if variant.a == SINGLE:
        return dk_sequential_single(m, s, group, target, variant.q, part)
    return dk_sequential_sets(m, s, group, target, variant.o, variant.q, part)


# -- formula evaluation -----------------------------------------------------------

def _check_vocabulary(m: KripkeModel, phi: Formula) -> None:
    info = meta(phi)
    atoms = info.atoms_of - set(m.atoms)
    agents = info.agents_of - set(m.agents)
    if atoms:
        raise EvaluationError(f"formula uses undeclared atoms {sorted(atoms)}")
    if agents:
        raise EvaluationError(f"formula uses agents not in the model {sorted(agents)}")


def extension(m: KripkeModel, phi: Formula, variant: Variant = FULLCOMM, check: bool = True) -> frozenset:
    """Worlds of ``m`` satisfying ``phi``; D children are evaluated first, under the same variant."""
    if check:
        _check_vocabulary(m, phi)
    memo: dict = {}
    part = model_partition(m) if variant.linguistic else None
    everything = m.world_set

    def ext(f) -> frozenset:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            out = m.valuation.get(f.name, frozenset()) & everything
        elif isinstance(f, Top):
            out = everything
        elif isinstance(f, Not):
            out = everything - ext(f.child)
        elif isinstance(f, Or):
            out = ext(f.left) | ext(f.right)
        elif isinstance(f, Box):
            inner = ext(f.child)
            succ = m.successors[f.agent]
            out = frozenset(w for w in m.worlds if succ[w] <= inner)
        elif isinstance(f, D):
            inner = ext(f.child)
            out = frozenset(w for w in m.worlds if dk_holds(m, w, f.group, inner, variant, part))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    return ext(phi)


def evaluate(pm: PointedModel, phi: Formula | str, variant: Variant = FULLCOMM) -> bool:
    if isinstance(phi, str):
        phi = parse(phi)
    return pm.point in extension(pm.model, phi, variant)


# -- announcement scripts ---------------------------------------------------------

@dataclass(frozen=True)
class InfoState:
    relations: Mapping[str, frozenset]

    @classmethod
    def initial(cls, m: KripkeModel) -> "InfoState":
        return cls({a: frozenset(m.relations.get(a, ())) for a in m.agents})

    def neighborhood(self, agent: str, s) -> frozenset:
        return frozenset(y for x, y in self.relations[agent] if x == s)


@dataclass(frozen=True)
class Step:
    speaker: str
    statement: Formula
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class AnnouncementScript:
    steps: tuple = ()

    @classmethod
    def parse(cls, text: str, source: str = "<script>") -> "AnnouncementScript":
        """One ``agent: formula`` per line; blank lines and ``#`` comments are skipped."""
        steps = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise EvaluationError(f"{source}:{lineno}: expected 'agent: formula'")
            agent, body = line.split(":", 1)
            agent = agent.strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", agent):
                raise EvaluationError(f"{source}:{lineno}: bad agent name {agent!r}")
            try:
                statement = parse(body)
            except ValueError as exc:
                raise EvaluationError(f"{source}:{lineno}: {exc}") from None
            if not is_l0(statement):
                raise EvaluationError(f"{source}:{lineno}: statements must not contain D")
            steps.append(Step(agent, statement, lineno))
        return cls(tuple(steps))


@dataclass
class ScriptResult:
    state: InfoState
    correct: list = field(default_factory=list)

    @property
    def all_correct(self) -> bool:
        return all(self.correct)


def apply_announcement(state: InfoState, m: KripkeModel, psi: Formula) -> InfoState:
    """Drop every pair whose target falsifies ``psi`` in the original model, for every agent."""
    if not is_l0(psi):
        raise EvaluationError("announced statements must be L0 (no D operator)")
    truth = extension(m, psi)
    return InfoState({a: frozenset(e for e in rel if e[1] in truth) for a, rel in state.relations.items()})


def simulate_script(m: KripkeModel, s, script: AnnouncementScript | Iterable) -> ScriptResult:
    """Replay the script from ``s``, flagging steps whose speaker did not know its statement."""
    steps = script.steps if isinstance(script, AnnouncementScript) else tuple(
        st if isinstance(st, Step) else Step(st[0], parse(st[1]) if isinstance(st[1], str) else st[1])
        for st in script
    )
    state = InfoState.initial(m)
    result = ScriptResult(state)
    for i, st in enumerate(steps):
        if st.speaker not in m.successors:
            where = f"line {st.line}" if st.line is not None else f"step {i}"
            raise EvaluationError(f"{where}: speaker {st.speaker!r} is not an agent of the model")
        truth = extension(m, st.statement)
        result.correct.append(state.neighborhood(st.speaker, s) <= truth)
        state = apply_announcement(state, m, st.statement)
    result.state = state
    return result
