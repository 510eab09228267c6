"""Brute-force deciders and the differential harness.

Nothing here calls the fast algorithms of :mod:`dkcheck.semantics` to reach a
verdict. Bisimulation classes come from a naive greatest-fixpoint computation
on world pairs, L0 truth from a direct recursive evaluator, and distributed
knowledge from literal existential search over every legal announcement.
"""
from __future__ import annotations

import itertools
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .bisim import Partition
from .formula import TRUE, Atom, Box, D, Formula, Not, Or, Top, parse, to_string
from .kripke import FRAMES, K, S5, GeneratorParams, KripkeModel, from_json, random_model, to_json
from .semantics import (
    ALL, ALL_VARIANTS, CAP, L0_VARIANTS, SET, SIM, SINGLE, SOME, Variant, extension,
)

DEFAULT_BOUND = 16


class SizeBoundError(RuntimeError):
    """Input exceeds a hard search bound; nothing was truncated."""


# -- independent building blocks --------------------------------------------------

def naive_partition(m: KripkeModel, atoms=None) -> Partition:
    """Largest auto-bisimulation as a greatest fixpoint over world pairs."""
    q = sorted(m.atoms if atoms is None else atoms)
    rel = {
        (x, y) for x in m.worlds for y in m.worlds
        if all(m.holds_atom(p, x) == m.holds_atom(p, y) for p in q)
    }
    changed = True
    while changed:
        changed = False
        for x, y in list(rel):
            ok = True
            for a in m.agents:
                sx, sy = m.access(a, x), m.access(a, y)
                if any(all((u, v) not in rel for v in sy) for u in sx) or any(
                    all((u, v) not in rel for u in sx) for v in sy
                ):
                    ok = False
                    break
            if not ok:
                rel.discard((x, y))
                changed = True
    class_of, classes = {}, []
    for w in m.worlds:
        for i, c in enumerate(classes):
            if (w, next(iter(c))) in rel:
                class_of[w] = i
                c.add(w)
                break
        else:
            class_of[w] = len(classes)
            classes.append({w})
    return Partition(m, frozenset(q), class_of, [frozenset(c) for c in classes], [])


def naive_holds(m: KripkeModel, w, f: Formula) -> bool:
    """Direct recursive truth definition for L0."""
    if isinstance(f, Atom):
        return m.holds_atom(f.name, w)
    if isinstance(f, Top):
        return True
    if isinstance(f, Not):
        return not naive_holds(m, w, f.child)
    if isinstance(f, Or):
        return naive_holds(m, w, f.left) or naive_holds(m, w, f.right)
    if isinstance(f, Box):
        return all(naive_holds(m, v, f.child) for v in m.access(f.agent, w))
    if isinstance(f, D):
        raise ValueError("naive_holds only covers L0")
    raise TypeError(f"not a formula: {f!r}")


def naive_extension(m: KripkeModel, f: Formula) -> frozenset:
    return frozenset(w for w in m.worlds if naive_holds(m, w, f))


def enumerate_closed_supersets(part: Partition, base, bound: int = DEFAULT_BOUND) -> list:
    """Every union of classes containing ``base``."""
    base = frozenset(base)
    fixed = [c for c in part.classes if c & base]
    free = [c for c in part.classes if not c & base]
    if len(free) > bound:
        raise SizeBoundError(f"{len(free)} free classes exceed the bound of {bound}")
    core = frozenset().union(*fixed)
    out = []
    for mask in range(1 << len(free)):
        extra = [free[i] for i in range(len(free)) if mask >> i & 1]
        out.append(core.union(*extra))
    return out


# -- brute-force distributed knowledge --------------------------------------------

def _meet_closure(family) -> set:
    """Close a family of sets under pairwise intersection."""
    fam = set(family)
    frontier = set(fam)
    while frontier:
        new = {x & y for x in frontier for y in fam} - fam
        fam |= new
        frontier = new
    return fam


def brute_force_dk(m: KripkeModel, s, group, target, variant: Variant,
                   bound: int = DEFAULT_BOUND, part: Partition | None = None) -> bool:
    """Decide ``D_G`` by exhaustive search over announcements.

    Search is over reachable sets of remaining worlds: two announcement
    choices leading to the same remaining set are interchangeable for every
    later step and for the final test, so keeping one representative per set
    is still an exhaustive search.
    """
    group = tuple(sorted(group))
    if not group:
        raise ValueError("group must be non-empty")
    target = frozenset(target)
    everything = frozenset(m.worlds)

    def success(allowed) -> bool:
        if variant.q == SOME:
            return any(m.access(b, s) & allowed <= target for b in group)
        return all(m.access(b, s) & allowed <= target for b in group)

    if variant.f == CAP:
        pooled = frozenset.intersection(*(m.access(b, s) for b in group))
        return success(pooled)

    part = part or naive_partition(m)

    def legal(agent, remaining):
        # extensions of formulas the agent knows given the worlds still open
        return enumerate_closed_supersets(part, m.access(agent, s) & remaining, bound)

    if variant.o == SIM:
        states = {everything}
        for a in group:
            shares = legal(a, everything)
            if variant.a == SET:
                shares = _meet_closure(shares)
            states = {x & e for x in states for e in shares}
        return any(success(x) for x in states)

    if variant.a == SINGLE:
        for order in itertools.permutations(group):
            states = {everything}
            for a in order:
                states = {x & e for x in states for e in legal(a, x)}
            if any(success(x) for x in states):
                return True
        return False

    # Set variants in turns. Any finite prefix extends to an omega sequence by
    # announcing ``true``; a descending chain of world sets is eventually
    # constant, so limit stages (omega and beyond) add no new states.
    reachable = {everything}
    frontier = [everything]
    while frontier:
        x = frontier.pop()
        for a in group:
            for e in legal(a, x):
                y = x & e
                if y not in reachable:
                    reachable.add(y)
                    frontier.append(y)
    return any(success(x) for x in reachable)


# -- formula enumeration ------------------------------------------------------------

def enumerate_formulas(atoms, agents, depth: int, model: KripkeModel,
                       max_atoms: int = 2, max_agents: int = 2, max_depth: int = 3):
    """Yield L0 formulas of modal depth <= ``depth``, one per distinct extension on ``model``.

    Level 0 is the boolean closure of the atoms; level k+1 is the boolean
    closure of level k together with every box over it.
    """
    atoms, agents = sorted(atoms), sorted(agents)
    if len(atoms) > max_atoms or len(agents) > max_agents or depth > max_depth:
        raise SizeBoundError(
            f"enumeration bound exceeded: {len(atoms)} atoms, {len(agents)} agents, depth {depth}"
        )
    everything = frozenset(model.worlds)
    seen: dict = {}

    def close(base: dict) -> dict:
        out = dict(base)
        while True:
            new = {}
            items = list(out.items())
            for e, f in items:
                c = everything - e
                if c not in out and c not in new:
                    new[c] = Not(f)
                for e2, g in items:
                    u = e | e2
                    if u not in out and u not in new:
                        new[u] = Or(f, g)
            if not new:
                return out
            out.update(new)

    base = {}
    for f in [TRUE, *(Atom(p) for p in atoms)]:
        base.setdefault(naive_extension(model, f), f)
    level = close(base)
    for e, f in level.items():
        seen[e] = f
        yield f
    for _ in range(depth):
        base = dict(level)
        for a in agents:
            for f in list(level.values()):
                base.setdefault(naive_extension(model, Box(a, f)), Box(a, f))
        level = close(base)
        for e, f in level.items():
            if e not in seen:
                seen[e] = f
                yield f


# -- random formulas ------------------------------------------------------------------

def random_formula(rng: random.Random, atoms, agents, depth: int, d_prob: float = 0.0) -> Formula:
    """Random formula of modal depth <= ``depth``; D nodes appear with probability ``d_prob``."""
    atoms, agents = list(atoms), list(agents)

    def gen(d, size):
        if size <= 0 or rng.random() < 0.25:
            r = rng.random()
            if r < 0.1:
                return TRUE
            return Atom(rng.choice(atoms))
        r = rng.random()
        if d > 0 and r < 0.35:
            if d_prob and rng.random() < d_prob:
                k = rng.randint(1, len(agents))
                return D(frozenset(rng.sample(agents, k)), gen(d - 1, size - 1))
            return Box(rng.choice(agents), gen(d - 1, size - 1))
        if r < 0.6:
            return Not(gen(d, size - 1))
        return Or(gen(d, size - 1), gen(d, size - 1))

    return gen(depth, 2 + 2 * depth)


# -- differential harness -----------------------------------------------------------------

# variants that are equivalent on every model
EQUIVALENCE_CLASSES = (
    ("(cap,-,-,some)", "(cap,-,-,all)"),
    ("(L0,single,sim,some)", "(L0,single,sim,all)", "(L0,single,omega,some)", "(L0,single,omega,all)"),
    ("(L0,set,sim,all)", "(L0,set,omega,all)"),
    ("(L0,set,sim,some)", "(L0,set,omega,some)"),
    ("(L0,set,Omega,some)", "(L0,set,Omega,all)"),
)

# (stronger, weaker): arrows of the landscape plus "all implies some" and
# "every variant implies intersection"
IMPLICATIONS = tuple(
    [("(L0,single,sim,all)", "(L0,set,sim,all)"),
     ("(L0,set,sim,all)", "(L0,set,sim,some)"),
     ("(L0,single,sim,all)", "(L0,set,Omega,all)"),
     ("(L0,set,sim,some)", "(L0,set,Omega,some)"),
     ("(L0,set,sim,all)", "(L0,set,Omega,all)"),
     ("(L0,set,Omega,all)", "(cap,-,-,all)")]
    + [(str(v), "(cap,-,-,all)") for v in ALL_VARIANTS]
    + [(str(v), str(Variant(v.f, v.a, v.o, SOME))) for v in ALL_VARIANTS if v.q == ALL]
)

VARIANT_NAMES = tuple(str(v) for v in ALL_VARIANTS)
L0_NAMES = tuple(str(v) for v in L0_VARIANTS)


@dataclass(frozen=True)
class DiffParams:
    seed: int = 0
    count: int = 1000
    max_worlds: int = 5
    max_agents: int = 3
    max_atoms: int = 2
    depth: int = 3
    frame: str = "both"
    bound: int = DEFAULT_BOUND
    brute_force: bool = True
    workers: int = 1
    nested_d: float = 0.0  # probability of a D node at each modal position of the target


@dataclass
class Witness:
    kind: str  # "oracle" (fast vs brute force) or "equivalence"/"implication"
    model: dict
    world: str
    group: list
    formula: str
    variants: list
    verdicts: list


@dataclass
class DiffReport:
    params: dict
    instance_count: int
    point_count: int
    brute_force_points: int
    refusals: int
    variants: list
    agreement: list  # agreement[i][j] = points where variant i and j agree
    true_counts: list
    oracle_agreement: list  # per variant, points where fast == brute force
    discrepancies: list = field(default_factory=list)
    collapse_classes: list = field(default_factory=list)

    def full_agreement(self, v1: str, v2: str) -> bool:
        i, j = self.variants.index(v1), self.variants.index(v2)
        return self.agreement[i][j] == self.point_count

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = [
            f"instances: {self.instance_count} models, {self.point_count} evaluation points "
            f"({self.brute_force_points} cross-checked by brute force, {self.refusals} refused by size bound)",
            f"discrepancies: {len(self.discrepancies)}",
            "collapse classes (variants agreeing on every point):",
        ]
        for cls in self.collapse_classes:
            lines.append("  {" + ", ".join(cls) + "}")
        if any(set(L0_NAMES) <= set(c) for c in self.collapse_classes):
            lines.append(f"all {len(L0_NAMES)} L0 variants coincide on these finite models.")
        lines.append(
            "The separations between single/set, some/all and omega/Omega need infinite models "
            "and infinitely many atoms, so they cannot show up at this scale."
        )
        return "\n".join(lines)


def _instance(params: DiffParams, index: int):
    rng = random.Random(f"{params.seed}:{index}")
    frame = params.frame if params.frame in FRAMES else (K, S5)[index % 2]
    gp = GeneratorParams(
        seed=rng.getrandbits(63),
        world_count=rng.randint(1, params.max_worlds),
        agent_count=rng.randint(1, params.max_agents),
        atom_count=rng.randint(1, params.max_atoms),
        edge_density=rng.choice((0.1, 0.2, 0.3, 0.45, 0.6)),
        frame=frame,
    )
    m = random_model(gp)
    group = sorted(rng.sample(list(m.agents), rng.randint(1, len(m.agents))))
    phi = random_formula(rng, m.atoms, m.agents, rng.randint(0, params.depth), params.nested_d)
    return m, group, phi


def brute_force_extension(m: KripkeModel, phi: Formula, variant: Variant,
                          bound: int = DEFAULT_BOUND, part: Partition | None = None) -> frozenset:
    """Extension of ``phi`` with every D node decided by :func:`brute_force_dk`."""
    part = part if part is not None or variant.f == CAP else naive_partition(m)
    memo: dict = {}

    def ext(f) -> frozenset:
        if f in memo:
            return memo[f]
        if isinstance(f, D):
            inner = ext(f.child)
            out = frozenset(w for w in m.worlds if brute_force_dk(m, w, f.group, inner, variant, bound, part))
        elif isinstance(f, Not):
            out = frozenset(m.worlds) - ext(f.child)
        elif isinstance(f, Or):
            out = ext(f.left) | ext(f.right)
        elif isinstance(f, Box):
            inner = ext(f.child)
            out = frozenset(w for w in m.worlds if m.access(f.agent, w) <= inner)
        else:
            out = naive_extension(m, f)
        memo[f] = out
        return out

    return ext(phi)


def evaluate_instance(params: DiffParams, index: int) -> dict:
    """Fast and brute-force verdicts for ``D_G phi`` at every world of instance ``index``."""
    m, group, phi = _instance(params, index)
    claim = D(frozenset(group), phi)
    fast_ext = [extension(m, claim, v, check=False) for v in ALL_VARIANTS]
    brute_ext = None
    refused = 0
    if params.brute_force:
        try:
            part = naive_partition(m)
            brute_ext = [brute_force_extension(m, claim, v, params.bound, part) for v in ALL_VARIANTS]
        except SizeBoundError:
            refused = len(m.worlds)
    points = []
    for s in m.worlds:
        fast = [s in e for e in fast_ext]
        brute = None if brute_ext is None else [s in e for e in brute_ext]
        points.append((s, fast, brute))
    return {"model": m, "group": group, "formula": phi, "points": points, "refused": refused}


def _witness(kind, inst, s, names, verdicts) -> Witness:
    return Witness(kind, to_json(inst["model"]), s, list(inst["group"]), to_string(inst["formula"]),
                   list(names), list(verdicts))


def replay_witness(w: Witness) -> list:
    """Recompute the verdicts recorded in a witness from its own contents."""
    if isinstance(w, dict):
        w = Witness(**w)
    m = from_json(w.model)
    claim = D(frozenset(w.group), parse(w.formula))
    routes = ("fast", "brute") if w.kind == "oracle" else ("fast",) * len(w.variants)
    out = []
    for name, route in zip(w.variants, routes):
        v = Variant.parse(name)
        if route == "brute":
            out.append(w.world in brute_force_extension(m, claim, v))
        else:
            out.append(w.world in extension(m, claim, v))
    return out


def differential_run(params: DiffParams) -> DiffReport:
    indices = range(params.count)
    if params.workers > 1:
        with ProcessPoolExecutor(params.workers) as pool:
            results = list(pool.map(evaluate_instance, itertools.repeat(params), indices, chunksize=16))
    else:
        results = [evaluate_instance(params, i) for i in indices]

    n = len(ALL_VARIANTS)
    agreement = [[0] * n for _ in range(n)]
    true_counts = [0] * n
    oracle_agreement = [0] * n
    vectors = [[] for _ in range(n)]
    discrepancies = []
    points = bf_points = refusals = 0
    index_of = {name: i for i, name in enumerate(VARIANT_NAMES)}

    for inst in results:
        refusals += inst["refused"]
        for s, fast, brute in inst["points"]:
            points += 1
            for i in range(n):
                vectors[i].append(fast[i])
                true_counts[i] += fast[i]
                for j in range(n):
                    agreement[i][j] += fast[i] == fast[j]
            if brute is not None:
                bf_points += 1
                for i in range(n):
                    if fast[i] == brute[i]:
                        oracle_agreement[i] += 1
                    else:
                        discrepancies.append(_witness("oracle", inst, s, [VARIANT_NAMES[i]] * 2, [fast[i], brute[i]]))
            for box in EQUIVALENCE_CLASSES:
                vals = [fast[index_of[v]] for v in box]
                if len(set(vals)) > 1:
                    discrepancies.append(_witness("equivalence", inst, s, box, vals))
            for strong, weak in IMPLICATIONS:
                if fast[index_of[strong]] and not fast[index_of[weak]]:
                    discrepancies.append(_witness("implication", inst, s, [strong, weak], [True, False]))

    classes: dict = {}
    for i, name in enumerate(VARIANT_NAMES):
        classes.setdefault(tuple(vectors[i]), []).append(name)

    return DiffReport(
        params=asdict(params),
        instance_count=len(results),
        point_count=points,
        brute_force_points=bf_points,
        refusals=refusals,
        variants=list(VARIANT_NAMES),
        agreement=agreement,
        true_counts=true_counts,
        oracle_agreement=oracle_agreement,
        discrepancies=[asdict(d) for d in discrepancies],
        collapse_classes=list(classes.values()),
    )
