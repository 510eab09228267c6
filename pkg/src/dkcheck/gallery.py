"""Worked example models and the extensional self-fulfilment check for circular D.

``appendix_a``  six S5 worlds s1..s3 (p true) and t1..t3 (p false).
``moore``       two worlds; a cannot tell them apart, b can.
``intro``       a knows p -> q, b knows p, neither knows q.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bisim import partition
from .formula import parse
from .kripke import KripkeModel, PointedModel, agent_classes, s5_closure, validate
from .semantics import ALL_VARIANTS, INTERSECTION, L0_VARIANTS, evaluate, extension, simulate_script

NAMES = ("appendix_a", "moore", "intro")


def _appendix_a() -> PointedModel:
    worlds = ["s1", "s2", "s3", "t1", "t2", "t3"]
    drawn = appendix_a_edges()
    relations = {a: [(x, y) for x, y, label in drawn if a in label] for a in "ab"}
    m = KripkeModel.build(worlds, ["a", "b"], ["p"], {"p": ["s1", "s2", "s3"]}, relations, "S5")
    return PointedModel(s5_closure(m), "s2")


def appendix_a_edges() -> list:
    """Undirected edges as drawn, labelled by the agents that cannot tell the ends apart."""
    return [
        ("s1", "t1", "ab"), ("s2", "t2", "a"), ("s3", "t3", "ab"), ("s1", "s2", "b"),
        ("t1", "s2", "b"), ("s3", "t2", "b"), ("t2", "t3", "b"),
    ]


def _moore() -> PointedModel:
    worlds = ["w1", "w2"]
    relations = {
        "a": [(x, y) for x in worlds for y in worlds],
        "b": [(w, w) for w in worlds],
    }
    m = KripkeModel.build(worlds, ["a", "b"], ["p"], {"p": ["w1"]}, relations, "S5")
    return PointedModel(m, "w1")


def _intro() -> PointedModel:
    worlds = ["pq", "pnq", "npq", "npnq"]
    val = {"p": ["pq", "pnq"], "q": ["pq", "npq"]}

    def classes(blocks):
        return [(x, y) for block in blocks for x in block for y in block]

    relations = {
        # a only learns whether p -> q holds
        "a": classes([["pq", "npq", "npnq"], ["pnq"]]),
        # b only learns whether p holds
        "b": classes([["pq", "pnq"], ["npq", "npnq"]]),
    }
    m = KripkeModel.build(worlds, ["a", "b"], ["p", "q"], val, relations, "S5")
    return PointedModel(m, "pq")


_BUILDERS = {"appendix_a": _appendix_a, "moore": _moore, "intro": _intro}


def build(name: str) -> PointedModel:
    key = name.replace("-", "_")
    if key not in _BUILDERS:
        raise KeyError(f"unknown gallery model {name!r}; choose from {', '.join(NAMES)}")
    return _BUILDERS[key]()


# -- circular semantics, extensionally --------------------------------------------

def powerset(worlds) -> frozenset:
    worlds = list(worlds)
    return frozenset(
        frozenset(c) for r in range(len(worlds) + 1) for c in itertools.combinations(worlds, r)
    )


def _groups(m: KripkeModel):
    agents = list(m.agents)
    for r in range(1, len(agents) + 1):
        yield from (frozenset(g) for g in itertools.combinations(agents, r))


def circular_d_extension(m: KripkeModel, group, target, family) -> frozenset:
    """Worlds where D_G(target) holds when any member of ``family`` may be announced.

    Each agent announces some set from ``family`` containing everything it
    considers possible; D holds when every member of the group then has all
    remaining possibilities inside ``target``.
    """
    group = sorted(group)
    target = frozenset(target)
    family = [frozenset(e) for e in family]
    out = set()
    for s in m.worlds:
        options = [[e for e in family if m.access(a, s) <= e] for a in group]
        if any(not opts for opts in options):
            continue
        for choice in itertools.product(*options):
            remaining = frozenset.intersection(*choice)
            if all(m.access(b, s) & remaining <= target for b in group):
                out.add(s)
                break
    return frozenset(out)


@dataclass
class SelfFulfilment:
    verdict: bool
    generated: frozenset
    not_generated: frozenset  # in the assumed family, but no formula has it as extension
    not_in_family: frozenset  # extension of some formula, but absent from the family

    @property
    def generated_within_family(self) -> bool:
        return not self.not_in_family

    @property
    def family_witnessed(self) -> bool:
        return not self.not_generated


def box_preimage(m: KripkeModel, agent: str, e) -> frozenset:
    e = frozenset(e)
    return frozenset(w for w in m.worlds if m.access(agent, w) <= e)


def verify_self_fulfilling(m: KripkeModel, family) -> SelfFulfilment:
    """Generate every extension reachable from the atoms, assuming ``family`` is the set of all extensions.

    Operators are applied in a fixed order (complement, union, boxes, circular
    D for every non-empty group) until nothing new appears.
    """
    family = frozenset(frozenset(e) for e in family)
    everything = frozenset(m.worlds)
    generated = set()
    worklist = []

    def add(e):
        if e not in generated:
            generated.add(e)
            worklist.append(e)

    for p in m.atoms:
        add(frozenset(m.valuation.get(p, ())))
    groups = list(_groups(m))
    d_cache: dict = {}
    while worklist:
        e = worklist.pop(0)
        add(everything - e)
        for other in list(generated):
            add(e | other)
        for a in m.agents:
            add(box_preimage(m, a, e))
        for g in groups:
            key = (g, e)
            if key not in d_cache:
                d_cache[key] = circular_d_extension(m, g, e, family)
            add(d_cache[key])
    generated = frozenset(generated)
    return SelfFulfilment(generated == family, generated, family - generated, generated - family)


def appendix_families(m: KripkeModel) -> dict:
    """The two extension families shown to be consistent with the circular semantics."""
    s_worlds = frozenset(w for w in m.worlds if w.startswith("s"))
    t_worlds = frozenset(w for w in m.worlds if w.startswith("t"))
    return {
        "powerset": powerset(m.worlds),
        "coarse": frozenset({frozenset(), s_worlds, t_worlds, frozenset(m.worlds)}),
    }


def identifying_extensions(m: KripkeModel, family) -> dict:
    """Extensions of the five world-describing formulas built from D{a,b}p, computed extensionally."""
    everything = frozenset(m.worlds)
    p = frozenset(m.valuation["p"])
    d = circular_d_extension(m, {"a", "b"}, p, family)

    def diamond(agent, e):
        return everything - box_preimage(m, agent, everything - e)

    not_p = everything - p
    return {
        "s1": p - d & diamond("b", d),
        "s2": d,
        "s3": (p - d) - diamond("b", d),
        "t1": not_p & diamond("b", d),
        "t2": not_p & diamond("a", d),
        "t3": not_p - diamond("b", d) - diamond("a", d),
    }


# -- demo claims ----------------------------------------------------------------------

def describe(m: KripkeModel) -> str:
    lines = [f"worlds: {', '.join(m.worlds)}"]
    for p in m.atoms:
        lines.append(f"  {p} true at: {', '.join(w for w in m.worlds if m.holds_atom(p, w)) or '-'}")
    for a in m.agents:
        blocks = ["{" + ",".join(w for w in m.worlds if w in c) + "}" for c in agent_classes(m, a)]
        lines.append(f"  agent {a}: {' '.join(blocks)}")
    return "\n".join(lines)


def demo_claims(name: str) -> list:
    """(description, passed) pairs checked by ``dkcheck demo NAME``."""
    key = name.replace("-", "_")
    claims = []
    if key == "appendix_a":
        pm = build("appendix_a")
        m = pm.model
        classes = sorted(sorted(c) for c in partition(m, {"p"}).classes)
        claims.append(("model is a valid S5 model", validate(m) == []))
        claims.append(("{p}-bisimulation classes are {s1,s2,s3} and {t1,t2,t3}",
                       classes == [["s1", "s2", "s3"], ["t1", "t2", "t3"]]))
        claims.append(("D{a,b} p holds at s2 under intersection", evaluate(pm, "D{a,b} p", INTERSECTION)))
        claims.append((f"D{{a,b}} p fails at s2 under all {len(L0_VARIANTS)} L0 variants",
                       not any(evaluate(pm, "D{a,b} p", v) for v in L0_VARIANTS)))
        claims.append(("[b]p fails at s1", not evaluate(PointedModel(m, "s1"), "[b]p")))
    elif key == "moore":
        pm = build("moore")
        m = pm.model
        moore = parse("p & ~[a]p")
        claims.append(("[b]p holds at w1", evaluate(pm, "[b]p")))
        claims.append(("[a]p fails at w1", not evaluate(pm, "[a]p")))
        claims.append(("D{a,b}(p & ~[a]p) holds at w1 under every variant",
                       all(evaluate(pm, "D{a,b}(p & ~[a]p)", v) for v in ALL_VARIANTS)))
        claims.append(("[a](p & ~[a]p) holds nowhere", extension(m, parse("[a](p & ~[a]p)")) == frozenset()))
        claims.append(("the Moore sentence itself is true at w1", evaluate(pm, moore)))
    elif key == "intro":
        pm = build("intro")
        claims.append(("a knows p -> q, b knows p, neither knows q",
                       evaluate(pm, "[a](p -> q) & [b]p & ~[a]q & ~[b]q")))
        claims.append(("D{a,b} q holds under every variant",
                       all(evaluate(pm, "D{a,b} q", v) for v in ALL_VARIANTS)))
        run = simulate_script(pm.model, pm.point, [("b", "p"), ("a", "q")])
        claims.append(("script b: p, then a: q is correct at every step", run.all_correct))
        claims.append(("after the script a's remaining worlds all satisfy q",
                       run.state.neighborhood("a", pm.point) <= pm.model.valuation["q"]))
    elif key == "circularity":
        m = build("appendix_a").model
        fams = appendix_families(m)
        p = m.valuation["p"]
        full = verify_self_fulfilling(m, fams["powerset"])
        coarse = verify_self_fulfilling(m, fams["coarse"])
        claims.append(("the powerset family is self-fulfilling", full.verdict))
        claims.append(("the family {empty, s-worlds, t-worlds, all} is self-fulfilling", coarse.verdict))
        claims.append(("with the powerset, D{a,b} p holds exactly at s2",
                       circular_d_extension(m, {"a", "b"}, p, fams["powerset"]) == {"s2"}))
        claims.append(("with the coarse family, D{a,b} p holds nowhere",
                       circular_d_extension(m, {"a", "b"}, p, fams["coarse"]) == frozenset()))
        ids = identifying_extensions(m, fams["powerset"])
        claims.append(("with the powerset, each world has an identifying formula",
                       all(ids[w] == {w} for w in m.worlds)))
        trivial = verify_self_fulfilling(m, [frozenset(), frozenset(m.worlds)])
        claims.append(("the family {empty, all} is not self-fulfilling (it lacks the extension of p)",
                       not trivial.verdict and frozenset(p) in trivial.not_in_family))
    else:
        raise KeyError(f"unknown demo {name!r}; choose from appendix-a, moore, intro, circularity")
    return claims
