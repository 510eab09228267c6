import random

import pytest

from dkcheck.bisim import bisimilar, characteristic_formula, closure, is_closed, partition
from dkcheck.formula import disjunction, meta
from dkcheck.kripke import K, S5, GeneratorParams, KripkeModel, ModelError, PointedModel, random_model
from dkcheck.oracle import naive_partition, random_formula
from dkcheck.semantics import extension


def _classes(part):
    return sorted(sorted(c) for c in part.classes)


def test_six_world_partitions(ma):
    assert _classes(partition(ma, {"p"})) == [["s1", "s2", "s3"], ["t1", "t2", "t3"]]
    assert _classes(partition(ma, set())) == [sorted(ma.worlds)]


def test_single_world():
    m = KripkeModel.build(["w"], ["a"], ["p"], {"p": ["w"]}, {"a": [("w", "w")]}, S5)
    assert _classes(partition(m)) == [["w"]]


def test_undeclared_atoms_rejected(ma):
    with pytest.raises(ModelError):
        partition(ma, {"r"})


def test_closure_examples(ma):
    part = partition(ma, {"p"})
    assert closure(part, {"s2", "t2"}) == frozenset(ma.worlds)
    assert closure(part, set()) == frozenset()
    assert closure(part, {"s1", "s2", "s3"}) == {"s1", "s2", "s3"}
    assert is_closed(part, {"t1", "t2", "t3"})
    assert not is_closed(part, {"t1"})


def test_bisimilar_examples(ma):
    s1, s3, t1 = (PointedModel(ma, w) for w in ("s1", "s3", "t1"))
    assert bisimilar(s1, s3, {"p"})
    assert not bisimilar(s1, t1, {"p"})
    for w in ma.worlds:
        assert bisimilar(PointedModel(ma, w), PointedModel(ma, w))


def _models(n=80):
    for seed in range(n):
        frame = (K, S5)[seed % 2]
        yield random_model(GeneratorParams(seed, 1 + seed % 5, 1 + seed % 3, 1 + seed % 2, 0.35, frame))


def test_partition_invariants_and_naive_agreement():
    for m in _models():
        part = partition(m)
        seen = [w for c in part.classes for w in c]
        assert sorted(seen) == sorted(m.worlds)
        for c in part.classes:
            for p in m.atoms:
                assert len({m.holds_atom(p, w) for w in c}) == 1
        # stable: every world in a class reaches the same classes
        for c in part.classes:
            for a in m.agents:
                assert len({frozenset(part.class_of[v] for v in m.access(a, w)) for w in c}) == 1
        assert _classes(part) == _classes(naive_partition(m))


def test_closure_properties():
    rng = random.Random(3)
    for m in _models(40):
        part = partition(m)
        x = {w for w in m.worlds if rng.random() < 0.5}
        y = x | {w for w in m.worlds if rng.random() < 0.3}
        cx = closure(part, x)
        assert x <= cx
        assert closure(part, cx) == cx
        assert cx <= closure(part, y)


def test_characteristic_formulas():
    for m in [*_models(60)]:
        part = partition(m)
        formulas = [characteristic_formula(part, i) for i in range(len(part))]
        exts = [extension(m, f) for f in formulas]
        for f, e, c in zip(formulas, exts, part.classes):
            assert meta(f).is_L0
            assert meta(f).atoms_of <= set(m.atoms)
            assert e == c
        assert extension(m, disjunction(formulas)) == frozenset(m.worlds)


def test_characteristic_formula_six_worlds(ma):
    part = partition(ma, {"p"})
    i = part.class_of["s1"]
    assert extension(ma, characteristic_formula(part, i)) == {"s1", "s2", "s3"}


def test_modal_invariance_within_model():
    rng = random.Random(5)
    for m in _models(60):
        part = partition(m)
        for _ in range(10):
            e = extension(m, random_formula(rng, m.atoms, m.agents, 3))
            assert is_closed(part, e)
