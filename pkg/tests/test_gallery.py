import pytest

from dkcheck import gallery
from dkcheck.formula import parse
from dkcheck.kripke import PointedModel, validate
from dkcheck.semantics import ALL_VARIANTS, evaluate, extension


def test_build_accepts_both_spellings():
    assert gallery.build("appendix-a").model == gallery.build("appendix_a").model
    with pytest.raises(KeyError):
        gallery.build("nope")


def test_moore_and_intro(moore, intro):
    assert evaluate(moore, "[b]p") and not evaluate(moore, "[a]p")
    assert evaluate(intro, "[a](p -> q) & [b]p & ~[a]q & ~[b]q")


def test_six_world_model_is_valid(ma):
    assert validate(ma) == []
    assert gallery.build("appendix_a").point == "s2"


def test_circular_d_examples(ma):
    fams = gallery.appendix_families(ma)
    p = ma.valuation["p"]
    assert gallery.circular_d_extension(ma, {"a", "b"}, p, fams["powerset"]) == {"s2"}
    assert gallery.circular_d_extension(ma, {"a", "b"}, p, fams["coarse"]) == frozenset()
    for fam in fams.values():
        assert gallery.circular_d_extension(ma, {"a", "b"}, ma.worlds, fam) == frozenset(ma.worlds)


def test_self_fulfilment(ma):
    fams = gallery.appendix_families(ma)
    full = gallery.verify_self_fulfilling(ma, fams["powerset"])
    assert full.verdict and len(full.generated) == 64
    coarse = gallery.verify_self_fulfilling(ma, fams["coarse"])
    assert coarse.verdict and coarse.generated == fams["coarse"]
    trivial = gallery.verify_self_fulfilling(ma, [frozenset(), frozenset(ma.worlds)])
    assert not trivial.verdict
    assert frozenset(ma.valuation["p"]) in trivial.not_in_family
    assert not trivial.generated_within_family


def test_identifying_formulas(ma):
    ids = gallery.identifying_extensions(ma, gallery.appendix_families(ma)["powerset"])
    assert all(ids[w] == {w} for w in ma.worlds)


def test_l0_fragment_cannot_separate_bisimilar_worlds(ma):
    # without D every extension is a union of {s1,s2,s3} and {t1,t2,t3}
    for text in ("[a]p", "<b>~p", "[b][a]p | <a>[b]~p"):
        assert extension(ma, parse(text)) in (frozenset(), ma.valuation["p"],
                                              frozenset(ma.worlds) - ma.valuation["p"], frozenset(ma.worlds))


@pytest.mark.parametrize("name", ["appendix-a", "moore", "intro", "circularity"])
def test_demo_claims_hold(name):
    claims = gallery.demo_claims(name)
    assert claims and all(ok for _, ok in claims)


def test_moore_sentence_under_every_variant(moore):
    for v in ALL_VARIANTS:
        assert evaluate(moore, "D{a,b}(p & ~[a]p)", v)
    assert not any(evaluate(PointedModel(moore.model, w), "[a](p & ~[a]p)") for w in moore.model.worlds)


def test_describe_lists_classes(ma):
    text = gallery.describe(ma)
    assert "agent b: {s1,s2,t1} {s3,t2,t3}" in text
