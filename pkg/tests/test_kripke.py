import json

import pytest

from dkcheck import gallery
from dkcheck.kripke import (
    K, S5, GeneratorParams, KripkeModel, ModelError, agent_classes, from_json, load, random_model,
    s5_closure, save, to_json, validate,
)


def _single():
    return KripkeModel.build(["w"], ["a"], ["p"], {"p": ["w"]}, {"a": [("w", "w")]}, S5)


def test_validate_examples(ma):
    assert validate(ma) == []
    assert validate(_single()) == []
    broken = KripkeModel.build(["w", "v"], ["a"], [], {}, {"a": [("w", "w")]}, S5)
    problems = validate(broken)
    assert len(problems) == 1
    assert "'a'" in problems[0] and "'v'" in problems[0]


def test_validate_undeclared_and_empty():
    m = KripkeModel.build(["w"], ["a"], ["p"], {"p": ["z"]}, {"a": [("w", "y")]}, K)
    problems = validate(m)
    assert any("'z'" in p for p in problems)
    assert any("'y'" in p for p in problems)
    assert "worlds must be non-empty" in validate(KripkeModel.build([], [], [], {}, {}, K))


def test_s5_closure_by_hand():
    m = KripkeModel.build(["s1", "t1", "x"], ["a"], [], {}, {"a": [("s1", "t1")]}, S5)
    closed = s5_closure(m)
    assert closed.relations["a"] == {
        ("s1", "t1"), ("s1", "s1"), ("t1", "t1"), ("x", "x"), ("t1", "s1"),
    }
    assert s5_closure(closed) == closed


def test_drawn_edges_give_stated_partitions(ma):
    assert sorted(map(sorted, agent_classes(ma, "b"))) == [["s1", "s2", "t1"], ["s3", "t2", "t3"]]
    assert sorted(map(sorted, agent_classes(ma, "a"))) == [["s1", "t1"], ["s2", "t2"], ["s3", "t3"]]


def test_closure_is_idempotent_and_monotone():
    for seed in range(30):
        m = random_model(GeneratorParams(seed, 5, 2, 1, 0.3, K))
        c = s5_closure(m)
        assert s5_closure(c) == c
        for a in m.agents:
            assert m.relations[a] <= c.relations[a]


def test_save_load_round_trip(tmp_path, ma):
    path = tmp_path / "ma.json"
    save(ma, path)
    back = load(path)
    assert back == ma
    assert (len(back.worlds), len(back.agents), len(back.atoms)) == (6, 2, 1)


def test_json_round_trip_random():
    for seed in range(40):
        for frame in (K, S5):
            m = random_model(GeneratorParams(seed, 5, 3, 2, 0.4, frame))
            assert from_json(json.loads(json.dumps(to_json(m)))) == m


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"worlds": [], "agents": [], "atoms": []}))
    with pytest.raises(ModelError, match="worlds must be non-empty"):
        load(empty)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"worlds": ["x"], "agents": ["a"], "atoms": [],
                               "relations": {"a": [["x", "nowhere"]]}, "frame": "K"}))
    with pytest.raises(ModelError, match=r"bad\.json.*'x', 'nowhere'"):
        load(bad)
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{\n  oops")
    with pytest.raises(ModelError, match="garbled.json: line 2"):
        load(garbled)


def test_load_rejects_non_s5_unless_closed(tmp_path):
    data = {"worlds": ["x", "y"], "agents": ["a"], "atoms": [], "relations": {"a": [["x", "y"]]}, "frame": "S5"}
    with pytest.raises(ModelError, match="reflexive"):
        from_json(data)
    data["close"] = True
    assert validate(from_json(data)) == []


def test_generator_determinism_and_density():
    p = GeneratorParams(11, 5, 2, 2, 0.3, S5)
    assert random_model(p) == random_model(p)
    ident = random_model(GeneratorParams(3, 5, 2, 1, 0.0, S5))
    for a in ident.agents:
        assert ident.relations[a] == {(w, w) for w in ident.worlds}
    total = random_model(GeneratorParams(3, 4, 2, 1, 1.0, K))
    for a in total.agents:
        assert total.relations[a] == {(x, y) for x in total.worlds for y in total.worlds}


def test_generator_params_validation():
    with pytest.raises(ValueError):
        GeneratorParams(0, world_count=0)
    with pytest.raises(ValueError):
        GeneratorParams(0, edge_density=1.5)
    with pytest.raises(ValueError):
        GeneratorParams(0, frame="KD45")


def test_generated_s5_models_are_valid():
    for seed in range(50):
        assert validate(random_model(GeneratorParams(seed, 5, 3, 2, 0.3, S5))) == []


def test_gallery_models_are_valid():
    for name in gallery.NAMES:
        assert validate(gallery.build(name).model) == []
