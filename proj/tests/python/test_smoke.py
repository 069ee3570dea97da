import pytest

import ptforce


def test_cone_levels():
    assert ptforce.levels("cone(01)", 2) == [["Λ"], ["0"], ["01"]]


def test_tree_methods():
    t = ptforce.Tree("union(cone(00),cone(11))")
    assert t.level(2) == ["00", "11"]
    assert t.contains("110")
    assert not t.contains("01")
    assert t.stem() == ""
    assert t.restrict("1") == ptforce.Tree("cone(11)")
    assert t.is_perfect(6) == "yes"


def test_parse_error():
    with pytest.raises(ptforce.ForcingError, match="ParseError"):
        ptforce.Tree("cone(01")


def test_stages_hash_is_stable():
    h1, trace = ptforce.run_stages()
    h2, _ = ptforce.run_stages()
    assert h1 == h2
    assert len(h1) == 64
    assert trace["stages"] == 2


def test_verify_default_passes():
    checks = ptforce.verify()
    assert checks
    assert all(c["status"] != "fail" for c in checks), [c for c in checks if c["status"] == "fail"]


def test_missing_heights_is_config_error():
    with pytest.raises(ptforce.ForcingError, match="ConfigError"):
        ptforce.run_stages({"schedule": {}})


@pytest.mark.parametrize("which", ["pi", "zero"])
def test_avoid_demo(which):
    ok, trace = ptforce.avoid_demo(which)
    assert ok
    assert trace["avoids"] == "yes"
    assert trace["refines"] is True
