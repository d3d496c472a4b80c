import pytest

import lmt

RAW = "region #r : depth = 0\nlet !x = get(#r) in set(#r, (!x) ($x)) || #r <= !(\\x. x *)"


def test_depth_and_wellformedness():
    assert lmt.depth(RAW) == 1
    assert lmt.wellformed(RAW)["ok"]
    bad = lmt.wellformed("(\\!x. !(x x)) !*")
    assert not bad["ok"]
    assert bad["address"] == "001"


def test_parse_errors_raise():
    with pytest.raises(ValueError):
        lmt.depth("let !x = in")


def test_run_consumes_the_store():
    out = lmt.run(RAW, relation="full", strategy="shallow")
    assert out["halted"]
    assert out["rules"][0] == "get"
    assert "#r <=" in out["final"]


def test_same_seed_same_run():
    src = "let !x = !* in ($x || $x || $x)"
    a = lmt.run(src, relation="outer", strategy="random", seed=5)
    b = lmt.run(src, relation="outer", strategy="random", seed=5)
    assert a == b


def test_numerals_round_trip():
    for n in range(1, 8):
        assert lmt.decode_nat(lmt.nat(n)) == n
    assert lmt.typecheck(lmt.nat(3))["type"] == "forall t. !(t -o t) -o $(t -o t)"


def test_bound_report():
    rep = lmt.bound(RAW, relation="cbv")
    assert rep["pass"]
    assert rep["steps"] <= rep["bound"] == rep["size"] ** 2


def test_unfold_copies():
    p = "let !x = !(\\z. z) in (let !y = !x in $(y y) || let !y = !x in $(y y))"
    u = lmt.unfold(p, 0)
    assert "bag 4" in u["program"]
    assert u["weighted_size"] > lmt.size(p, weighted=True)


def test_run_adds_two():
    assert lmt.run_cells(0, 1, 2) == [2, 3, 4]
