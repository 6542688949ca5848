import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from foliated.blowup import (CORNER, REDUCED, SMOOTH, ConfigError, GermConfig, MarkedPoint,
                             blowup, chain_family_shortcut, derive_points, mld, mld_of_graph,
                             mld_zero_boundary_scan, resolve_check, zero_boundary_germs)
from foliated.discrepancy import discrepancies
from foliated.graph import BoundaryComponent, FoliatedDualGraph, chain_graph, inv
from foliated.rational import NEG_INF
from foliated.verify import random_config

half = Fraction(1, 2)


def corner_cfg():
    g = chain_graph([inv("A", 2, 1), inv("B", 2, 2)])
    return GermConfig(g, (MarkedPoint("p", CORNER, ("A", "B")),))


def test_corner_formula():
    cfg = corner_cfg()
    assert cfg.a == {"A": Fraction(2, 3), "B": Fraction(1, 3)}
    after = blowup(cfg, "p")
    assert after.a["F1"] == 1
    assert resolve_check(cfg, "p", after)


def test_smooth_formula_with_branch():
    g = FoliatedDualGraph((inv("E", 2, 2),), (), (BoundaryComponent("B", Fraction(2, 3), {"E": 1}),))
    cfg = GermConfig(g, (MarkedPoint("p", SMOOTH, ("E",), {"B": 1}),), {"E": Fraction(0)})
    after = blowup(cfg, "p")
    assert after.a["F1"] == Fraction(1, 3)


def test_reduced_formula():
    cfg = GermConfig(FoliatedDualGraph((inv("E", 2, 1),)), (MarkedPoint("p", REDUCED, ("E",)),))
    assert cfg.a == {"E": half}
    after = blowup(cfg, "p")
    assert after.a["F1"] == half
    assert resolve_check(cfg, "p", after)


def test_new_curve_data():
    after = blowup(corner_cfg(), "p")
    g = after.graph
    f = g.vertex("F1")
    assert (f.self_int, f.z) == (-1, 2)
    assert g.vertex("A").self_int == -3 and g.vertex("B").self_int == -3
    assert g.mult("A", "B") == 0
    assert g.mult("A", "F1") == 1 and g.mult("B", "F1") == 1
    assert {p.kind for p in after.points} == {CORNER}


def test_smooth_blowup_raises_z():
    cfg = GermConfig(FoliatedDualGraph((inv("E", 2, 1),)), (MarkedPoint("s", SMOOTH, ("E",)),))
    after = blowup(cfg, "s")
    assert after.graph.vertex("E").z == 2
    assert after.graph.vertex("F1").z == 1
    assert after.a["F1"] == half + 1
    assert resolve_check(cfg, "s", after)


def test_corrupted_value_fails_check():
    cfg = corner_cfg()
    after = blowup(cfg, "p")
    bad = replace(after, a={**after.a, "F1": Fraction(7, 8)})
    assert not resolve_check(cfg, "p", bad)


def test_identity_passes_check():
    cfg = corner_cfg()
    assert resolve_check(cfg, None, cfg)


def test_boundary_follows_branch():
    g = FoliatedDualGraph((inv("E", 2, 1),), (), (BoundaryComponent("B", half, {"E": 1}),))
    cfg = GermConfig(g, tuple(derive_points(g)))
    smooth = [p for p in cfg.points if p.kind == SMOOTH][0]
    after = blowup(cfg, smooth.id)
    b = after.graph.boundary_component("B")
    assert b.meets == (("F1", 1),)
    assert resolve_check(cfg, smooth.id, after)
    assert any(p.mult("B") == 1 and p.curves == ("F1",) for p in after.points)


def test_branch_plan_validation():
    g = FoliatedDualGraph((inv("E", 2, 1),), (), (BoundaryComponent("B", half, {"E": 1}),))
    cfg = GermConfig(g, (MarkedPoint("s", SMOOTH, ("E",), {"B": 1}),))
    with pytest.raises(ConfigError):
        blowup(cfg, "s", {"B": ("reduced", 1)})
    with pytest.raises(ConfigError):
        blowup(cfg, "s", {"B": ("smooth", 2)})
    # B.F is the multiplicity at the point whatever the plan says; a zero
    # multiplicity only means no marked point of F carries the branch
    separated = blowup(cfg, "s", {"B": ("smooth", 0)})
    assert separated.graph.boundary_component("B").meets == (("F1", 1),)
    assert all(p.mult("B") == 0 for p in separated.points)


def test_config_rejects_bad_points():
    g = chain_graph([inv("A", 2, 1), inv("B", 2, 2)])
    with pytest.raises(ConfigError):
        GermConfig(g, (MarkedPoint("p", CORNER, ("A", "B")), MarkedPoint("q", CORNER, ("A", "B"))))
    with pytest.raises(ConfigError):
        GermConfig(g, (MarkedPoint("p", REDUCED, ("Z",)),))
    with pytest.raises(ValueError):
        MarkedPoint("p", CORNER, ("A",))


def test_derive_points_counts():
    g = chain_graph([inv("A", 3, 1), inv("B", 2, 2), inv("C", 3, 3)])
    kinds = sorted((p.kind, p.curves) for p in derive_points(g))
    assert kinds == [(CORNER, ("A", "B")), (CORNER, ("B", "C")),
                     (REDUCED, ("C",)), (REDUCED, ("C",))]


def test_mld_examples():
    single = mld_of_graph(FoliatedDualGraph((inv("E", 2, 1),)), depth=2)
    assert (single.value, single.certified) == (half, True)
    pair = mld_of_graph(chain_graph([inv("A", 2, 1), inv("B", 2, 2)]), depth=2)
    assert (pair.value, pair.certified) == (Fraction(1, 3), True)
    g = FoliatedDualGraph((inv("E", 2, 1),), (), (BoundaryComponent("B", 1, {"E": 1}, True),))
    bad = mld_of_graph(g, depth=2)
    assert (bad.value, bad.certified) == (NEG_INF, True)


def test_mld_zero_convention():
    r = mld_of_graph(FoliatedDualGraph((inv("E", 2, 2),)), depth=2)
    assert r.value == 0


def test_mld_depth_must_be_positive():
    with pytest.raises(ValueError):
        mld(corner_cfg(), 0)


def test_shortcut_needs_long_chain():
    g = chain_graph([inv("A", 2, 1), inv("B", 2, 2)])
    cfg = GermConfig(g, tuple(derive_points(g)))
    assert not chain_family_shortcut(cfg, Fraction(1, 4))


def test_scan_contains_examples():
    found = mld_zero_boundary_scan(2)
    assert Fraction(1, 3) in found and Fraction(1, 2) in found and Fraction(0) in found


def test_scan_germ_kinds():
    labels = {label for label, _ in zero_boundary_germs(4)}
    assert labels == {"F-chain", "bad-tail", "dihedral", "(-2)-chain", "EGL cycle", "nodal"}


# --- properties ------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.data())
def test_random_blowup_sequences_resolve(seed, data):
    cfg = random_config(random.Random(seed))
    for _ in range(data.draw(st.integers(1, 4))):
        p = data.draw(st.sampled_from([q.id for q in cfg.points]))
        after = blowup(cfg, p)
        assert resolve_check(cfg, p, after)
        cfg = after


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_mld_bounded_by_pld_and_one(seed, depth):
    cfg = random_config(random.Random(seed))
    rep = discrepancies(cfg.graph, with_good_lc=False)
    r = mld(cfg, depth, use_shortcut=False, report=rep)
    if r.value is not NEG_INF:
        assert r.value <= 1
        assert r.value <= rep.pld or rep.pld == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_deeper_search_never_raises_value(seed):
    cfg = random_config(random.Random(seed))
    shallow, deep = mld(cfg, 1, use_shortcut=False), mld(cfg, 3, use_shortcut=False)
    assert deep.value <= shallow.value
