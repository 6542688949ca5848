from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from foliated.discrepancy import (DiscrepancyReport, Status, StrictTransform, discrepancies,
                                  good_lc, kfol_degree, kvar_degree, log_discrepancies,
                                  mld_from_log_resolution, variety_gap)
from foliated.errors import HypothesisError, NotNegativeDefiniteError
from foliated.graph import (BoundaryComponent, CurveVertex, Edge, FoliatedDualGraph, Invariant,
                            chain_graph, cycle_graph, inv, trans)
from foliated.linalg import intersection_matrix, mat_vec
from foliated.rational import NEG_INF

half, third = Fraction(1, 2), Fraction(1, 3)


def test_kfol_degree():
    assert kfol_degree(inv("E", 2, 2)) == 0
    assert kfol_degree(inv("E", 2, 1)) == -1
    assert kfol_degree(trans("T", 3, tang=0)) == 3


def test_kvar_degree():
    assert kvar_degree(inv("E", 1, 1)) == -1
    assert kvar_degree(inv("E", 2, 1)) == 0
    assert kvar_degree(CurveVertex("E", -3, 1, Invariant(0))) == 3


def test_single_minus2_z1():
    r = discrepancies(FoliatedDualGraph((inv("E", 2, 1),)))
    assert r.a == {"E": half}
    assert r.status is Status.TERMINAL
    assert r.pld == half


def test_single_minus2_z2_zero_convention():
    r = discrepancies(FoliatedDualGraph((inv("E", 2, 2),)))
    assert r.a == {"E": 0}
    assert r.status is Status.CANONICAL
    assert r.pld == 0
    assert r.min_log_disc == 0


def test_chain_323():
    g = chain_graph([inv("E1", 3, 1), inv("E2", 2, 2), inv("E3", 3, 2)])
    r = discrepancies(g)
    assert [r.a[v] for v in g.ids] == [Fraction(5, 12), Fraction(1, 4), Fraction(1, 12)]
    assert r.status is Status.TERMINAL
    assert r.pld == Fraction(1, 12)


def test_not_negative_definite():
    g = chain_graph([inv("A", 1, 1), inv("B", 1, 1)])
    with pytest.raises(NotNegativeDefiniteError):
        discrepancies(g)


def test_invariant_boundary_breaks_lc():
    g = FoliatedDualGraph((inv("E", 2, 1),), (), (BoundaryComponent("B", third, {"E": 1}, True),))
    assert discrepancies(g).status is Status.NOT_LC


def test_transverse_boundary_lowers_values():
    base = FoliatedDualGraph((inv("E", 2, 1),))
    with_b = base.with_boundary([BoundaryComponent("B", half, {"E": 1})])
    assert discrepancies(with_b).a["E"] < discrepancies(base).a["E"]
    # -2 c = -1 + 1/2
    assert discrepancies(with_b).a["E"] == Fraction(1, 4)


def test_good_lc_examples():
    minus2 = chain_graph([inv(f"C{k}", 2, 2) for k in range(3)])
    assert good_lc(minus2, discrepancies(minus2, with_good_lc=False))
    t6 = chain_graph([inv("L", 2, 1), trans("T", 2), inv("R", 2, 1)])
    assert good_lc(t6, discrepancies(t6, with_good_lc=False))
    # a degree-2 transverse (-1)-curve here is not negative definite; with one
    # neighbour the bound is still max{0, 2} = 2 > 1
    t6_thin = chain_graph([inv("L", 2, 1), trans("T", 1)])
    rep = discrepancies(t6_thin, with_good_lc=False)
    assert rep.status.is_lc
    assert not good_lc(t6_thin, rep)


def test_variety_gap_examples():
    assert variety_gap(FoliatedDualGraph((inv("E", 2, 2),))).b == {"E": 0}
    cyc = cycle_graph([inv("A", 2, 2), inv("B", 2, 2), inv("C", 3, 2)])
    assert variety_gap(cyc).b == {"A": 1, "B": 1, "C": 1}
    assert variety_gap(FoliatedDualGraph((inv("E", 2, 1),))).b == {"E": half}


def test_mld_log_resolution_single():
    assert mld_from_log_resolution(FoliatedDualGraph((inv("E", 2, 1),))) == half


def test_mld_log_resolution_transverse_term():
    g = chain_graph([trans("T", 1), inv("E", 3, 0)])
    assert discrepancies(g, with_good_lc=False).a["T"] == -half
    # T meets only smooth foliation points, so it contributes 1 + a = 1/2
    assert mld_from_log_resolution(g) == half


def test_mld_log_resolution_invariant_strict_transform():
    g = FoliatedDualGraph((inv("E", 2, 1),))
    st_ = StrictTransform("S", third, invariant=True)
    assert mld_from_log_resolution(g, [st_]) is NEG_INF


def test_mld_log_resolution_requires_disjoint_transverse():
    g = chain_graph([trans("T", 3), trans("U", 3)])
    with pytest.raises(HypothesisError):
        mld_from_log_resolution(g)


# --- properties ------------------------------------------------------------------

@st.composite
def f_chains(draw):
    n = draw(st.integers(1, 7))
    ws = [draw(st.integers(2, 6)) for _ in range(n)]
    return chain_graph([inv(f"E{k}", w, 1 if k == 0 else 2) for k, w in enumerate(ws)])


@settings(max_examples=100, deadline=None)
@given(f_chains())
def test_f_chains_terminal_and_inside_unit_interval(g):
    r = discrepancies(g)
    assert r.status is Status.TERMINAL
    assert all(0 < x < 1 for x in r.a.values())


@settings(max_examples=100, deadline=None)
@given(f_chains(), st.sampled_from([Fraction(1, 2), Fraction(2, 3), Fraction(1)]))
def test_solution_satisfies_pullback_equations(g, b):
    g = g.with_boundary([BoundaryComponent("B", b, {g.ids[-1]: 1})])
    c = log_discrepancies(g)
    lhs = mat_vec(intersection_matrix(g), [c[v] for v in g.ids])
    want = [kfol_degree(v) + g.theta_dot(v.id) for v in g.vertices]
    assert lhs == want


@settings(max_examples=60, deadline=None)
@given(f_chains(), st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(1)]))
def test_adding_boundary_never_raises_discrepancy(g, b):
    before = discrepancies(g, with_good_lc=False).a
    after = discrepancies(g.with_boundary([BoundaryComponent("B", b, {g.ids[0]: 1})]),
                          with_good_lc=False).a
    assert all(after[v] <= before[v] for v in g.ids)
