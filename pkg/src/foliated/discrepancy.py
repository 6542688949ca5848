"""Foliated discrepancies on a resolution by numerical pullback.

Write K_G + Theta' + Delta_exc = pi^*(K_F + Delta) + sum c_i E_i, where
Delta_exc is the sum of the transverse exceptional curves. Intersecting with
each E_j gives the linear system A c = d with

    d_j = K_G.E_j + Theta.E_j + Delta_exc.E_j.

The solved coefficient c_i is the log discrepancy of E_i; the discrepancy is
a_i = c_i - eps_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import HypothesisError, NotNegativeDefiniteError
from .graph import BoundaryComponent, CurveVertex, FoliatedDualGraph, degree
from .linalg import intersection_matrix, is_negative_definite, solve, solve_negative_definite
from .rational import NEG_INF, min_nonzero


class Status(Enum):
    TERMINAL = "Terminal"
    CANONICAL = "Canonical"
    LOG_TERMINAL = "LogTerminal"
    LOG_CANONICAL = "LogCanonical"
    NOT_LC = "NotLC"

    @property
    def is_lc(self) -> bool:
        return self is not Status.NOT_LC

    @property
    def is_canonical(self) -> bool:
        return self in (Status.TERMINAL, Status.CANONICAL)


@dataclass(frozen=True)
class DiscrepancyReport:
    a: dict
    log_disc: dict
    status: Status
    pld: Fraction
    min_log_disc: Fraction | None
    good_lc: bool | None = None


@dataclass(frozen=True)
class GapVector:
    b: dict


def kfol_degree(v: CurveVertex) -> int:
    """K_G . E from the Z-index (invariant) or tangency order (transverse)."""
    if v.invariant:
        return v.z + 2 * v.genus - 2
    return v.tang - v.self_int


def kvar_degree(v: CurveVertex) -> int:
    """K_Y . E by adjunction."""
    return 2 * v.genus - 2 - v.self_int


def _checked_matrix(g: FoliatedDualGraph):
    a = intersection_matrix(g)
    if not is_negative_definite(a):
        raise NotNegativeDefiniteError("intersection matrix is not negative definite")
    return a


def rhs_vector(g: FoliatedDualGraph) -> list:
    transverse = {v.id for v in g.vertices if not v.invariant}
    if not transverse and not g.boundary:
        return [kfol_degree(v) for v in g.vertices]
    theta: dict = {}
    for b in g.boundary:
        if b.coeff:
            for c, t in b.meets:
                theta[c] = theta.get(c, 0) + b.coeff * t
    d = []
    for v in g.vertices:
        delta_dot = sum(m for w, m in g.neighbors(v.id).items() if w in transverse) if transverse else 0
        if not v.invariant:
            delta_dot += v.self_int
        d.append(kfol_degree(v) + theta.get(v.id, 0) + delta_dot)
    return d


def log_discrepancies(g: FoliatedDualGraph) -> dict:
    sol = solve_negative_definite(intersection_matrix(g), [rhs_vector(g)])
    if sol is None:
        raise NotNegativeDefiniteError("intersection matrix is not negative definite")
    return dict(zip(g.ids, sol[0]))


def decide_status(g: FoliatedDualGraph, a: dict, c: dict) -> Status:
    # the boundary components are divisors too: log discrepancy eps - coeff
    live = [b for b in g.boundary if b.coeff != 0]
    if any(x < 0 for x in c.values()) or any(b.log_disc < 0 for b in live):
        return Status.NOT_LC
    if all(x > 0 for x in a.values()):
        return Status.TERMINAL
    if all(x >= 0 for x in a.values()):
        return Status.CANONICAL
    if all(x > 0 for x in c.values()) and all(b.log_disc > 0 for b in live):
        return Status.LOG_TERMINAL
    return Status.LOG_CANONICAL


def discrepancies(g: FoliatedDualGraph, with_good_lc: bool = True) -> DiscrepancyReport:
    c = log_discrepancies(g)
    a = {v.id: c[v.id] - v.eps for v in g.vertices}
    status = decide_status(g, a, c)
    vals = list(c.values())
    rep = DiscrepancyReport(
        a=a,
        log_disc=c,
        status=status,
        pld=min_nonzero(vals),
        min_log_disc=min(vals) if vals else None,
    )
    if with_good_lc and status.is_lc:
        rep = DiscrepancyReport(rep.a, rep.log_disc, rep.status, rep.pld,
                                rep.min_log_disc, good_lc(g, rep))
    return rep


def good_lc(g: FoliatedDualGraph, report: DiscrepancyReport) -> bool:
    from .classifier import TypeTag, classify

    if not report.status.is_lc:
        return False
    tag = classify(g).type_tag
    if tag in (TypeTag.T1_GChain, TypeTag.T2_BadTailTriple, TypeTag.T3_Minus2Chain,
               TypeTag.T4_Dihedral, TypeTag.T5_EGL):
        return True
    if tag not in (TypeTag.T6_ChainOneTransverse, TypeTag.T7_StarTransverseCenter):
        return False
    for v in g.vertices:
        if v.invariant:
            if v.z != 1 or v.genus != 0:
                return False
        else:
            bound = max(2 * v.genus - 1 + degree(g, v.id), 2 - 2 * v.genus)
            if v.weight < bound:
                return False
    return True


def variety_gap(g: FoliatedDualGraph) -> GapVector:
    """Coefficients b_i with K_G - K_Y numerically equal to sum b_i E_i."""
    d = [kfol_degree(v) - kvar_degree(v) for v in g.vertices]
    b = solve(_checked_matrix(g), d)
    return GapVector(dict(zip(g.ids, b)))


@dataclass(frozen=True)
class StrictTransform:
    """A boundary strict transform as seen by the log-resolution formula."""
    id: str
    coeff: Fraction
    invariant: bool = False
    through_singularity: bool = False
    meets: tuple = ()

    @classmethod
    def of(cls, b: BoundaryComponent, through_singularity: bool = False):
        return cls(b.id, b.coeff, b.invariant, through_singularity, b.meets)


def mld_from_log_resolution(g: FoliatedDualGraph, strict_transforms: Sequence = None):
    """mld on a log resolution whose non-invariant curves are pairwise disjoint.

    Terms: 1 + a_i for exceptional curves in I, a_i for the others, 1 - coeff
    for strict transforms in I, -coeff for the others, and the constant 1.
    I collects the non-invariant curves meeting only smooth foliation points.
    """
    if strict_transforms is None:
        strict_transforms = [StrictTransform.of(b) for b in g.boundary]
    sts = [s if isinstance(s, StrictTransform) else StrictTransform.of(s) for s in strict_transforms]
    transverse = {v.id for v in g.vertices if not v.invariant}
    for e in g.edges:
        if e.u in transverse and e.v in transverse:
            raise HypothesisError(f"non-invariant curves {e.u} and {e.v} intersect")
    for s in sts:
        if not s.invariant:
            for cid, t in s.meets:
                if t > 0 and cid in transverse:
                    raise HypothesisError(f"non-invariant {s.id} meets non-invariant {cid}")
    a = discrepancies(g, with_good_lc=False).a
    terms = [Fraction(1)]
    for v in g.vertices:
        in_i = (not v.invariant) and all(not e.sing for e in g.incident(v.id))
        terms.append(1 + a[v.id] if in_i else a[v.id])
    for s in sts:
        in_i = (not s.invariant) and not s.through_singularity
        terms.append(1 - s.coeff if in_i else -s.coeff)
    if any(t < 0 for t in terms):
        return NEG_INF
    return min(terms)
