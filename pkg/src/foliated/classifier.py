"""Membership tests for the seven graph types of log canonical germs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .discrepancy import DiscrepancyReport, Status, kfol_degree
from .errors import InvalidGraphError
from .graph import Chain, Cycle, FoliatedDualGraph, StarShaped, shape, validate


class TypeTag(Enum):
    T1_GChain = 1
    T2_BadTailTriple = 2
    T3_Minus2Chain = 3
    T4_Dihedral = 4
    T5_EGL = 5
    T6_ChainOneTransverse = 6
    T7_StarTransverseCenter = 7
    NotClassified = 0


@dataclass(frozen=True)
class ClassificationResult:
    type_tag: TypeTag
    witness: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.type_tag.name


def _check_ids(g, ids):
    for i in ids:
        g.vertex(i)


def is_hj_string(g: FoliatedDualGraph, ids: Sequence[str]) -> bool:
    ids = list(ids)
    _check_ids(g, ids)
    if len(set(ids)) != len(ids):
        return False
    for i, u in enumerate(ids):
        v = g.vertex(u)
        if v.genus != 0 or v.self_int > -2:
            return False
        for j in range(i + 1, len(ids)):
            want = 1 if j == i + 1 else 0
            if g.mult(u, ids[j]) != want:
                return False
    return True


def is_f_chain(g: FoliatedDualGraph, ids: Sequence[str]) -> bool:
    """HJ string of invariant curves with Z = 1, 2, 2, ... in the given order."""
    ids = list(ids)
    if not ids or not is_hj_string(g, ids):
        return False
    vs = [g.vertex(i) for i in ids]
    if not all(v.invariant for v in vs):
        return False
    return vs[0].z == 1 and all(v.z == 2 for v in vs[1:])


def _minus1_curve_of_weight2(v) -> bool:
    return v.invariant and v.genus == 0 and v.z == 1 and v.self_int == -2


def is_bad_tail(g: FoliatedDualGraph, vid: str) -> bool:
    v = g.vertex(vid)
    if not (v.invariant and v.genus == 0 and v.z == 3 and v.self_int <= -2):
        return False
    good = [w for w in g.neighbors(vid) if _minus1_curve_of_weight2(g.vertex(w))]
    return len(good) >= 2


def _f_chain_either_way(g, order) -> tuple | None:
    if is_f_chain(g, order):
        return tuple(order)
    if is_f_chain(g, order[::-1]):
        return tuple(order[::-1])
    return None


def _branches(g: FoliatedDualGraph, center: str) -> list:
    """Each branch as an ordered path starting next to the center."""
    out = []
    for first in sorted(g.neighbors(center)):
        path = [first]
        prev, cur = center, first
        while True:
            nxt = [w for w in g.neighbors(cur) if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            path.append(cur)
        out.append(tuple(path))
    return out


def _is_t4(g, center) -> dict | None:
    if not is_bad_tail(g, center) or len(g.neighbors(center)) != 3:
        return None
    if any(m != 1 for m in g.neighbors(center).values()):
        return None
    branches = _branches(g, center)
    ends = [b for b in branches if len(b) == 1 and _minus1_curve_of_weight2(g.vertex(b[0]))]
    if len(ends) < 2:
        return None
    rest = [b for b in branches if b not in ends[:2]]
    if len(rest) != 1:
        return None
    tail = rest[0]
    if not is_hj_string(g, tail):
        return None
    for w in tail:
        v = g.vertex(w)
        if not (v.invariant and v.z == 2 and v.self_int == -2):
            return None
    return {"bad_tail": center, "ends": [ends[0][0], ends[1][0]], "chain": list(tail)}


def classify(g: FoliatedDualGraph) -> ClassificationResult:
    bad = validate(g)
    if bad:
        raise InvalidGraphError(bad)
    sh = shape(g)
    vs = g.vertices

    if isinstance(sh, Chain):
        order = list(sh.order)
        fc = _f_chain_either_way(g, order)
        if fc is not None:
            return ClassificationResult(TypeTag.T1_GChain, {"order": list(fc)})
        if len(order) == 3:
            u, m, w = order
            if (_minus1_curve_of_weight2(g.vertex(u)) and _minus1_curve_of_weight2(g.vertex(w))
                    and is_bad_tail(g, m)):
                return ClassificationResult(TypeTag.T2_BadTailTriple, {"bad_tail": m})
        if all(v.invariant and v.genus == 0 and v.z == 2 for v in vs):
            return ClassificationResult(TypeTag.T3_Minus2Chain, {"order": order})
    if isinstance(sh, StarShaped):
        w = _is_t4(g, sh.center)
        if w is not None:
            return ClassificationResult(TypeTag.T4_Dihedral, w)
    if isinstance(sh, Cycle) and all(v.invariant and kfol_degree(v) == 0 for v in vs):
        return ClassificationResult(TypeTag.T5_EGL, {"cycle": list(sh.order)})
    if len(vs) == 1 and vs[0].invariant and vs[0].genus == 1 and vs[0].z == 0:
        return ClassificationResult(TypeTag.T5_EGL, {"nodal": vs[0].id})

    transverse = [v for v in vs if not v.invariant]
    if isinstance(sh, Chain) and len(transverse) == 1 and transverse[0].tang == 0:
        order = list(sh.order)
        k = order.index(transverse[0].id)
        left = order[:k][::-1]   # both flanks start next to the transverse curve
        right = order[k + 1:]
        if all(not f or is_f_chain(g, f) for f in (left, right)):
            return ClassificationResult(TypeTag.T6_ChainOneTransverse,
                                        {"transverse": transverse[0].id,
                                         "flanks": [left, right]})
    if isinstance(sh, StarShaped):
        c = g.vertex(sh.center)
        if not c.invariant and c.tang == 0 and len(transverse) == 1:
            branches = _branches(g, c.id)
            if all(is_f_chain(g, b) and g.mult(c.id, b[0]) == 1 for b in branches):
                return ClassificationResult(TypeTag.T7_StarTransverseCenter,
                                            {"center": c.id, "branches": [list(b) for b in branches]})
    return ClassificationResult(TypeTag.NotClassified, {"shape": type(sh).__name__})


CANONICAL_TYPES = (TypeTag.T1_GChain, TypeTag.T2_BadTailTriple, TypeTag.T3_Minus2Chain,
                   TypeTag.T4_Dihedral, TypeTag.T5_EGL)


def thm_consistency(g: FoliatedDualGraph, report: DiscrepancyReport) -> list:
    """Warnings where the status contradicts what the type predicts."""
    tag = classify(g).type_tag
    out = []
    if tag is TypeTag.NotClassified:
        return ["graph is not one of the seven types"]
    if tag is TypeTag.T1_GChain and report.status is not Status.TERMINAL:
        out.append(f"T1 graph is {report.status.value}, expected Terminal")
    if tag in CANONICAL_TYPES and not report.status.is_canonical:
        out.append(f"{tag.name} graph is {report.status.value}, expected Canonical")
    if not report.status.is_lc:
        out.append(f"{tag.name} graph is NotLC, expected LogCanonical")
    if tag is TypeTag.T5_EGL and any(x != 0 for x in report.a.values()):
        out.append("T5 graph carries nonzero discrepancies")
    return out
