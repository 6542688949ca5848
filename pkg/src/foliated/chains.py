"""The five-parameter chain family L_l1..L_1, M_1..M_n, R_1..R_l2.

Left and right ends are Hirzebruch-Jung strings with determinants m1, m2
and sub-determinants q1, q2; the n middle curves have weight 2. The far end
L_l1 carries K.L_l1 = -1 (Z = 1); every other curve has Z = 2, so the whole
chain is an F-chain read from L_l1. Closed forms for a(L_1), a(R_1), the
determinant, and the n -> infinity limit of the pld are evaluated here and
compared against the generic solver.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd

from .discrepancy import discrepancies
from .graph import BoundaryComponent, FoliatedDualGraph, chain_graph, inv
from .linalg import det_exact, intersection_matrix
from .rational import fmt, min_nonzero


def s_n(m2: int, q2: int, n: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    return n * (m2 - q2) + m2


def s_n_recursive(m2: int, q2: int, n: int) -> int:
    """S_n = 2 S_(n-1) - S_(n-2) with S_0 = m2 and S_1 = 2 m2 - q2."""
    prev, cur = m2, 2 * m2 - q2
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * cur - prev
    return cur


def hj_weights(m: int, q: int) -> list:
    """Weights w_1, w_2, ... with m/q = w_1 - 1/(w_2 - 1/(...))."""
    if not (m > q >= 1) or gcd(m, q) != 1:
        raise ValueError(f"need coprime m > q >= 1, got m={m}, q={q}")
    out = []
    while q:
        w = -(-m // q)
        out.append(w)
        m, q = q, w * q - m
    return out


def chain_det(weights) -> int:
    """det(-A) of a chain with the given weights (continuant)."""
    prev, cur = 0, 1
    for w in weights:
        prev, cur = cur, w * cur - prev
    return cur


def tail_dets(weights) -> list:
    """g_j = det of the chain with weights[j:], for j = 0..len; g_len = 1."""
    return [chain_det(weights[j:]) for j in range(len(weights) + 1)]


@dataclass(frozen=True)
class FamilyBoundary:
    """A boundary component; ``left[j-1]`` is B.L_j and ``right[j-1]`` is B.R_j."""
    coeff: Fraction
    left: tuple = ()
    right: tuple = ()


@dataclass(frozen=True)
class FamilyInvariants:
    m1: int
    q1: int
    m2: int
    q2: int
    alphaL: Fraction = Fraction(1)
    alphaR: Fraction = Fraction(0)
    cL: tuple = ()
    cR: tuple = ()
    gL: tuple = ()
    gR: tuple = ()

    def __post_init__(self):
        if not (self.m1 > self.q1 >= 1 and self.m2 > self.q2 >= 1):
            raise ValueError("need m1 > q1 >= 1 and m2 > q2 >= 1")
        object.__setattr__(self, "alphaL", Fraction(self.alphaL))
        object.__setattr__(self, "alphaR", Fraction(self.alphaR))


@dataclass(frozen=True)
class ChainFamily:
    left: tuple   # weights of L_1..L_l1 (L_1 next to the middle)
    right: tuple  # weights of R_1..R_l2
    n: int
    boundary: tuple = field(default=())

    @classmethod
    def from_mq(cls, m1, q1, m2, q2, n, boundary=()):
        return cls(tuple(hj_weights(m1, q1)), tuple(hj_weights(m2, q2)), n, tuple(boundary))

    def with_n(self, n: int) -> "ChainFamily":
        return ChainFamily(self.left, self.right, n, self.boundary)

    @property
    def length(self) -> int:
        return len(self.left) + self.n + len(self.right)

    def ids(self) -> list:
        l1, l2 = len(self.left), len(self.right)
        return ([f"L{j}" for j in range(l1, 0, -1)] + [f"M{k}" for k in range(1, self.n + 1)]
                + [f"R{j}" for j in range(1, l2 + 1)])

    def graph_boundary(self) -> tuple:
        bs = []
        for k, b in enumerate(self.boundary):
            meets = {f"L{j + 1}": t for j, t in enumerate(b.left) if t}
            meets.update({f"R{j + 1}": t for j, t in enumerate(b.right) if t})
            if len(b.left) > len(self.left) or len(b.right) > len(self.right):
                raise ValueError("boundary meets curves outside the chain")
            bs.append(BoundaryComponent(f"B{k + 1}", b.coeff, meets))
        return tuple(bs)

    def graph(self) -> FoliatedDualGraph:
        weights = list(self.left[::-1]) + [2] * self.n + list(self.right)
        ids = self.ids()
        vs = [inv(i, w, 1 if k == 0 else 2) for k, (i, w) in enumerate(zip(ids, weights))]
        return chain_graph(vs, self.graph_boundary())

    def invariants(self) -> FamilyInvariants:
        gL, gR = tail_dets(list(self.left)), tail_dets(list(self.right))
        cL = tuple(sum(t * gL[j + 1] for j, t in enumerate(b.left)) for b in self.boundary)
        cR = tuple(sum(t * gR[j + 1] for j, t in enumerate(b.right)) for b in self.boundary)
        alphaL = 1 - sum((b.coeff * c for b, c in zip(self.boundary, cL)), Fraction(0))
        alphaR = -sum((b.coeff * c for b, c in zip(self.boundary, cR)), Fraction(0))
        return FamilyInvariants(gL[0], gL[1], gR[0], gR[1], alphaL, alphaR,
                                cL, cR, tuple(gL), tuple(gR))


def family_det(inv_: FamilyInvariants, n: int) -> int:
    m1, q1, m2, q2 = inv_.m1, inv_.q1, inv_.m2, inv_.q2
    return n * (m1 - q1) * (m2 - q2) + m2 * (m1 - q1) + q1 * (m2 - q2)


def family_det_right(inv_: FamilyInvariants, n: int) -> int:
    """The same determinant expanded from the right end."""
    m1, q1, m2, q2 = inv_.m1, inv_.q1, inv_.m2, inv_.q2
    return n * (m1 - q1) * (m2 - q2) + m1 * (m2 - q2) + q2 * (m1 - q1)


def a_L1(inv_: FamilyInvariants, n: int) -> Fraction:
    num = inv_.alphaL * s_n(inv_.m2, inv_.q2, n) + inv_.alphaR * inv_.q1
    return num / family_det(inv_, n)


def a_R1(inv_: FamilyInvariants, n: int) -> Fraction:
    num = inv_.alphaR * (n * (inv_.m1 - inv_.q1) + inv_.m1) + inv_.alphaL * inv_.q2
    return num / family_det_right(inv_, n)


def pld_limit(inv_: FamilyInvariants) -> Fraction:
    return min(inv_.alphaL / (inv_.m1 - inv_.q1), inv_.alphaR / (inv_.m2 - inv_.q2))


@dataclass(frozen=True)
class FamilyRow:
    m1: int
    q1: int
    m2: int
    q2: int
    n: int
    alphaL: Fraction
    alphaR: Fraction
    det: int
    a_L1: Fraction
    a_R1: Fraction
    pld: Fraction
    limit: Fraction
    lc: bool = True
    layout: int = -1
    coeffs: tuple = ()


CSV_COLUMNS = ["m1", "q1", "m2", "q2", "n", "alphaL", "alphaR", "det", "a_L1", "a_R1", "pld", "limit"]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def family_rows(m1, q1, m2, q2, alphaL, alphaR, n_lo, n_hi) -> list:
    """Closed-form table for directly supplied alpha values.

    Without boundary data there is no graph to solve, so ``pld`` here is the
    smaller nonzero value of a(L_1) and a(R_1).
    """
    fi = FamilyInvariants(m1, q1, m2, q2, alphaL, alphaR)
    out = []
    for n in range(n_lo, n_hi + 1):
        al, ar = a_L1(fi, n), a_R1(fi, n)
        out.append(FamilyRow(m1, q1, m2, q2, n, fi.alphaL, fi.alphaR, family_det(fi, n),
                             al, ar, min_nonzero([al, ar]), pld_limit(fi)))
    return out


def evaluate(fam: ChainFamily, layout: int = -1, coeffs: tuple = ()) -> FamilyRow:
    """Assemble the graph, solve it, and report the closed forms beside it."""
    g = fam.graph()
    fi = fam.invariants()
    rep = discrepancies(g, with_good_lc=False)
    return FamilyRow(fi.m1, fi.q1, fi.m2, fi.q2, fam.n, fi.alphaL, fi.alphaR,
                     abs(det_exact(intersection_matrix(g))), rep.a["L1"], rep.a["R1"],
                     rep.pld, pld_limit(fi), rep.status.is_lc, layout, coeffs)


# --- ACC scan -----------------------------------------------------------------

@dataclass(frozen=True)
class AccGrid:
    """Parameter grid for the ACC scan.

    ``layouts`` lists boundary shapes: each layout is a list of components,
    each component a pair (left meets, right meets). Every component takes
    every coefficient from ``coefficients``.
    """
    pairs: tuple
    n_range: tuple
    coefficients: tuple
    layouts: tuple = ((),)
    max_run: int | None = None

    @classmethod
    def from_json(cls, text: str) -> "AccGrid":
        raw = json.loads(text)
        if "pairs" in raw:
            pairs = [tuple(p) for p in raw["pairs"]]
        else:
            mq = coprime_pairs(*raw.get("m", [2, 4]))
            pairs = [a + b for a in mq for b in mq]
        layouts = tuple(tuple((tuple(c[0]), tuple(c[1])) for c in lay)
                        for lay in raw.get("layouts", [[]]))
        coeffs = tuple(Fraction(str(c)) for c in raw.get("coefficients", []))
        n = raw.get("n", [1, 20])
        return cls(tuple(pairs), (int(n[0]), int(n[1])), coeffs, layouts, raw.get("max_run"))


def coprime_pairs(m_lo: int, m_hi: int) -> list:
    return [(m, q) for m in range(m_lo, m_hi + 1) for q in range(1, m) if gcd(m, q) == 1]


def standard_grid(coefficients) -> AccGrid:
    """Pairs with m up to 4, a boundary on the far left, near right, or both."""
    mq = coprime_pairs(2, 4)
    layouts = ((),
               (((-1,), ()),),
               (((), (1,)),),
               (((-1,), ()), ((), (1,))))
    return AccGrid(tuple(a + b for a in mq for b in mq), (1, 30),
                   tuple(Fraction(c) for c in coefficients), layouts)


def _place(layout, left_len, right_len, coeffs):
    comps = []
    for (lm, rm), c in zip(layout, coeffs):
        # a meet listed as (k,) hits L_k / R_k; index 1 by default,
        # a negative index counts from the far end
        left = [0] * left_len
        right = [0] * right_len
        for k in lm:
            left[(k - 1) if k > 0 else left_len + k] += 1
        for k in rm:
            right[(k - 1) if k > 0 else right_len + k] += 1
        comps.append(FamilyBoundary(c, tuple(left), tuple(right)))
    return tuple(comps)


def _scan_tuple(args) -> list:
    (m1, q1, m2, q2), grid = args
    lw, rw = hj_weights(m1, q1), hj_weights(m2, q2)
    rows = []
    for li, layout in enumerate(grid.layouts):
        options = [c for c in grid.coefficients if c != 0] or [Fraction(0)]
        for coeffs in product(options, repeat=len(layout)):
            bd = _place(layout, len(lw), len(rw), coeffs)
            fam = ChainFamily(tuple(lw), tuple(rw), 0, bd)
            for n in range(grid.n_range[0], grid.n_range[1] + 1):
                rows.append(evaluate(fam.with_n(n), li, coeffs))
    return rows


def acc_scan(grid: AccGrid, jobs: int = 1) -> list:
    """Evaluate the whole grid; row order is parameter order for any ``jobs``."""
    tasks = [(p, grid) for p in grid.pairs]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_tuple, tasks))
    else:
        parts = [_scan_tuple(t) for t in tasks]
    return [r for part in parts for r in part]


def increasing_runs(rows, only_lc: bool = True) -> dict:
    """Longest strictly increasing pld run (in n) per parameter group."""
    groups: dict = {}
    for r in rows:
        key = (r.m1, r.q1, r.m2, r.q2, r.layout, r.coeffs)
        groups.setdefault(key, []).append(r)
    out = {}
    for key, rs in groups.items():
        rs.sort(key=lambda r: r.n)
        best = run = 1
        for prev, cur in zip(rs, rs[1:]):
            ok = (cur.lc and prev.lc) if only_lc else True
            if ok and cur.pld > prev.pld:
                run += 1
                best = max(best, run)
            else:
                run = 1
        out[key] = best
    return out


def theoretical_max_run(rows_group, coefficients) -> int:
    """2 floor(1/eps) + 2, with eps bounding coefficients and pld from below.

    Past that chain length the pld sits at L_1 or R_1, where the closed forms
    make the smaller of the two values non-increasing in n.
    """
    pos = [c for c in coefficients if c > 0] + [r.pld for r in rows_group if r.lc and r.pld > 0]
    if not pos:
        return 1
    eps = min(pos)
    return 2 * int(1 / eps) + 2
