"""Exact linear algebra for small intersection matrices.

Matrices are plain lists of integer rows. Rows are stored sparsely during
elimination, which keeps long chains (tridiagonal matrices) fast while still
handling dense input correctly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

from .errors import SingularMatrixError
from .graph import FoliatedDualGraph, has_simple_edges, is_tree


def intersection_matrix(g: FoliatedDualGraph) -> list:
    ids = g.ids
    pos = {v: i for i, v in enumerate(ids)}
    a = [[0] * len(ids) for _ in ids]
    for i, v in enumerate(g.vertices):
        a[i][i] = v.self_int
    for e in g.edges:
        if e.u == e.v or e.u not in pos or e.v not in pos:
            continue
        i, j = pos[e.u], pos[e.v]
        a[i][j] += e.mult
        a[j][i] += e.mult
    return a


def _sparse(a) -> list:
    return [{j: x for j, x in enumerate(row) if x} for row in a]


def _bareiss(rows: list, n: int, pivoting: bool = True):
    """In-place fraction-free elimination on sparse rows over columns 0..n-1.

    Rows untouched by a step would only be rescaled by p_k / p_(k-1); those
    factors telescope, so each row remembers the last step it saw and is
    brought up to date when it is next needed. Returns (pivots, sign), or
    (pivots, None) when a zero pivot stops the elimination.
    """
    level = [-1] * len(rows)
    piv_at = {-1: 1}
    sign = 1
    pivots = []

    def catch_up(i, k):
        lv = level[i]
        if lv != k - 1:
            num, den = piv_at[k - 1], piv_at[lv]
            rows[i] = {j: x * num // den for j, x in rows[i].items()}
            level[i] = k - 1

    for k in range(n):
        if pivoting:
            p = next((i for i in range(k, n) if rows[i].get(k)), None)
        else:
            p = k if rows[k].get(k) else None
        if p is None:
            return pivots, None
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            level[k], level[p] = level[p], level[k]
            sign = -sign
        catch_up(k, k)
        rk = rows[k]
        akk = rk[k]
        prev = piv_at[k - 1]
        tail = [(j, x) for j, x in rk.items() if j > k]
        for i in range(k + 1, n):
            if not rows[i].get(k):
                continue
            catch_up(i, k)
            ri = rows[i]
            aik = ri.pop(k)
            new = {j: akk * x for j, x in ri.items()}
            for j, x in tail:
                new[j] = new.get(j, 0) - aik * x
            rows[i] = {j: x // prev for j, x in new.items() if x}
            level[i] = k
        piv_at[k] = akk
        pivots.append(akk)
    return pivots, sign


def det_exact(a) -> int:
    """Determinant by fraction-free Bareiss elimination; det of 0x0 is 1."""
    n = len(a)
    if n == 0:
        return 1
    pivots, sign = _bareiss(_sparse(a), n)
    return 0 if sign is None else sign * pivots[-1]


def leading_minors(a) -> list:
    """Leading principal minors det(A[:k,:k]) for k = 1..n (Bareiss pivots)."""
    n = len(a)
    out, sign = _bareiss(_sparse(a), n, pivoting=False)
    if sign is None:
        # a vanishing minor stops the pivots; finish directly
        k = len(out)
        out.append(0)
        out.extend(det_exact([r[: m + 1] for r in a[: m + 1]]) for m in range(k + 1, n))
    return out


def is_symmetric(a) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(i))


def is_negative_definite(a) -> bool:
    """Sylvester's criterion: (-1)^k det(A_k) > 0 for every leading minor."""
    if not is_symmetric(a):
        raise ValueError("matrix is not symmetric")
    for k, m in enumerate(leading_minors(a), start=1):
        if m == 0 or (m > 0) != (k % 2 == 0):
            return False
    return True


def minor(a, i: int, j: int) -> list:
    return [row[:j] + row[j + 1:] for r, row in enumerate(a) if r != i]


def cofactor(a, i: int, j: int) -> int:
    n = len(a)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"cofactor index ({i}, {j}) out of range for {n}x{n}")
    return (-1) ** (i + j) * det_exact(minor(a, i, j))


def _augment(a, rhs_columns):
    n = len(a)
    cols = [list(c) for c in rhs_columns]
    for c in cols:
        if len(c) != n:
            raise ValueError("right-hand side length does not match the matrix")
    cols = [[x if isinstance(x, (int, Fraction)) else Fraction(x) for x in c] for c in cols]
    denom = 1
    for c in cols:
        for x in c:
            if isinstance(x, Fraction) and x.denominator != 1:
                denom = lcm(denom, x.denominator)
    bint = [[x * denom if isinstance(x, int) else x.numerator * (denom // x.denominator) for x in c]
            for c in cols]
    rows = []
    for i in range(n):
        r = {j: x for j, x in enumerate(a[i]) if x}
        for c, col in enumerate(bint):
            if col[i]:
                r[n + c] = col[i]
        rows.append(r)
    return rows, bint, denom


def _back_substitute(a, rows, det, bint, denom) -> list:
    scale, bigs = _back_substitute_scaled(a, rows, det, bint, denom)
    return [[Fraction(v, scale) for v in big] for big in bigs]


def _back_substitute_scaled(a, rows, det, bint, denom):
    """det * x by exact integer back-substitution, checked against A.

    Returns (scale, integer vectors) with x = vector / scale.
    """
    n = len(a)
    xs = []
    for c in range(len(bint)):
        big = [0] * n
        for k in range(n - 1, -1, -1):
            rk = rows[k]
            s = det * rk.get(n + c, 0)
            for j, x in rk.items():
                if k < j < n:
                    s -= x * big[j]
            q, r = divmod(s, rk[k])
            if r:
                raise ArithmeticError("fraction-free back-substitution was not exact")
            big[k] = q
        for i in range(n):
            if sum(aij * big[j] for j, aij in enumerate(a[i]) if aij) != det * bint[c][i]:
                raise ArithmeticError("back-substitution check failed")
        xs.append(big)
    return det * denom, xs


def solve_many(a, rhs_columns) -> list:
    """Solve A X = B for several right-hand sides at once.

    Works fraction-free: the right-hand sides are scaled to integers, Bareiss
    elimination runs on the augmented integer matrix, and back-substitution
    produces det * x exactly (Cramer's rule guarantees integrality). Every
    solution is multiplied back against A before it is returned.
    """
    n = len(a)
    if n == 0:
        return [[] for _ in rhs_columns]
    rows, bint, denom = _augment(a, rhs_columns)
    pivots, sign = _bareiss(rows, n)
    if sign is None:
        raise SingularMatrixError("matrix is singular")
    # +-det(A); row k of the echelon form is at level k-1
    return _back_substitute(a, rows, pivots[-1], bint, denom)


def solve_many_scaled(a, rhs_columns):
    """``solve_many`` without the final division: (scale, integer vectors)."""
    n = len(a)
    if n == 0:
        return 1, [[] for _ in rhs_columns]
    rows, bint, denom = _augment(a, rhs_columns)
    pivots, sign = _bareiss(rows, n)
    if sign is None:
        raise SingularMatrixError("matrix is singular")
    return _back_substitute_scaled(a, rows, pivots[-1], bint, denom)


def solve_negative_definite(a, rhs_columns):
    """Like ``solve_many`` but returns None unless A is negative definite.

    Elimination runs without row swaps, so the pivots are the leading minors
    and Sylvester's criterion comes for free.
    """
    if not is_symmetric(a):
        raise ValueError("matrix is not symmetric")
    n = len(a)
    if n == 0:
        return [[] for _ in rhs_columns]
    rows, bint, denom = _augment(a, rhs_columns)
    pivots, sign = _bareiss(rows, n, pivoting=False)
    if sign is None:
        return None
    for k, m in enumerate(pivots, start=1):
        if (m > 0) != (k % 2 == 0):
            return None
    return _back_substitute(a, rows, pivots[-1], bint, denom)


def solve(a, d) -> list:
    """Exact rational solution of A x = d."""
    return solve_many(a, [d])[0]


def mat_vec(a, x) -> list:
    return [sum((aij * xj for aij, xj in zip(row, x) if aij), Fraction(0)) for row in a]


def rank_exact(rows, ncols: int) -> int:
    """Rank of a rational matrix given as a list of sparse dict rows."""
    pivots: dict = {}
    rank = 0
    for r in rows:
        r = {j: Fraction(x) for j, x in r.items() if x}
        while r:
            lead = min(r)
            if lead not in pivots:
                inv = 1 / r[lead]
                pivots[lead] = {j: x * inv for j, x in r.items()}
                rank += 1
                break
            p = pivots[lead]
            f = r[lead]
            for j, x in p.items():
                y = r.get(j, 0) - f * x
                if y:
                    r[j] = y
                else:
                    r.pop(j, None)
    return rank


# --- tree recursions --------------------------------------------------------

def _require_simple_tree(g: FoliatedDualGraph):
    if not is_tree(g) or not has_simple_edges(g):
        raise ValueError("recursion needs a tree with simple edges")


def _delta_forest(g: FoliatedDualGraph, nodes: frozenset, pivot=None) -> int:
    """det(-A) of the induced subgraph on ``nodes`` by the vertex recursion."""
    adj = {v: [w for w in g.neighbors(v) if w in nodes] for v in nodes}

    @lru_cache(maxsize=None)
    def rec(sub: frozenset, first=None) -> int:
        if not sub:
            return 1
        # split into connected components
        start = first if first is not None else min(sub)
        comp = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for w in adj[u]:
                if w in sub and w not in comp:
                    comp.add(w)
                    todo.append(w)
        comp = frozenset(comp)
        if comp != sub:
            return rec(comp, first) * rec(sub - comp)
        if first is not None:
            c = first
        else:  # a leaf of the component keeps the recursion linear
            c = min((v for v in sub if sum(1 for w in adj[v] if w in sub) <= 1), default=start)
        rest = sub - {c}
        total = g.vertex(c).weight * rec(rest)
        for w in adj[c]:
            if w in sub:
                total -= rec(rest - {w})
        return total

    return rec(frozenset(nodes), pivot)


def delta_recursive(g: FoliatedDualGraph, pivot: str) -> int:
    """Delta(G) = w(C) Delta(G - C) - sum_i Delta(G - {C, C_i}).

    The recursion returns det(-A), which is |det A| whenever A is negative
    definite (the only case where the absolute-value form is an identity).
    """
    _require_simple_tree(g)
    g.vertex(pivot)
    return _delta_forest(g, frozenset(g.ids), pivot)


def tree_path(g: FoliatedDualGraph, a: str, b: str) -> list:
    prev = {a: None}
    todo = [a]
    while todo:
        u = todo.pop()
        for w in g.neighbors(u):
            if w not in prev:
                prev[w] = u
                todo.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def path_cofactor(g: FoliatedDualGraph, i: str, j: str) -> int:
    """(-1)^(n+1) Delta(G minus the path from C_i to C_j) on a simple tree."""
    _require_simple_tree(g)
    rest = frozenset(g.ids) - set(tree_path(g, i, j))
    return (-1) ** (len(g) + 1) * _delta_forest(g, rest)
