"""Polynomial vector fields at the origin of the plane.

A germ v = P d/dx + Q d/dy has rational polynomial coefficients. The dual
1-form is omega = Q dx - P dy. Local invariants (eigenvalue ratio, tangency
order, Z and CS indices) are computed exactly; the series-based ones use
truncation orders that double until the answer stops changing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import sympy
from sympy import Poly, QQ, Rational

from .errors import DomainError, InfiniteTangencyError, NonStabilizingSeriesError
from .linalg import rank_exact

X, Y = sympy.symbols("x y")
START_ORDER = 16
MAX_ORDER = 1024


def _poly(expr) -> Poly:
    if isinstance(expr, Poly):
        return Poly(expr.as_expr(), X, Y, domain=QQ)
    if isinstance(expr, dict):
        return Poly.from_dict({k: Rational(v.numerator, v.denominator) if isinstance(v, Fraction)
                               else v for k, v in expr.items()} or {(0, 0): 0}, X, Y, domain=QQ)
    if isinstance(expr, str):
        expr = sympy.sympify(expr.replace("^", "**"), locals={"x": X, "y": Y})
    return Poly(expr, X, Y, domain=QQ)


def _coeffs(p: Poly) -> dict:
    """{(i, j): Fraction} view of a polynomial."""
    out = {}
    for (i, j), c in p.terms():
        if c != 0:
            out[(i, j)] = Fraction(int(c.p), int(c.q))
    return out


def _order(p: Poly) -> int | None:
    """Lowest total degree of a monomial, None for the zero polynomial."""
    t = _coeffs(p)
    return min((i + j for i, j in t), default=None)


def _homogeneous(p: Poly, k: int) -> Poly:
    return _poly({m: c for m, c in _coeffs(p).items() if sum(m) == k})


@dataclass(frozen=True)
class VectorFieldGerm:
    P: Poly
    Q: Poly

    def __post_init__(self):
        object.__setattr__(self, "P", _poly(self.P))
        object.__setattr__(self, "Q", _poly(self.Q))

    @classmethod
    def from_strings(cls, p: str, q: str) -> "VectorFieldGerm":
        return cls(_poly(p), _poly(q))

    @classmethod
    def from_one_form(cls, a, b) -> "VectorFieldGerm":
        """The field killed by a dx + b dy, namely -b d/dx + a d/dy."""
        return cls(-_poly(b), _poly(a))

    @property
    def singular(self) -> bool:
        return self.P.eval({X: 0, Y: 0}) == 0 and self.Q.eval({X: 0, Y: 0}) == 0

    def apply(self, f) -> Poly:
        """v(f) = P f_x + Q f_y."""
        f = _poly(f)
        return self.P * f.diff(X) + self.Q * f.diff(Y)

    def multiplicity(self) -> int:
        ords = [o for o in (_order(self.P), _order(self.Q)) if o is not None]
        return min(ords) if ords else 0

    def shifted(self, x0=0, y0=0) -> "VectorFieldGerm":
        """Move the point (x0, y0) to the origin."""
        sub = {X: X + x0, Y: Y + y0}
        return VectorFieldGerm(_poly(self.P.as_expr().subs(sub, simultaneous=True)),
                               _poly(self.Q.as_expr().subs(sub, simultaneous=True)))

    def __str__(self):
        return f"P = {self.P.as_expr()}\nQ = {self.Q.as_expr()}"


def _require_singular(v: VectorFieldGerm):
    if not v.singular:
        raise DomainError("the vector field does not vanish at the origin")


# --- eigenvalues --------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticTag:
    """Eigenvalues roots of t^2 - trace t + det with non-square discriminant."""
    trace: Fraction
    det: Fraction

    @property
    def discriminant(self) -> Fraction:
        return self.trace ** 2 - 4 * self.det


@dataclass(frozen=True)
class EigenData:
    kind: str                 # "NonDegenerate", "SaddleNode" or "NilpotentOrZero"
    reduced: bool
    lam: object = None        # Fraction (|lam| <= 1 representative) or QuadraticTag
    eigenvalues: tuple = ()


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = sympy.integer_nthroot(q.numerator, 2), sympy.integer_nthroot(q.denominator, 2)
    if n[1] and d[1]:
        return Fraction(int(n[0]), int(d[0]))
    return None


def jacobian(v: VectorFieldGerm) -> tuple:
    p, q = _coeffs(v.P), _coeffs(v.Q)
    return ((p.get((1, 0), Fraction(0)), p.get((0, 1), Fraction(0))),
            (q.get((1, 0), Fraction(0)), q.get((0, 1), Fraction(0))))


def eigen(v: VectorFieldGerm) -> EigenData:
    _require_singular(v)
    (a, b), (c, d) = jacobian(v)
    tr, det = a + d, a * d - b * c
    if det == 0:
        if tr == 0:
            return EigenData("NilpotentOrZero", False, None, (Fraction(0), Fraction(0)))
        return EigenData("SaddleNode", True, Fraction(0), (tr, Fraction(0)))
    root = _rational_sqrt(tr * tr - 4 * det)
    if root is None:
        return EigenData("NonDegenerate", True, QuadraticTag(tr, det))
    l1, l2 = (tr + root) / 2, (tr - root) / 2
    lam = l1 / l2
    if abs(lam) > 1:
        lam = 1 / lam
    return EigenData("NonDegenerate", not lam > 0, lam, (l1, l2))


def is_reduced(v: VectorFieldGerm) -> bool:
    return eigen(v).reduced


# --- invariance and tangency ------------------------------------------------------

def _divides(f: Poly, g: Poly) -> bool:
    if g.is_zero:
        return True
    _, r = g.div(f)
    return r.is_zero


def is_invariant(v: VectorFieldGerm, f) -> bool:
    """f divides v(f) in Q[x, y]."""
    f = _poly(f)
    _check_curve(f)
    return _divides(f, v.apply(f))


def _check_curve(f: Poly):
    if f.is_zero:
        raise DomainError("the curve equation is zero")
    if f.eval({X: 0, Y: 0}) != 0:
        raise DomainError("the curve does not pass through the origin")


def _mul_trunc(a: dict, b: dict, n: int) -> dict:
    out: dict = {}
    for (i, j), c in a.items():
        for (k, l), e in b.items():
            if i + j + k + l < n:
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + c * e
    return {k: c for k, c in out.items() if c}


def local_quotient_dim(gens: Iterable[Poly], n: int) -> int:
    """dim Q[x,y] / (I + m^n): monomials below degree n minus the rank of I there."""
    cols = {}
    for d in range(n):
        for i in range(d + 1):
            cols[(i, d - i)] = len(cols)
    rows = []
    gs = [_coeffs(g) for g in gens]
    for g in gs:
        for (mi, mj) in cols:
            prod = _mul_trunc({(mi, mj): 1}, g, n)
            if prod:
                rows.append({cols[m]: c for m, c in prod.items()})
    return len(cols) - rank_exact(rows, len(cols))


def _has_common_component_at_origin(f: Poly, g: Poly) -> bool:
    h = sympy.gcd(f, g)
    if h.total_degree() == 0:
        return False
    for fac, _ in sympy.factor_list(h.as_expr(), X, Y)[1]:
        if _poly(fac).eval({X: 0, Y: 0}) == 0:
            return True
    return False


def intersection_multiplicity(f, g, max_n: int = 128) -> int:
    """dim of O_0 / (f, g) by the staircase in Q[x,y]/m^n.

    d(n) = dim Q[x,y]/(I + m^n) is non-decreasing. When d(n) = d(n+1) we
    have m^n inside I + m^(n+1), so m^n lies in I locally by Nakayama and
    d(n) is the local dimension. n doubles between checks.
    """
    f, g = _poly(f), _poly(g)
    if _has_common_component_at_origin(f, g) or f.is_zero or g.is_zero:
        raise InfiniteTangencyError("the curves share a component through the origin")
    n = 1
    while n <= max_n:
        d = local_quotient_dim((f, g), n)
        if d == local_quotient_dim((f, g), n + 1):
            return d
        n *= 2
    raise NonStabilizingSeriesError("staircase did not stabilize", n)


def tang(v: VectorFieldGerm, f) -> int:
    """Tangency order dim O_0 / <f, v(f)> of a non-invariant curve."""
    f = _poly(f)
    _check_curve(f)
    vf = v.apply(f)
    if _divides(f, vf):
        raise InfiniteTangencyError("the curve is invariant, tangency is infinite")
    return intersection_multiplicity(f, vf)


# --- series along a smooth curve --------------------------------------------------

def _series_eval(p: dict, xs: list, ys: list, n: int) -> list:
    """p(x(t), y(t)) mod t^n for series given as coefficient lists."""
    def smul(a, b):
        out = [Fraction(0)] * n
        for i, ai in enumerate(a):
            if ai:
                for j in range(n - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return out

    pows_x = {0: [Fraction(1)] + [Fraction(0)] * (n - 1)}
    pows_y = {0: [Fraction(1)] + [Fraction(0)] * (n - 1)}

    def pw(cache, base, k):
        if k not in cache:
            cache[k] = smul(pw(cache, base, k - 1), base)
        return cache[k]

    out = [Fraction(0)] * n
    for (i, j), c in p.items():
        term = smul(pw(pows_x, xs, i), pw(pows_y, ys, j))
        for k in range(n):
            out[k] += c * term[k]
    return out


def _series_inv(a: list, n: int) -> list:
    if not a[0]:
        raise ZeroDivisionError("series is not a unit")
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        s = sum((a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -s / a[0]
    return out


def _smooth_param(f: Poly, n: int):
    """(x(t), y(t), axis) parametrizing a smooth curve to order n.

    axis is "x" when x = t (f_y(0) != 0) and "y" when y = t.
    """
    fc = _coeffs(f)
    fx, fy = fc.get((1, 0), 0), fc.get((0, 1), 0)
    if not fx and not fy:
        raise DomainError("the curve is singular at the origin")
    t = [Fraction(0), Fraction(1)] + [Fraction(0)] * (n - 2)
    phi = [Fraction(0)] * n
    # fixed point phi <- phi - f(t, phi) / c gains one order per step
    if fy:
        axis, c = "x", Fraction(fy)
    else:
        axis, c = "y", Fraction(fx)
    for _ in range(n):
        val = _series_eval(fc, t, phi, n) if axis == "x" else _series_eval(fc, phi, t, n)
        if not any(val):
            break
        phi = [p - v / c for p, v in zip(phi, val)]
    return (t, phi, axis) if axis == "x" else (phi, t, axis)


def _ord(s: list):
    return next((k for k, c in enumerate(s) if c), None)


def param_tang(v: VectorFieldGerm, f) -> int | None:
    """Order of v(f) along a parametrization of f; None if f is singular."""
    f = _poly(f)
    fc = _coeffs(f)
    if not fc.get((1, 0)) and not fc.get((0, 1)):
        return None
    g = _coeffs(v.apply(f))
    n = START_ORDER
    while n <= MAX_ORDER:
        xs, ys, _ = _smooth_param(f, n)
        o = _ord(_series_eval(g, xs, ys, n))
        if o is not None:
            return o
        n *= 2
    raise InfiniteTangencyError("v(f) vanishes along the curve to every computed order")


def _index_series(v: VectorFieldGerm, f: Poly, n: int):
    """(restricted field h(t), k(t)) along the curve, with k = v(f)/f."""
    xs, ys, axis = _smooth_param(f, n)
    kpoly, r = v.apply(f).div(f)
    if not r.is_zero:
        raise DomainError("the curve is not invariant")
    comp = v.P if axis == "x" else v.Q
    h = _series_eval(_coeffs(comp), xs, ys, n)
    k = _series_eval(_coeffs(kpoly), xs, ys, n)
    return h, k


def _stable(compute):
    n, last = START_ORDER, None
    while n <= MAX_ORDER:
        val = compute(n)
        if val is not None and val == last:
            return val
        last = val
        n *= 2
    raise NonStabilizingSeriesError("series value did not stabilize", n // 2)


def _prepare_index(v: VectorFieldGerm, f):
    f = _poly(f)
    _check_curve(f)
    fc = _coeffs(f)
    if not fc.get((1, 0)) and not fc.get((0, 1)):
        raise DomainError("the curve is singular at the origin")
    if not is_invariant(v, f):
        raise DomainError("the curve is not invariant")
    return f


def z_index(v: VectorFieldGerm, f) -> int:
    """Vanishing order at 0 of v restricted to the invariant curve f = 0."""
    f = _prepare_index(v, f)
    return _stable(lambda n: _ord(_index_series(v, f, n)[0]))


def cs_index(v: VectorFieldGerm, f) -> Fraction:
    """Camacho-Sad index: residue of k(t)/h(t) dt along the curve.

    With g = f_y (or f_x) the decomposition g*omega = h df + f*eta has
    h = -P (or Q) and eta proportional to k = v(f)/f.
    """
    f = _prepare_index(v, f)

    def at(n):
        h, k = _index_series(v, f, n)
        z = _ord(h)
        if z is None or z >= n:
            return None
        unit = _series_inv(h[z:], n - z)
        quot = [sum((k[i] * unit[j - i] for i in range(j + 1)), Fraction(0)) for j in range(n - z)]
        return quot[z - 1] if z >= 1 else Fraction(0)

    return _stable(at)


# --- blowups ----------------------------------------------------------------------

def dicritical(v: VectorFieldGerm) -> bool:
    _require_singular(v)
    k = v.multiplicity()
    pk, qk = _homogeneous(v.P, k), _homogeneous(v.Q, k)
    return (_poly(X) * qk - _poly(Y) * pk).is_zero


@dataclass(frozen=True)
class SingularPoint:
    coordinate: object        # Fraction for rational points, else None
    minimal_polynomial: str = ""

    @property
    def rational(self) -> bool:
        return self.coordinate is not None


@dataclass(frozen=True)
class Chart:
    name: str                 # "x, y/x" or "x/y, y"
    germ: VectorFieldGerm     # in coordinates (x, y) of the chart; E is an axis
    points: tuple             # singular points on E in this chart


@dataclass(frozen=True)
class BlowupResult:
    e_invariant: bool
    charts: tuple


def _saturate(p: Poly, q: Poly, var) -> tuple:
    """Divide both components by the largest common power of ``var``."""
    idx = 0 if var == X else 1
    terms = list(_coeffs(p)) + list(_coeffs(q))
    k = min((m[idx] for m in terms), default=0)
    if k == 0:
        return p, q
    shift = (k, 0) if idx == 0 else (0, k)
    down = lambda poly: _poly({(i - shift[0], j - shift[1]): c for (i, j), c in _coeffs(poly).items()})
    return down(p), down(q)


def _roots_on_axis(p: Poly, q: Poly) -> list:
    """Common zeros on E = {x = 0}, by factoring a gcd over Q."""
    exprs = [e for e in (p.as_expr().subs(X, 0), q.as_expr().subs(X, 0)) if e != 0]
    if not exprs:
        return []
    h = exprs[0] if len(exprs) == 1 else sympy.gcd(exprs[0], exprs[1])
    if not h.free_symbols:
        return []
    out = []
    for fac, _ in sympy.Poly(h, Y, domain=QQ).factor_list()[1]:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            r = -b / a
            out.append(SingularPoint(Fraction(int(r.p), int(r.q))))
        else:
            out.append(SingularPoint(None, str(fac.as_expr())))
    return out


def blowup_germ(v: VectorFieldGerm) -> BlowupResult:
    """Blow up the origin and saturate in both standard charts.

    In the chart (x, u = y/x) the field becomes x' = P(x, xu),
    u' = (Q(x, xu) - u P(x, xu)) / x, and E is {x = 0}. The second chart
    (v = x/y, y) only contributes its origin, the one point of E the first
    chart misses.
    """
    _require_singular(v)
    e_inv = not dicritical(v)
    p, q = v.P.as_expr(), v.Q.as_expr()
    # chart 1: (x, u) with y = x u
    p1 = _poly(sympy.expand(p.subs(Y, X * Y)))
    q1 = _poly(sympy.cancel((sympy.expand(q.subs(Y, X * Y)) - Y * sympy.expand(p.subs(Y, X * Y))) / X))
    p1, q1 = _saturate(p1, q1, X)
    g1 = VectorFieldGerm(p1, q1)
    pts1 = _roots_on_axis(p1, q1)
    # chart 2: (v, y) with x = v y; the first coordinate is the ratio
    p2 = _poly(sympy.cancel((sympy.expand(p.subs(X, X * Y)) - X * sympy.expand(q.subs(X, X * Y))) / Y))
    q2 = _poly(sympy.expand(q.subs(X, X * Y)))
    p2, q2 = _saturate(p2, q2, Y)
    g2 = VectorFieldGerm(p2, q2)
    pts2 = (SingularPoint(Fraction(0)),) if g2.singular else ()
    return BlowupResult(e_inv, (Chart("x, y/x", g1, tuple(pts1)),
                                Chart("x/y, y", g2, pts2)))


def _point_germ(chart: Chart, pt: SingularPoint) -> VectorFieldGerm:
    if chart.name == "x, y/x":
        return chart.germ.shifted(0, Rational(pt.coordinate.numerator, pt.coordinate.denominator))
    return chart.germ


# --- Seidenberg reduction -----------------------------------------------------------

@dataclass
class ReductionNode:
    germ: VectorFieldGerm
    eigen: EigenData | None   # None for a point that could not be followed
    depth: int
    children: list = field(default_factory=list)
    note: str = ""            # "irrational point <minpoly>", "depth exhausted"
    blown_up: bool = False

    @property
    def leaves(self) -> list:
        """Singular points left at the end (blown-up nodes are not leaves)."""
        if not self.blown_up:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves]


@dataclass
class ReductionTree:
    root: ReductionNode
    success: bool

    @property
    def depth(self) -> int:
        def deepest(n):
            return max([n.depth] + [deepest(c) for c in n.children])
        return deepest(self.root)


def seidenberg_reduce(v: VectorFieldGerm, max_depth: int = 20) -> ReductionTree:
    """Blow up non-reduced rational singular points until all are reduced."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    ok = [True]

    def grow(g: VectorFieldGerm, depth: int) -> ReductionNode:
        e = eigen(g)
        node = ReductionNode(g, e, depth)
        if e.reduced:
            return node
        if depth >= max_depth:
            node.note = "depth exhausted"
            ok[0] = False
            return node
        res = blowup_germ(g)
        node.blown_up = True
        for ch in res.charts:
            for pt in ch.points:
                if not pt.rational:
                    ok[0] = False
                    node.children.append(ReductionNode(ch.germ, None, depth + 1,
                                                       note=f"irrational point {pt.minimal_polynomial}"))
                    continue
                node.children.append(grow(_point_germ(ch, pt), depth + 1))
        return node

    root = grow(v, 0)
    return ReductionTree(root, ok[0] and all(leaf.eigen is not None and leaf.eigen.reduced
                                             for leaf in root.leaves))
