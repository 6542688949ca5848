"""Cross-module oracle suites.

Each suite compares two independent computations of the same quantity and
returns a CheckResult. The command line ``verify`` runs them all; the
acceptance tests run them at full size.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from .blowup import (CORNER, REDUCED, SMOOTH, GermConfig, MarkedPoint, blowup, derive_points,
                     mld, resolve_check)
from .chains import (ChainFamily, FamilyBoundary, a_L1, a_R1, acc_scan, coprime_pairs, evaluate,
                     family_det, hj_weights, increasing_runs, pld_limit, standard_grid,
                     theoretical_max_run)
from .classifier import TypeTag, classify
from .discrepancy import Status, discrepancies, good_lc, rhs_vector, variety_gap
from .errors import DomainError, InfiniteTangencyError
from .graph import (BoundaryComponent, Edge, FoliatedDualGraph, chain_graph, inv, trans)
from .linalg import (cofactor, delta_recursive, det_exact, intersection_matrix,
                     is_negative_definite, path_cofactor, solve, solve_many_scaled)


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        msg = f"{tag} {self.name}: {self.checked} checked in {self.seconds:.1f}s"
        if self.failures:
            msg += f"; first failure: {self.failures[0]}"
        return msg


class _Suite:
    def __init__(self, name):
        self.name = name
        self.count = 0
        self.failures: list = []
        self.t0 = time.perf_counter()

    def check(self, ok: bool, detail) -> None:
        self.count += 1
        if not ok and len(self.failures) < 20:
            self.failures.append(detail() if callable(detail) else detail)
        elif not ok:
            self.failures.append("...")

    def done(self) -> CheckResult:
        return CheckResult(self.name, not self.failures, self.count, self.failures,
                           time.perf_counter() - self.t0)


# --- closed forms against the linear solve --------------------------------------

def closed_forms(m_max: int = 6, n_max: int = 50,
                 coefficients=(0, Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))) -> CheckResult:
    """Closed-form a(L_1), a(R_1) and det against the assembled chain.

    Two boundary components, one at the far left end and one at R_1, take
    every coefficient pair. All right-hand sides of one chain go through a
    single elimination.
    """
    suite = _Suite("closed forms")
    coefficients = [Fraction(c) for c in coefficients]
    mq = coprime_pairs(2, m_max)
    for (m1, q1), (m2, q2) in product(mq, mq):
        lw, rw = hj_weights(m1, q1), hj_weights(m2, q2)
        left = tuple(1 if j == len(lw) - 1 else 0 for j in range(len(lw)))
        right = tuple(1 if j == 0 else 0 for j in range(len(rw)))
        combos = list(product(coefficients, repeat=2))
        for n in range(0, n_max + 1):
            fams = [ChainFamily(tuple(lw), tuple(rw), n,
                                (FamilyBoundary(c1, left, ()), FamilyBoundary(c2, (), right)))
                    for c1, c2 in combos]
            g0 = fams[0].graph()
            a = intersection_matrix(g0)
            cols = [rhs_vector(g0.with_boundary(f.graph_boundary())) for f in fams]
            scale, sols = solve_many_scaled(a, cols)
            pos = {v: i for i, v in enumerate(g0.ids)}
            fi0 = fams[0].invariants()
            d = det_exact(a)
            suite.check(family_det(fi0, n) == abs(d),
                        lambda: f"det mismatch at {(m1, q1, m2, q2, n)}: {family_det(fi0, n)} vs {d}")
            for fam, x, (c1, c2) in zip(fams, sols, combos):
                fi = fam.invariants()
                got = (Fraction(x[pos["L1"]], scale), Fraction(x[pos["R1"]], scale))
                want = (a_L1(fi, n), a_R1(fi, n))
                suite.check(got == want,
                            lambda: f"{(m1, q1, m2, q2, n, str(c1), str(c2))}: solve {got} vs closed {want}")
    return suite.done()


# --- tree recursions ------------------------------------------------------------

def random_tree(rng: random.Random, max_vertices: int = 12, max_weight: int = 6) -> FoliatedDualGraph:
    n = rng.randint(1, max_vertices)
    vs = [inv(f"E{k}", rng.randint(1, max_weight), 2) for k in range(n)]
    es = [Edge(f"E{rng.randrange(k)}", f"E{k}") for k in range(1, n)]
    return FoliatedDualGraph(tuple(vs), tuple(es))


def recursions(trees: int = 500, seed: int = 0, max_vertices: int = 12, max_weight: int = 6) -> CheckResult:
    """Vertex recursion and path cofactors against direct determinants.

    Trees are drawn until ``trees`` negative-definite ones were seen; on
    those the recursion must give |det A|. Every drawn tree also checks the
    signed identity det(-A) = recursion.
    """
    suite = _Suite("determinant recursions")
    rng = random.Random(seed)
    nd = 0
    while nd < trees:
        g = random_tree(rng, max_vertices, max_weight)
        a = intersection_matrix(g)
        d = det_exact(a)
        signed = (-1) ** len(g) * d
        definite = is_negative_definite(a)
        ids = g.ids
        for p in ids:
            r = delta_recursive(g, p)
            suite.check(r == signed, lambda: f"signed recursion at {p}: {r} vs {signed}")
            if definite:
                suite.check(r == abs(d), lambda: f"recursion at {p}: {r} vs |det| {abs(d)}")
        if definite:
            nd += 1
            for i, u in enumerate(ids):
                for j, v in enumerate(ids):
                    pc, cf = path_cofactor(g, u, v), cofactor(a, i, j)
                    suite.check(pc == cf, lambda: f"cofactor ({u},{v}): path {pc} vs direct {cf}")
    return suite.done()


# --- blowups against re-solving -------------------------------------------------

_COEFFS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1))


def random_config(rng: random.Random) -> GermConfig:
    """A small negative-definite tree with boundary and 2-4 declared points."""
    while True:
        n = rng.randint(1, 5)
        vs = [inv(f"E{k}", rng.randint(2, 5), rng.randint(1, 3)) for k in range(n)]
        es = [Edge(f"E{rng.randrange(k)}", f"E{k}") for k in range(1, n)]
        g = FoliatedDualGraph(tuple(vs), tuple(es))
        if not is_negative_definite(intersection_matrix(g)):
            continue
        bs = []
        for k in range(rng.randint(0, 2)):
            meets = {rng.choice(g.ids): rng.randint(1, 2)}
            bs.append(BoundaryComponent(f"B{k}", rng.choice(_COEFFS), meets, rng.random() < 0.3))
        g = g.with_boundary(bs)
        pts = derive_points(g)
        for k in range(rng.randint(0, 2)):
            pts.append(MarkedPoint(f"q{k}", SMOOTH, (rng.choice(g.ids),)))
        if len(pts) < 2:
            continue
        chosen = rng.sample(pts, min(len(pts), rng.randint(2, 4)))
        try:
            return GermConfig(g, tuple(chosen))
        except DomainError:
            continue


def _sequences(cfg: GermConfig, ids: list, depth: int, suite: _Suite, trail: tuple):
    if depth == 0:
        return
    for pid in ids:
        after = blowup(cfg, pid)
        ok = resolve_check(cfg, pid, after)
        suite.check(ok, lambda: f"sequence {trail + (pid,)} fails resolve_check")
        rest = [q for q in ids if q != pid]
        _sequences(after, rest, depth - 1, suite, trail + (pid,))


def blowups(configs: int = 1000, depth: int = 4, seed: int = 0) -> CheckResult:
    """Every sequence of distinct declared points, up to ``depth`` long."""
    suite = _Suite("blowup consistency")
    rng = random.Random(seed)
    for _ in range(configs):
        cfg = random_config(rng)
        _sequences(cfg, [p.id for p in cfg.points], depth, suite, ())
    return suite.done()


# --- long-chain shortcut ----------------------------------------------------------

def shortcut(epsilon=Fraction(1, 4), depth: int = 4, n_max: int = 50, m_max: int = 4,
             coefficients=(Fraction(1, 2), Fraction(3, 4))) -> CheckResult:
    """Search never undercuts pld on long chains; |pld_n - limit| shrinks in n."""
    suite = _Suite("long-chain shortcut")
    epsilon = Fraction(epsilon)
    r_min = 2 * int(1 / epsilon) + 2
    mq = coprime_pairs(2, m_max)
    layouts = [()] + [(("far", c),) for c in coefficients] + [(("near", c),) for c in coefficients]
    for (m1, q1), (m2, q2) in product(mq, mq):
        lw, rw = hj_weights(m1, q1), hj_weights(m2, q2)
        for lay in layouts:
            bd = []
            for where, c in lay:
                if where == "far":
                    bd.append(FamilyBoundary(c, tuple(int(j == len(lw) - 1) for j in range(len(lw))), ()))
                else:
                    bd.append(FamilyBoundary(c, (), tuple(int(j == 0) for j in range(len(rw)))))
            base = ChainFamily(tuple(lw), tuple(rw), 0, tuple(bd))
            limit = pld_limit(base.invariants())
            prev = None
            for n in range(1, n_max + 1):
                fam = base.with_n(n)
                row = evaluate(fam)
                gap = abs(row.pld - limit)
                if prev is not None:
                    suite.check(gap < prev, lambda: f"{(m1, q1, m2, q2, lay, n)}: |pld - limit| {gap} after {prev}")
                prev = gap
                if fam.length > r_min and row.lc:
                    g = fam.graph()
                    rep = discrepancies(g, with_good_lc=False)
                    res = mld(GermConfig(g, tuple(derive_points(g)), dict(rep.a)), depth, epsilon,
                              use_shortcut=False, report=rep)
                    suite.check(res.value == rep.pld,
                                lambda: f"{(m1, q1, m2, q2, lay, n)}: search {res.value} below pld {rep.pld}")
    return suite.done()


# --- corpus of classified germs -----------------------------------------------------

def germ_corpus(max_len: int = 5, max_weight: int = 4):
    """(label, graph) pairs covering the seven types, boundary free.

    Chains of invariant curves with Z in 1..3 and transverse chains, stars
    and cycles are all enumerated; only lc graphs are kept, so the corpus is
    what the classification result speaks about.
    """
    from .blowup import zero_boundary_germs

    for label, g in zero_boundary_germs(max_len, max_weight):
        yield label, g
    ws = range(2, max_weight + 1)
    # chains with one transverse curve and F-chain flanks
    for lft in range(0, max_len):
        for rgt in range(0, max_len - lft):
            for weights in product(ws, repeat=lft + rgt + 1):
                vs = []
                for k in range(lft):
                    vs.append(inv(f"L{lft - k}", weights[k], 1 if k == lft - 1 else 2))
                vs.append(trans("T", weights[lft]))
                for k in range(rgt):
                    vs.append(inv(f"R{k + 1}", weights[lft + 1 + k], 1 if k == 0 else 2))
                if lft and rgt and lft > rgt:
                    continue  # mirror images
                yield "transverse chain", chain_graph(vs)
    # stars with a transverse center and F-chain arms
    for arms in range(3, 5):
        for lens in product(range(1, 3), repeat=arms):
            if list(lens) != sorted(lens):
                continue
            for cw in ws:
                vs = [trans("T", cw)]
                es = []
                for a, ln in enumerate(lens):
                    prev = "T"
                    for k in range(ln):
                        vid = f"A{a}.{k + 1}"
                        vs.append(inv(vid, 2, 1 if k == 0 else 2))
                        es.append(Edge(prev, vid))
                        prev = vid
                g = FoliatedDualGraph(tuple(vs), tuple(es))
                if is_negative_definite(intersection_matrix(g)):
                    yield "transverse star", g


def corpus_status(graphs) -> CheckResult:
    """T1 terminal, T1-T5 canonical, T6-T7 lc but not canonical."""
    suite = _Suite("status by type")
    for label, g in graphs:
        try:
            tag = classify(g).type_tag
            rep = discrepancies(g, with_good_lc=False)
        except DomainError:
            continue
        if tag is TypeTag.NotClassified:
            continue
        st = rep.status
        if tag is TypeTag.T1_GChain:
            suite.check(st is Status.TERMINAL, lambda: f"{label} {g.ids}: T1 is {st.value}")
        if tag.value <= 5:
            suite.check(st.is_canonical, lambda: f"{label} {g.ids}: {tag.name} is {st.value}")
        else:
            suite.check(st.is_lc and not st.is_canonical,
                        lambda: f"{label} {g.ids}: {tag.name} is {st.value}")
    return suite.done()


def corpus_gap(graphs) -> CheckResult:
    """b_i <= 1 on good-lc graphs, with b = 1 everywhere exactly on T5."""
    suite = _Suite("variety gap")
    for label, g in graphs:
        try:
            tag = classify(g).type_tag
            rep = discrepancies(g, with_good_lc=False)
        except DomainError:
            continue
        if not good_lc(g, rep):
            continue
        b = variety_gap(g).b
        suite.check(all(x <= 1 for x in b.values()), lambda: f"{label} {g.ids}: b = {b}")
        all_one = all(x == 1 for x in b.values())
        suite.check(all_one == (tag is TypeTag.T5_EGL),
                    lambda: f"{label} {g.ids}: {tag.name} with b = {b}")
    return suite.done()


# --- local indices --------------------------------------------------------------

LAMBDAS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(-1, 2),
           Fraction(3), Fraction(-3), Fraction(-5, 7))
SADDLE_K = (1, 2, 3, 4)
SADDLE_NU = (Fraction(0), Fraction(1), Fraction(-2, 3))


def index_grid() -> CheckResult:
    """Z and CS for the linear family and the saddle-node family."""
    from .germ import VectorFieldGerm, cs_index, z_index

    suite = _Suite("index grid")
    for lam in LAMBDAS:
        # omega = lam y dx - x dy
        v = VectorFieldGerm({(1, 0): Fraction(1)}, {(0, 1): lam})
        got = (z_index(v, "y"), cs_index(v, "y"), z_index(v, "x"), cs_index(v, "x"))
        want = (1, lam, 1, 1 / lam)
        suite.check(got == want, lambda: f"lambda={lam}: {got} vs {want}")
    for k in SADDLE_K:
        for nu in SADDLE_NU:
            # omega = y^(k+1) dx - x (1 + nu y^k) dy
            v = VectorFieldGerm({(1, 0): Fraction(1), (1, k): nu}, {(0, k + 1): Fraction(1)})
            got = (z_index(v, "y"), cs_index(v, "y"), z_index(v, "x"), cs_index(v, "x"))
            want = (1, 0, k + 1, nu)
            suite.check(got == want, lambda: f"k={k} nu={nu}: {got} vs {want}")
    return suite.done()


def _random_poly(rng: random.Random, deg: int, constant: bool) -> dict:
    out = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if i + j == 0 and not constant:
                continue
            if rng.random() < 0.4:
                c = Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2, 3)))
                if c:
                    out[(i, j)] = c
    return out


def tang_oracle(pairs: int = 200, seed: int = 0, max_deg: int = 3) -> CheckResult:
    """Staircase tangency against the order along a parametrization."""
    from .germ import VectorFieldGerm, _poly, is_invariant, param_tang, tang

    suite = _Suite("tangency oracle")
    rng = random.Random(seed)
    done = 0
    while done < pairs:
        fd = _random_poly(rng, max_deg, constant=False)
        fd[(rng.choice(((1, 0), (0, 1))))] = Fraction(rng.choice((1, -1, 2)))
        v = VectorFieldGerm(_random_poly(rng, max_deg, True), _random_poly(rng, max_deg, True))
        f = _poly(fd)
        if is_invariant(v, f):
            continue
        try:
            t = tang(v, f)
        except InfiniteTangencyError:
            # an invariant factor through the origin: the oracle must agree
            try:
                o = param_tang(v, f)
            except InfiniteTangencyError:
                o = None
            suite.check(o is None, lambda: f"f={f.as_expr()}: staircase infinite, parametrization {o}")
            continue
        done += 1
        o = param_tang(v, f)
        suite.check(t == o, lambda: f"v=({v.P.as_expr()}, {v.Q.as_expr()}) f={f.as_expr()}: {t} vs {o}")
    return suite.done()


# --- ACC scan ---------------------------------------------------------------------

ACC_COEFFICIENTS = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(4, 5), Fraction(1))


def acc_runs(coefficients=ACC_COEFFICIENTS, jobs: int = 1) -> CheckResult:
    """No group has a longer increasing pld run than its theoretical bound."""
    suite = _Suite("acc scan")
    grid = standard_grid(coefficients)
    rows = acc_scan(grid, jobs=jobs)
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.m1, r.q1, r.m2, r.q2, r.layout, r.coeffs), []).append(r)
    runs = increasing_runs(rows)
    for key, run in runs.items():
        bound = theoretical_max_run(groups[key], grid.coefficients)
        suite.check(run <= bound, lambda: f"{key}: run {run} > bound {bound}")
    return suite.done()


# --- sign property ------------------------------------------------------------------

def random_definite_system(rng: random.Random, max_vertices: int = 8):
    """A connected negative-definite intersection matrix (cycles allowed)."""
    while True:
        n = rng.randint(1, max_vertices)
        vs = [inv(f"E{k}", rng.randint(1, 6), 2) for k in range(n)]
        es = [Edge(f"E{rng.randrange(k)}", f"E{k}", rng.choice((1, 1, 1, 2))) for k in range(1, n)]
        for _ in range(rng.randint(0, 2)):
            if n > 2:
                u, v = rng.sample(range(n), 2)
                es.append(Edge(f"E{u}", f"E{v}"))
        g = FoliatedDualGraph(tuple(vs), tuple(es))
        a = intersection_matrix(g)
        if is_negative_definite(a):
            return a


def sign_property(systems: int = 500, seed: int = 0) -> CheckResult:
    """A x = d with d >= 0 gives x <= 0, and x < 0 once some d_j > 0."""
    suite = _Suite("sign property")
    rng = random.Random(seed)
    for k in range(systems):
        a = random_definite_system(rng)
        n = len(a)
        d = [rng.choice((0, 0, 1, 2, Fraction(1, 2))) for _ in range(n)]
        if k % 2 == 0 and not any(d):
            d[rng.randrange(n)] = 1
        x = solve(a, d)
        if any(d):
            suite.check(all(v < 0 for v in x), lambda: f"A={a} d={d}: x={x}")
        else:
            suite.check(all(v <= 0 for v in x), lambda: f"A={a} d={d}: x={x}")
    return suite.done()


def run_all(seed: int = 0, quick: bool = True) -> list:
    """Every suite, at reduced size unless ``quick`` is False."""
    if quick:
        return [
            recursions(60, seed),
            closed_forms(4, 12),
            blowups(60, 3, seed),
            index_grid(),
            tang_oracle(30, seed),
            sign_property(100, seed),
        ]
    return [
        recursions(500, seed),
        closed_forms(),
        blowups(1000, 4, seed),
        index_grid(),
        tang_oracle(200, seed),
        sign_property(500, seed),
    ]
