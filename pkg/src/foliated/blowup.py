"""Point blowups on germ configurations and a bounded mld search.

A configuration is a dual graph, a list of marked points on its invariant
curves, and the current discrepancy of every curve. Blowing up a marked point
adds an invariant (-1)-curve F whose discrepancy follows from the local data
at the point:

    smooth foliation point on E        a(F) = a(E) + 1 - s
    corner E_j n E_k (reduced sing.)   a(F) = a(E_j) + a(E_k) - s
    reduced sing. on E_r only          a(F) = a(E_r) - s

with s = sum_i b_i mult_p(B_i). Boundary branches are modelled as smooth
branches; ``blowup`` documents where they go next.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Mapping

from .discrepancy import Status, discrepancies
from .errors import DomainError
from .graph import (BoundaryComponent, Chain, Edge, FoliatedDualGraph, chain_graph, cycle_graph,
                    inv, shape)
from .rational import NEG_INF

SMOOTH, CORNER, REDUCED = "smooth", "corner", "reduced1"
KINDS = (SMOOTH, CORNER, REDUCED)


@dataclass(frozen=True)
class MarkedPoint:
    id: str
    kind: str
    curves: tuple          # one curve, or two for a corner
    bmult: tuple = ()      # sorted (boundary id, mult) pairs

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown point kind {self.kind!r}")
        want = 2 if self.kind == CORNER else 1
        if len(self.curves) != want:
            raise ValueError(f"{self.kind} point needs {want} curve(s), got {len(self.curves)}")
        m = self.bmult.items() if isinstance(self.bmult, Mapping) else self.bmult
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "bmult", tuple(sorted((b, int(k)) for b, k in m if int(k) != 0)))
        for _, k in self.bmult:
            if k < 0:
                raise ValueError("boundary multiplicity must be non-negative")

    def mult(self, bid: str) -> int:
        return dict(self.bmult).get(bid, 0)


class ConfigError(DomainError):
    pass


@dataclass(frozen=True)
class GermConfig:
    graph: FoliatedDualGraph
    points: tuple = ()
    a: dict = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.a is None:
            object.__setattr__(self, "a", dict(discrepancies(self.graph, with_good_lc=False).a))
        problems = check_config(self)
        if problems:
            raise ConfigError("; ".join(problems))

    def point(self, pid: str) -> MarkedPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(f"unknown point {pid!r}")

    @property
    def coeffs(self) -> dict:
        return {b.id: b.coeff for b in self.graph.boundary}


def check_config(cfg: GermConfig) -> list:
    g = cfg.graph
    out = []
    used: dict = {}
    ids = set()
    sing: dict = {}
    for e in g.edges:
        sing.setdefault(e.key, []).append(e.sing)
    bids = {b.id for b in g.boundary}
    for p in cfg.points:
        if p.id in ids:
            out.append(f"duplicate point id {p.id}")
        ids.add(p.id)
        for c in p.curves:
            if c not in g:
                out.append(f"point {p.id} references unknown curve {c}")
            elif not g.vertex(c).invariant:
                out.append(f"point {p.id} lies on transverse curve {c}")
        if p.kind == CORNER and all(c in g for c in p.curves):
            u, v = p.curves
            flags = sing.get(frozenset((u, v)), [])
            if not flags or not all(flags):
                out.append(f"corner {p.id} needs a singular edge {u}-{v}")
            used[(u, v)] = used.get((u, v), 0) + 1
            if used[(u, v)] > g.mult(u, v):
                out.append(f"more corner points than intersections on {u}-{v}")
        for bid, m in p.bmult:
            if bid not in bids:
                out.append(f"point {p.id} references unknown boundary {bid}")
    # branch multiplicities cannot exceed the declared intersection numbers
    for b in g.boundary:
        totals: dict = {}
        for p in cfg.points:
            for c in p.curves:
                totals[c] = totals.get(c, 0) + p.mult(b.id)
        for c, total in totals.items():
            if total > b.t(c):
                out.append(f"{b.id} has multiplicity {total} at points of {c} but meets it {b.t(c)} times")
    return out


def derive_points(g: FoliatedDualGraph) -> list:
    """Marked points read off the graph alone.

    One corner per intersection point of invariant curves, one reduced point
    per remaining unit of Z on each invariant curve (every singularity counted
    with Z = 1), and one smooth point per transverse branch of the boundary.
    Invariant boundary components sit at reduced points.
    """
    pts = []
    corners: dict = {}
    for e in g.edges:
        if e.sing and g.vertex(e.u).invariant and g.vertex(e.v).invariant:
            for k in range(e.mult):
                pts.append(MarkedPoint(f"p.{e.u}.{e.v}.{k + 1}", CORNER, (e.u, e.v)))
                corners[e.u] = corners.get(e.u, 0) + 1
                corners[e.v] = corners.get(e.v, 0) + 1
    for v in g.vertices:
        if not v.invariant:
            continue
        free = max(0, v.z - corners.get(v.id, 0))
        red = [dict() for _ in range(free)]
        extra = []
        smooth = []
        for b in g.boundary:
            t = b.t(v.id)
            if not t:
                continue
            if b.invariant:
                slot = next((r for r in red if not r), None)
                if slot is None:
                    slot = {}
                    extra.append(slot)
                slot[b.id] = t
            else:
                smooth.extend({b.id: 1} for _ in range(t))
        for k, r in enumerate(red + extra):
            pts.append(MarkedPoint(f"p.{v.id}.r{k + 1}", REDUCED, (v.id,), r))
        for k, s in enumerate(smooth):
            pts.append(MarkedPoint(f"p.{v.id}.s{k + 1}", SMOOTH, (v.id,), s))
    return pts


# --- single blowup -------------------------------------------------------------

def _fresh(taken, stem: str) -> str:
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def default_plan(cfg: GermConfig, p: MarkedPoint) -> dict:
    """Where each branch at p goes on the new curve F.

    A transverse branch continues through its own fresh smooth point of F
    with multiplicity 1; an invariant branch through a reduced point follows
    the reduced singularity on F.
    """
    plan = {}
    for bid, m in p.bmult:
        b = cfg.graph.boundary_component(bid)
        if b.invariant and p.kind == REDUCED:
            plan[bid] = ("reduced", m)
        else:
            plan[bid] = (f"smooth:{bid}", 1)
    return plan


def blowup(cfg: GermConfig, pid, branch_plan: Mapping | None = None,
           new_id: str | None = None) -> GermConfig:
    """Blow up a marked point, returning the new configuration.

    ``branch_plan`` maps boundary ids at the point to ``(target, mult)``.
    Targets are ``"smooth"`` or ``"smooth:<tag>"`` (a smooth point of F,
    branches with the same tag share it), ``"corner:<curve>"`` (the corner of
    F with a curve through p) or ``"reduced"`` (the reduced point on F left by
    a one-curve reduced singularity). Multiplicity 0 separates the branch.
    """
    p = pid if isinstance(pid, MarkedPoint) else cfg.point(pid)
    if p not in cfg.points:
        raise KeyError(f"point {p.id} is not in the configuration")
    g = cfg.graph
    plan = default_plan(cfg, p) if branch_plan is None else dict(branch_plan)
    at_p = dict(p.bmult)
    for bid, (target, m) in plan.items():
        if bid not in at_p:
            raise ConfigError(f"branch plan names {bid}, which does not pass through {p.id}")
        if m < 0 or m > at_p[bid]:
            raise ConfigError(f"branch {bid} cannot have multiplicity {m} after a point of multiplicity {at_p[bid]}")
        if m and not _valid_target(target, p):
            raise ConfigError(f"branch target {target!r} does not exist on the new curve")
    coeff = cfg.coeffs
    s = sum((coeff[b] * m for b, m in p.bmult), Fraction(0))
    through = list(p.curves)
    if p.kind == SMOOTH:
        aF = cfg.a[through[0]] + 1 - s
        zF = 1
    elif p.kind == CORNER:
        aF = cfg.a[through[0]] + cfg.a[through[1]] - s
        zF = 2
    else:
        aF = cfg.a[through[0]] - s
        zF = 2
    taken = set(g.ids) | {b.id for b in g.boundary}
    fid = new_id or _fresh(taken, "F")
    if fid in taken:
        raise ConfigError(f"curve id {fid} already used")

    verts = []
    for v in g.vertices:
        if v.id in through:
            role = v.role
            if p.kind == SMOOTH:
                role = replace(role, z=role.z + 1)
            v = replace(v, self_int=v.self_int - 1, role=role)
        verts.append(v)
    verts.append(inv(fid, 1, zF))

    edges = []
    for e in g.edges:
        if p.kind == CORNER and e.key == frozenset(through):
            if e.mult > 1:
                edges.append(replace(e, mult=e.mult - 1))
            continue
        edges.append(e)
    for c in through:
        edges.append(Edge(c, fid, 1, True))

    bounds = []
    for b in g.boundary:
        m = at_p.get(b.id, 0)
        if not m:
            bounds.append(b)
            continue
        meets = b.meets_map
        for c in through:
            meets[c] = meets.get(c, 0) - m
        meets[fid] = m
        bounds.append(BoundaryComponent(b.id, b.coeff, {c: t for c, t in meets.items() if t}, b.invariant))
    ng = FoliatedDualGraph(tuple(verts), tuple(edges), tuple(bounds))

    points = [q for q in cfg.points if q.id != p.id]
    pids = {q.id for q in points}

    def pname(tag):
        return _fresh(pids, f"{fid}.{tag}") if f"{fid}.{tag}" in pids else f"{fid}.{tag}"

    carried: dict = {}
    for bid, (target, m) in plan.items():
        if m:
            carried.setdefault(target, {})[bid] = m
    for c in through:
        points.append(MarkedPoint(pname(f"c{c}"), CORNER, (c, fid), carried.pop(f"corner:{c}", {})))
    if p.kind == REDUCED:
        points.append(MarkedPoint(pname("r"), REDUCED, (fid,), carried.pop("reduced", {})))
    for target, bm in sorted(carried.items()):
        tag = target.replace(":", "_")
        points.append(MarkedPoint(pname(tag), SMOOTH, (fid,), bm))
    a = dict(cfg.a)
    a[fid] = aF
    return GermConfig(ng, tuple(points), a)


def _valid_target(target: str, p: MarkedPoint) -> bool:
    if target == "smooth" or target.startswith("smooth:"):
        return True
    if target == "reduced":
        return p.kind == REDUCED
    if target.startswith("corner:"):
        return target[len("corner:"):] in p.curves
    return False


def resolve_check(before: GermConfig, p, after: GermConfig) -> bool:
    """True iff re-solving the blown-up graph reproduces the carried values."""
    try:
        fresh = discrepancies(after.graph, with_good_lc=False).a
    except DomainError:
        return False
    return fresh == after.a and set(after.graph.ids) >= set(before.graph.ids)


# --- local search ---------------------------------------------------------------
#
# Blowups at distinct points commute and the case formulas only read the
# values of the curves through the point and the branches there, so the
# search runs on local point states instead of whole graphs.

@dataclass(frozen=True)
class MldResult:
    value: object        # Fraction or NEG_INF
    certified: bool
    source: str          # "not-lc", "shortcut" or "search"
    explored: int = 0
    uncertified: tuple = ()


def _state(cfg: GermConfig, p: MarkedPoint):
    branches = []
    for bid, m in p.bmult:
        b = cfg.graph.boundary_component(bid)
        branches.append((b.coeff, m, b.invariant))
    return (p.kind, tuple(cfg.a[c] for c in p.curves), tuple(sorted(branches)))


def _children(state):
    """(value of F, child states on F) for the local blowup of ``state``."""
    kind, vals, branches = state
    s = sum((b * m for b, m, _ in branches), Fraction(0))
    if kind == SMOOTH:
        f = vals[0] + 1 - s
    elif kind == CORNER:
        f = vals[0] + vals[1] - s
    else:
        f = vals[0] - s
    kids = [(CORNER, tuple(sorted((v, f))), ()) for v in vals]
    follow = tuple(sorted((b, m, i) for b, m, i in branches if i and kind == REDUCED))
    if kind == REDUCED:
        kids.append((REDUCED, (f,), follow))
    for b, m, i in branches:
        if not (i and kind == REDUCED):
            kids.append((SMOOTH, (f,), ((b, 1, i),)))
    return f, kids


def _safe(state, bound) -> bool:
    """Can no descendant of this unexplored state go below ``bound``?

    Without branches every descendant value is 0, a sum of non-negative
    values already present, or at least 1. With transverse branches of total
    weight s <= 1 at a smooth point or a corner, every descendant is at least
    the value of the next curve, so checking that one value suffices.
    """
    kind, vals, branches = state
    if any(v < 0 for v in vals):
        return False
    if not branches:
        return True
    if kind == REDUCED or any(i for _, _, i in branches):
        return False
    s = sum((b * m for b, m, _ in branches), Fraction(0))
    if s > 1:
        return False
    f, _ = _children(state)
    return f >= bound


def _explore(state, depth: int, found: list, frontier: list) -> int:
    """Expand ``state`` to ``depth``; collect values and unexpanded states."""
    if depth == 0:
        frontier.append(state)
        return 0
    f, kids = _children(state)
    found.append(f)
    count = 1
    for k in kids:
        count += _explore(k, depth - 1, found, frontier)
    return count


def chain_family_shortcut(cfg: GermConfig, epsilon: Fraction, report=None) -> bool:
    """Does the long-chain shortcut mld = pld apply?

    Needs an F-chain of invariant curves, all log discrepancies at least
    epsilon, transverse boundary with coefficients at least epsilon, and more
    than 2 floor(1/eps) + 2 curves.
    """
    from .classifier import is_f_chain

    g = cfg.graph
    sh = shape(g)
    if not isinstance(sh, Chain):
        return False
    order = list(sh.order)
    if not (is_f_chain(g, order) or is_f_chain(g, order[::-1])):
        return False
    if any(b.invariant or b.coeff < epsilon for b in g.boundary):
        return False
    rep = report or discrepancies(g, with_good_lc=False)
    if any(c < epsilon for c in rep.log_disc.values()):
        return False
    return len(order) > 2 * int(1 / Fraction(epsilon)) + 2


def mld(cfg: GermConfig, depth: int, epsilon=Fraction(1, 4), use_shortcut: bool = True,
        report=None) -> MldResult:
    """Minimal log discrepancy of the germ, by shortcut or bounded search.

    Search candidates are the pld, the constant 1 and every nonzero value met
    within ``depth`` blowups of the marked points. Points on transverse curves
    are not searched.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    epsilon = Fraction(epsilon)
    rep = report or discrepancies(cfg.graph, with_good_lc=False)
    if rep.status is Status.NOT_LC:
        return MldResult(NEG_INF, True, "not-lc")
    if use_shortcut and chain_family_shortcut(cfg, epsilon, rep):
        return MldResult(rep.pld, True, "shortcut")
    found: list = []
    frontier: list = []
    explored = 0
    for p in cfg.points:
        explored += _explore(_state(cfg, p), depth, found, frontier)
    if any(v < 0 for v in found):
        return MldResult(NEG_INF, True, "search", explored)
    best = min([rep.pld, Fraction(1)] + [v for v in found if v != 0])
    loose = tuple(sorted({s for s in frontier if not _safe(s, best)}))
    # a boundary branch on a transverse curve is outside the search space
    on_transverse = any(b.t(v.id) for b in cfg.graph.boundary for v in cfg.graph.vertices
                        if not v.invariant)
    return MldResult(best, not loose and not on_transverse, "search", explored, loose)


def mld_of_graph(g: FoliatedDualGraph, depth: int = 2, epsilon=Fraction(1, 4),
                 use_shortcut: bool = True) -> MldResult:
    rep = discrepancies(g, with_good_lc=False)
    if rep.status is Status.NOT_LC:
        return MldResult(NEG_INF, True, "not-lc")
    cfg = GermConfig(g, tuple(derive_points(g)), dict(rep.a))
    return mld(cfg, depth, epsilon, use_shortcut, rep)


# --- Delta = 0 scan ---------------------------------------------------------------

def zero_boundary_germs(max_chain_len: int, max_weight: int = 5):
    """Boundary-free germ graphs of the canonical shapes, as (label, graph).

    F-chains take every weight sequence in 2..max_weight; bad-tail triples
    and dihedral forks vary the fork weight; (-2)-chains and EGL cycles
    (cycles up to rotation and reflection, negative definite only) fill in
    the rest.
    """
    if max_chain_len < 1:
        raise ValueError("max_chain_len must be at least 1")
    ws = range(2, max_weight + 1)
    for n in range(1, max_chain_len + 1):
        for weights in product(ws, repeat=n):
            vs = [inv(f"C{k + 1}", w, 1 if k == 0 else 2) for k, w in enumerate(weights)]
            yield "F-chain", chain_graph(vs)
    for w in ws:
        if max_chain_len >= 3:
            yield "bad-tail", chain_graph([inv("U", 2, 1), inv("C", w, 3), inv("W", 2, 1)])
        for k in range(1, max_chain_len - 2):
            vs = [inv("U", 2, 1), inv("C", w, 3), inv("W", 2, 1)] + [inv(f"T{j}", 2, 2) for j in range(1, k + 1)]
            es = [Edge("U", "C"), Edge("W", "C"), Edge("C", "T1")] + \
                 [Edge(f"T{j}", f"T{j + 1}") for j in range(1, k)]
            yield "dihedral", FoliatedDualGraph(tuple(vs), tuple(es))
    for n in range(1, max_chain_len + 1):
        yield "(-2)-chain", chain_graph([inv(f"C{k + 1}", 2, 2) for k in range(n)])
    from .linalg import intersection_matrix, is_negative_definite
    for n in range(2, max_chain_len + 1):
        seen = set()
        for weights in product(ws, repeat=n):
            rots = [weights[i:] + weights[:i] for i in range(n)]
            key = min(rots + [r[::-1] for r in rots])
            if key in seen:
                continue
            seen.add(key)
            g = cycle_graph([inv(f"C{k + 1}", w, 2) for k, w in enumerate(key)])
            if is_negative_definite(intersection_matrix(g)):
                yield "EGL cycle", g
    yield "nodal", FoliatedDualGraph((inv("N", 1, 0, genus=1),))


def mld_zero_boundary_scan(max_chain_len: int, max_weight: int = 5, depth: int = 1) -> dict:
    """Certified mld of every boundary-free germ; maps value -> certified flags seen."""
    out: dict = {}
    for _, g in zero_boundary_germs(max_chain_len, max_weight):
        r = mld_of_graph(g, depth, use_shortcut=False)
        out.setdefault(r.value, set()).add(r.certified)
    return out
