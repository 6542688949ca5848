"""Weighted dual graphs of exceptional curves carrying foliation data.

A graph is immutable once built. Vertices are exceptional curves with a
self-intersection, an arithmetic genus and either a Z-index (invariant
curves) or a tangency order (transverse curves). Edges record intersection
numbers and whether the intersection point is a foliation singularity.
Boundary components record their coefficient and intersection numbers with
the exceptional curves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Invariant:
    z: int


@dataclass(frozen=True)
class Transverse:
    tang: int


@dataclass(frozen=True)
class CurveVertex:
    id: str
    self_int: int
    genus: int = 0
    role: Invariant | Transverse = Invariant(2)

    @property
    def invariant(self) -> bool:
        return isinstance(self.role, Invariant)

    @property
    def eps(self) -> int:
        """0 for invariant curves, 1 for transverse ones."""
        return 0 if self.invariant else 1

    @property
    def weight(self) -> int:
        return -self.self_int

    @property
    def z(self) -> int | None:
        return self.role.z if isinstance(self.role, Invariant) else None

    @property
    def tang(self) -> int | None:
        return self.role.tang if isinstance(self.role, Transverse) else None


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    mult: int = 1
    # None means "use the default": singular iff both ends are invariant.
    sing: bool | None = None

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))

    def other(self, w: str) -> str:
        return self.v if w == self.u else self.u


@dataclass(frozen=True)
class BoundaryComponent:
    id: str
    coeff: Fraction
    meets: tuple = ()  # sorted (curve id, t) pairs
    invariant: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        m = self.meets.items() if isinstance(self.meets, Mapping) else self.meets
        object.__setattr__(self, "meets", tuple(sorted((str(c), int(t)) for c, t in m)))

    def t(self, cid: str) -> int:
        for c, t in self.meets:
            if c == cid:
                return t
        return 0

    @property
    def meets_map(self) -> dict:
        return dict(self.meets)

    @property
    def log_disc(self) -> Fraction:
        """Log discrepancy of the component itself: eps - coeff."""
        return (0 if self.invariant else 1) - self.coeff


# --- shapes -----------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    order: tuple


@dataclass(frozen=True)
class Cycle:
    order: tuple


@dataclass(frozen=True)
class StarShaped:
    center: str


@dataclass(frozen=True)
class TreeOther:
    pass


@dataclass(frozen=True)
class NonTree:
    pass


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""

    def __str__(self):
        return f"{self.code}: {self.detail}" if self.detail else self.code


@dataclass(frozen=True)
class FoliatedDualGraph:
    vertices: tuple
    edges: tuple = ()
    boundary: tuple = ()
    _index: dict = field(default=None, compare=False, repr=False, hash=False)
    _adj: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        index = {v.id: v for v in verts}
        edges = []
        for e in self.edges:
            if e.sing is None:
                a, b = index.get(e.u), index.get(e.v)
                default = bool(a and b and a.invariant and b.invariant)
                e = replace(e, sing=default)
            edges.append(e)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "boundary", tuple(self.boundary))
        object.__setattr__(self, "_index", index)
        adj: dict = {}
        for e in edges:
            if e.u != e.v:
                for x, y in ((e.u, e.v), (e.v, e.u)):
                    row = adj.setdefault(x, {})
                    row[y] = row.get(y, 0) + e.mult
        object.__setattr__(self, "_adj", adj)

    # lookups
    @property
    def ids(self) -> list:
        return [v.id for v in self.vertices]

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, vid):
        return vid in self._index

    def vertex(self, vid: str) -> CurveVertex:
        try:
            return self._index[vid]
        except KeyError:
            raise KeyError(f"unknown curve id {vid!r}") from None

    def mult(self, u: str, v: str) -> int:
        """Total intersection number between two distinct curves."""
        if u == v:
            return 0
        return self._adj.get(u, {}).get(v, 0)

    def neighbors(self, vid: str) -> dict:
        self.vertex(vid)
        return dict(self._adj.get(vid, {}))

    def incident(self, vid: str) -> list:
        return [e for e in self.edges if vid in (e.u, e.v)]

    def boundary_component(self, bid: str) -> BoundaryComponent:
        for b in self.boundary:
            if b.id == bid:
                return b
        raise KeyError(f"unknown boundary id {bid!r}")

    def theta_dot(self, vid: str) -> Fraction:
        """Theta . E = sum_i b_i t_{i,E}."""
        return sum((b.coeff * b.t(vid) for b in self.boundary), Fraction(0))

    def with_boundary(self, boundary: Iterable[BoundaryComponent]) -> "FoliatedDualGraph":
        return FoliatedDualGraph(self.vertices, self.edges, tuple(boundary))

    def relabel(self, mapping: Mapping[str, str]) -> "FoliatedDualGraph":
        vs = [replace(v, id=mapping.get(v.id, v.id)) for v in self.vertices]
        es = [replace(e, u=mapping.get(e.u, e.u), v=mapping.get(e.v, e.v)) for e in self.edges]
        bs = [replace(b, meets=tuple((mapping.get(c, c), t) for c, t in b.meets)) for b in self.boundary]
        return FoliatedDualGraph(tuple(vs), tuple(es), tuple(bs))


def degree(g: FoliatedDualGraph, vid: str) -> int:
    """Number of edges at ``vid`` counted with multiplicity."""
    return sum(g.neighbors(vid).values())


def is_connected(g: FoliatedDualGraph, subset=None) -> bool:
    nodes = set(g.ids if subset is None else subset)
    if not nodes:
        return True
    start = next(iter(nodes))
    seen = {start}
    todo = deque([start])
    while todo:
        u = todo.popleft()
        for w in g.neighbors(u):
            if w in nodes and w not in seen:
                seen.add(w)
                todo.append(w)
    return seen == nodes


def is_tree(g: FoliatedDualGraph) -> bool:
    total = sum(e.mult for e in g.edges)
    return is_connected(g) and total == len(g) - 1


def has_simple_edges(g: FoliatedDualGraph) -> bool:
    seen = set()
    for e in g.edges:
        if e.mult != 1 or e.key in seen:
            return False
        seen.add(e.key)
    return True


def _walk_path(g: FoliatedDualGraph, start: str) -> tuple:
    order = [start]
    prev = None
    cur = start
    while True:
        nxt = [w for w in g.neighbors(cur) if w != prev]
        if not nxt:
            return tuple(order)
        prev, cur = cur, nxt[0]
        order.append(cur)


def shape(g: FoliatedDualGraph):
    """Chain, Cycle, StarShaped(center), TreeOther or NonTree."""
    if not is_connected(g) or len(g) == 0:
        return NonTree()
    degs = {v: degree(g, v) for v in g.ids}
    if is_tree(g):
        forks = [v for v, d in degs.items() if d >= 3]
        if not forks:
            ends = sorted(v for v, d in degs.items() if d <= 1)
            return Chain(_walk_path(g, ends[0]))
        if len(forks) == 1:
            return StarShaped(forks[0])
        return TreeOther()
    if all(d == 2 for d in degs.values()) and len(g) >= 2:
        if len(g) == 2:
            return Cycle(tuple(sorted(degs)))
        start = min(degs)
        order = [start]
        prev, cur = None, start
        while True:
            w = sorted(x for x in g.neighbors(cur) if x != prev)[0]
            if w == start:
                break
            order.append(w)
            prev, cur = cur, w
        return Cycle(tuple(order))
    return NonTree()


def validate(g: FoliatedDualGraph) -> list:
    """Return the list of violated data-model invariants (empty if valid)."""
    from .linalg import intersection_matrix, is_negative_definite

    out: list = []
    seen: set = set()
    for v in g.vertices:
        if v.id in seen:
            out.append(Violation("duplicate-id", v.id))
        seen.add(v.id)
        if v.self_int > -1:
            out.append(Violation("self-intersection", f"{v.id} has self={v.self_int}"))
        if v.genus < 0:
            out.append(Violation("genus", f"{v.id} has genus={v.genus}"))
        if isinstance(v.role, Invariant) and v.role.z < 0:
            out.append(Violation("z-index", f"{v.id} has Z={v.role.z}"))
        if isinstance(v.role, Transverse) and v.role.tang < 0:
            out.append(Violation("tangency", f"{v.id} has tang={v.role.tang}"))
    pairs: set = set()
    for e in g.edges:
        if e.u not in g or e.v not in g:
            out.append(Violation("dangling-edge", f"{e.u}-{e.v}"))
            continue
        if e.u == e.v:
            out.append(Violation("self-loop", e.u))
            continue
        if e.mult < 1:
            out.append(Violation("edge-mult", f"{e.u}-{e.v} mult={e.mult}"))
        if e.key in pairs:
            out.append(Violation("parallel-edge", f"{e.u}-{e.v} declared twice; use mult"))
        pairs.add(e.key)
        if g.vertex(e.u).invariant and g.vertex(e.v).invariant and not e.sing:
            out.append(Violation("separatrix-crossing",
                                 f"invariant curves {e.u}, {e.v} meet at a smooth foliation point"))
    bseen: set = set()
    for b in g.boundary:
        if b.id in bseen or b.id in g:
            out.append(Violation("duplicate-id", b.id))
        bseen.add(b.id)
        if not (0 <= b.coeff <= 1):
            out.append(Violation("boundary-coeff", f"{b.id} coeff={b.coeff}"))
        for c, t in b.meets:
            if c not in g:
                out.append(Violation("dangling-meets", f"{b.id} meets unknown {c}"))
            if t < 0:
                out.append(Violation("meets-mult", f"{b.id}.{c}={t}"))
        if not any(t > 0 for _, t in b.meets):
            out.append(Violation("detached-boundary", f"{b.id} meets no exceptional curve"))
    if len(g) == 0:
        out.append(Violation("empty"))
    elif not is_connected(g):
        out.append(Violation("disconnected"))
    if not any(v.code in ("dangling-edge", "self-loop", "duplicate-id") for v in out) and len(g):
        if not is_negative_definite(intersection_matrix(g)):
            out.append(Violation("non-negative-definite"))
    return out


# small builders, handy in tests and scans

def inv(vid: str, weight: int, z: int, genus: int = 0) -> CurveVertex:
    return CurveVertex(vid, -weight, genus, Invariant(z))


def trans(vid: str, weight: int, tang: int = 0, genus: int = 0) -> CurveVertex:
    return CurveVertex(vid, -weight, genus, Transverse(tang))


def chain_graph(vertices, boundary=()) -> FoliatedDualGraph:
    vs = tuple(vertices)
    es = tuple(Edge(vs[i].id, vs[i + 1].id) for i in range(len(vs) - 1))
    return FoliatedDualGraph(vs, es, tuple(boundary))


def cycle_graph(vertices) -> FoliatedDualGraph:
    vs = tuple(vertices)
    if len(vs) == 2:
        return FoliatedDualGraph(vs, (Edge(vs[0].id, vs[1].id, 2),))
    es = tuple(Edge(vs[i].id, vs[(i + 1) % len(vs)].id) for i in range(len(vs)))
    return FoliatedDualGraph(vs, es)
