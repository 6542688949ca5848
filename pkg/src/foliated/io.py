"""Text formats for graphs and germs, and the JSON run report.

Graph files are line based; '#' starts a comment::

    curve E1 self=-2 genus=0 invariant Z=1
    curve E2 self=-3 genus=0 transverse tang=0
    edge E1 E2 mult=1 sing=false
    boundary B1 coeff=1/2 invariant
    meets B1 E1 mult=1
    point p1 kind=corner at=E1,E2 bmult B1=1

Germ files hold two lines ``P = ...`` and ``Q = ...`` whose terms look like
``c*x^a*y^b`` with c an integer or p/q.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .blowup import KINDS, MarkedPoint
from .errors import ParseError
from .graph import BoundaryComponent, CurveVertex, Edge, FoliatedDualGraph, Invariant, Transverse
from .rational import NEG_INF, fmt

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")
_NAT = re.compile(r"\d+$")
_INT = re.compile(r"[+-]?\d+$")
_RAT = re.compile(r"[+-]?\d+(/\d+)?$")


@dataclass
class _Tok:
    text: str
    line: int
    col: int


def _tokens(line: str, lineno: int) -> list:
    body = line.split("#", 1)[0]
    return [_Tok(m.group(), lineno, m.start() + 1) for m in re.finditer(r"\S+", body)]


def _kv(tok: _Tok, key: str, pattern) -> str:
    if not tok.text.startswith(key + "="):
        raise ParseError(f"expected {key}=..., got {tok.text!r}", tok.line, tok.col)
    val = tok.text[len(key) + 1:]
    if not pattern.match(val):
        raise ParseError(f"bad value for {key}: {val!r}", tok.line, tok.col + len(key) + 1)
    return val


def _ident(tok: _Tok) -> str:
    if not _ID.match(tok.text):
        raise ParseError(f"bad identifier {tok.text!r}", tok.line, tok.col)
    return tok.text


def _rational(tok: _Tok, text: str, offset: int) -> Fraction:
    if not _RAT.match(text):
        raise ParseError(f"expected an exact rational p/q, got {text!r}", tok.line, tok.col + offset)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError("zero denominator", tok.line, tok.col + offset) from None


@dataclass
class ParsedGraph:
    graph: FoliatedDualGraph
    points: list = field(default_factory=list)


def parse_config(text: str) -> ParsedGraph:
    """Parse a graph file, keeping any ``point`` declarations."""
    curves: list = []
    edges: list = []
    bounds: dict = {}
    border: list = []
    meets: dict = {}
    points: list = []
    where: dict = {}
    refs: list = []    # (token, kind) checked after all declarations are read

    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line, lineno)
        if not toks:
            continue
        head, rest = toks[0], toks[1:]
        kw = head.text
        if kw == "curve":
            if len(rest) != 5:
                raise ParseError("curve needs: id self= genus= (invariant Z= | transverse tang=)",
                                 head.line, head.col)
            cid = _ident(rest[0])
            if cid in where:
                raise ParseError(f"duplicate id {cid}", rest[0].line, rest[0].col)
            where[cid] = rest[0]
            self_int = int(_kv(rest[1], "self", _INT))
            genus = int(_kv(rest[2], "genus", _NAT))
            if rest[3].text == "invariant":
                role = Invariant(int(_kv(rest[4], "Z", _NAT)))
            elif rest[3].text == "transverse":
                role = Transverse(int(_kv(rest[4], "tang", _NAT)))
            else:
                raise ParseError(f"expected invariant or transverse, got {rest[3].text!r}",
                                 rest[3].line, rest[3].col)
            curves.append(CurveVertex(cid, self_int, genus, role))
        elif kw == "edge":
            if len(rest) < 2:
                raise ParseError("edge needs two curve ids", head.line, head.col)
            u, v = _ident(rest[0]), _ident(rest[1])
            refs += [(rest[0], "curve"), (rest[1], "curve")]
            mult, sing = 1, None
            for t in rest[2:]:
                if t.text.startswith("mult="):
                    mult = int(_kv(t, "mult", _NAT))
                elif t.text.startswith("sing="):
                    val = _kv(t, "sing", re.compile(r"(true|false)$"))
                    sing = val == "true"
                else:
                    raise ParseError(f"unexpected {t.text!r} in edge", t.line, t.col)
            edges.append(Edge(u, v, mult, sing))
        elif kw == "boundary":
            if len(rest) not in (2, 3):
                raise ParseError("boundary needs: id coeff= [invariant]", head.line, head.col)
            bid = _ident(rest[0])
            if bid in where:
                raise ParseError(f"duplicate id {bid}", rest[0].line, rest[0].col)
            where[bid] = rest[0]
            t = rest[1]
            if not t.text.startswith("coeff="):
                raise ParseError(f"expected coeff=..., got {t.text!r}", t.line, t.col)
            coeff = _rational(t, t.text[6:], 6)
            invariant = False
            if len(rest) == 3:
                if rest[2].text != "invariant":
                    raise ParseError(f"unexpected {rest[2].text!r}", rest[2].line, rest[2].col)
                invariant = True
            bounds[bid] = (coeff, invariant)
            border.append(bid)
            meets.setdefault(bid, {})
        elif kw == "meets":
            if len(rest) != 3:
                raise ParseError("meets needs: boundary-id curve-id mult=", head.line, head.col)
            bid, cid = _ident(rest[0]), _ident(rest[1])
            refs += [(rest[0], "boundary"), (rest[1], "curve")]
            m = int(_kv(rest[2], "mult", _NAT))
            meets.setdefault(bid, {})
            meets[bid][cid] = meets[bid].get(cid, 0) + m
        elif kw == "point":
            if len(rest) < 3:
                raise ParseError("point needs: id kind= at=", head.line, head.col)
            pid = _ident(rest[0])
            kind = _kv(rest[1], "kind", re.compile("(" + "|".join(KINDS) + ")$"))
            at_tok = rest[2]
            at = _kv(at_tok, "at", re.compile(r"[^,]+(,[^,]+)?$")).split(",")
            for c in at:
                refs.append((_Tok(c, at_tok.line, at_tok.col + 3), "curve"))
            bm: dict = {}
            k = 3
            while k < len(rest):
                if rest[k].text != "bmult":
                    raise ParseError(f"expected bmult, got {rest[k].text!r}", rest[k].line, rest[k].col)
                k += 1
                if k >= len(rest):
                    raise ParseError("bmult needs <boundary>=<nat>", rest[k - 1].line, rest[k - 1].col)
                while k < len(rest) and rest[k].text != "bmult":
                    t = rest[k]
                    m = re.match(r"([A-Za-z_][A-Za-z0-9_.\-]*)=(\d+)$", t.text)
                    if not m:
                        raise ParseError(f"expected <boundary>=<nat>, got {t.text!r}", t.line, t.col)
                    refs.append((_Tok(m.group(1), t.line, t.col), "boundary"))
                    bm[m.group(1)] = int(m.group(2))
                    k += 1
            want = 2 if kind == "corner" else 1
            if len(at) != want:
                raise ParseError(f"{kind} point needs {want} curve(s)", at_tok.line, at_tok.col)
            points.append((rest[0], MarkedPoint(pid, kind, tuple(at), bm)))
        else:
            raise ParseError(f"unknown statement {kw!r}", head.line, head.col)

    curve_ids = {c.id for c in curves}
    for tok, kind in refs:
        known = curve_ids if kind == "curve" else set(bounds)
        if tok.text not in known:
            raise ParseError(f"undeclared {kind} {tok.text!r}", tok.line, tok.col)
    seen = set()
    for tok, p in points:
        if p.id in seen or p.id in where:
            raise ParseError(f"duplicate id {p.id}", tok.line, tok.col)
        seen.add(p.id)
    bcs = tuple(BoundaryComponent(b, bounds[b][0], {c: t for c, t in meets[b].items() if t}, bounds[b][1])
                for b in border)
    g = FoliatedDualGraph(tuple(curves), tuple(edges), bcs)
    return ParsedGraph(g, [p for _, p in points])


def parse_graph(text: str) -> FoliatedDualGraph:
    return parse_config(text).graph


def serialize_graph(g: FoliatedDualGraph, points=()) -> str:
    """Canonical text form; parse_config inverts it."""
    out = []
    for v in g.vertices:
        role = f"invariant Z={v.z}" if v.invariant else f"transverse tang={v.tang}"
        out.append(f"curve {v.id} self={v.self_int} genus={v.genus} {role}")
    for e in g.edges:
        out.append(f"edge {e.u} {e.v} mult={e.mult} sing={'true' if e.sing else 'false'}")
    for b in g.boundary:
        out.append(f"boundary {b.id} coeff={b.coeff}" + (" invariant" if b.invariant else ""))
    for b in g.boundary:
        for c, t in b.meets:
            out.append(f"meets {b.id} {c} mult={t}")
    for p in points:
        line = f"point {p.id} kind={p.kind} at={','.join(p.curves)}"
        if p.bmult:
            line += " bmult " + " ".join(f"{b}={m}" for b, m in p.bmult)
        out.append(line)
    return "\n".join(out) + "\n"


# --- germs --------------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*(\*)?)?\s*((?:[xy](?:\^\d+)?\s*\*?\s*)*)")


def parse_poly(text: str, line: int = 1, col0: int = 1) -> dict:
    """Parse ``c*x^a*y^b`` terms separated by + and - into {(a, b): Fraction}."""
    s = text.rstrip()
    pos = 0
    out: dict = {}
    first = True
    if not s.strip():
        raise ParseError("empty polynomial", line, col0)
    while pos < len(s):
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos >= len(s):
            break
        start = pos
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected + or -, got {s[pos]!r}", line, col0 + pos)
        while pos < len(s) and s[pos].isspace():
            pos += 1
        m = re.match(r"\d+(?:/\d+)?", s[pos:])
        coeff = Fraction(1)
        have_num = False
        if m:
            try:
                coeff = Fraction(m.group())
            except ZeroDivisionError:
                raise ParseError("zero denominator", line, col0 + pos) from None
            pos += m.end()
            have_num = True
            if pos < len(s) and s[pos] == ".":
                raise ParseError("decimals are not allowed; use p/q", line, col0 + pos)
        a = b = 0
        need_factor = not have_num
        while True:
            while pos < len(s) and s[pos].isspace():
                pos += 1
            if pos < len(s) and s[pos] == "*":
                pos += 1
                while pos < len(s) and s[pos].isspace():
                    pos += 1
                need_factor = True
            if pos < len(s) and s[pos] in "xy":
                var = s[pos]
                pos += 1
                e = 1
                if pos < len(s) and s[pos] == "^":
                    m = re.match(r"\d+", s[pos + 1:])
                    if not m:
                        raise ParseError("expected an exponent after ^", line, col0 + pos + 1)
                    e = int(m.group())
                    pos += 1 + m.end()
                if var == "x":
                    a += e
                else:
                    b += e
                need_factor = False
                continue
            break
        if need_factor:
            raise ParseError("expected a number, x or y", line, col0 + pos)
        if pos == start:
            raise ParseError(f"unexpected {s[pos]!r}", line, col0 + pos)
        out[(a, b)] = out.get((a, b), 0) + sign * coeff
        first = False
    return {k: v for k, v in out.items() if v}


def parse_germ(text: str):
    from .germ import VectorFieldGerm, _poly

    parts: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        m = re.match(r"\s*([PQ])\s*=", body)
        if not m:
            raise ParseError("expected 'P = <poly>' or 'Q = <poly>'", lineno, 1)
        key = m.group(1)
        if key in parts:
            raise ParseError(f"{key} given twice", lineno, m.start(1) + 1)
        parts[key] = parse_poly(body[m.end():], lineno, m.end() + 1)
    for key in "PQ":
        if key not in parts:
            raise ParseError(f"missing {key} = ...", max(1, len(text.splitlines())), 1)
    return VectorFieldGerm(_poly(parts["P"]), _poly(parts["Q"]))


def format_poly(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    terms = []
    for (a, b) in sorted(coeffs, key=lambda m: (m[0] + m[1], -m[0])):
        c = coeffs[(a, b)]
        mono = "*".join(([f"x^{a}" if a > 1 else "x"] if a else []) + ([f"y^{b}" if b > 1 else "y"] if b else []))
        mag = abs(c)
        body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else f"{mag}")
        terms.append(("-" if c < 0 else "+", body))
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f" {s} {t}" for s, t in terms[1:])


def serialize_germ(v) -> str:
    from .germ import _coeffs

    return f"P = {format_poly(_coeffs(v.P))}\nQ = {format_poly(_coeffs(v.Q))}\n"


# --- reports ------------------------------------------------------------------------

def to_plain(x):
    """Exact values to JSON-friendly data: Fractions become "p/q" strings, ints stay ints."""
    if isinstance(x, (bool, int)) or x is None:
        return x
    if isinstance(x, Fraction) or x is NEG_INF:
        return fmt(x)
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=str) if isinstance(x, (set, frozenset)) else x
        return [to_plain(v) for v in items]
    return x


def from_plain(x):
    """Inverse of ``to_plain`` for values that were exact numbers."""
    if isinstance(x, str):
        if x == "-inf":
            return NEG_INF
        if _RAT.match(x):
            return Fraction(x)
        return x
    if isinstance(x, dict):
        return {k: from_plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [from_plain(v) for v in x]
    return x


@dataclass
class RunReport:
    command: str
    digest: str
    results: dict
    timestamp: str | None = None

    @staticmethod
    def digest_of(data: bytes) -> str:
        return hashlib.sha256(data).hexdigest()

    def to_json(self) -> str:
        body = {"command": self.command, "input_digest": self.digest, "results": to_plain(self.results)}
        if self.timestamp is not None:
            body["timestamp"] = self.timestamp
        return json.dumps(body, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        raw = json.loads(text)
        return cls(raw["command"], raw["input_digest"], from_plain(raw["results"]), raw.get("timestamp"))
