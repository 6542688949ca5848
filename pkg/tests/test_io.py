import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from foliated.errors import ParseError
from foliated.germ import _coeffs
from foliated.graph import BoundaryComponent, Edge, FoliatedDualGraph, inv, trans
from foliated.io import (RunReport, from_plain, parse_config, parse_germ, parse_graph, parse_poly,
                         serialize_germ, serialize_graph, to_plain)
from foliated.rational import NEG_INF


def normalize(text: str) -> str:
    lines = [l.split("#", 1)[0].rstrip() for l in text.splitlines()]
    return "\n".join(l for l in lines if l) + "\n"


def test_one_vertex():
    g = parse_graph("curve E1 self=-2 genus=0 invariant Z=1")
    assert len(g) == 1
    v = g.vertex("E1")
    assert (v.self_int, v.genus, v.z) == (-2, 0, 1)


def test_dangling_edge():
    with pytest.raises(ParseError) as err:
        parse_graph("curve E1 self=-2 genus=0 invariant Z=1\nedge E1 E9\n")
    assert (err.value.line, err.value.column) == (2, 9)
    assert "E9" in err.value.message


def test_duplicate_ids():
    text = "curve A self=-2 genus=0 invariant Z=1\nboundary A coeff=1/2\n"
    with pytest.raises(ParseError) as err:
        parse_graph(text)
    assert err.value.line == 2


@pytest.mark.parametrize("text, line, col", [
    ("curve A self=-2 genus=0 invariant Z=x", 1, 37),
    ("curve A self=-2 genus=0 sideways Z=1", 1, 25),
    ("curve A self=-2", 1, 1),
    ("# fine\nwibble A", 2, 1),
    ("curve A self=-2 genus=0 invariant Z=1\nboundary B coeff=0.5", 2, 18),
    ("curve A self=-2 genus=0 invariant Z=1\nboundary B coeff=1/0", 2, 18),
    ("curve A self=-2 genus=0 invariant Z=1\nedge A A mult=two", 2, 15),
    ("curve A self=-2 genus=0 invariant Z=1\nmeets B A mult=1", 2, 7),
    ("curve A self=-2 genus=0 invariant Z=1\npoint p kind=corner at=A", 2, 21),
    ("curve A self=-2 genus=0 invariant Z=1\npoint p kind=odd at=A", 2, 14),
])
def test_syntax_errors_located(text, line, col):
    with pytest.raises(ParseError) as err:
        parse_graph(text)
    assert (err.value.line, err.value.column) == (line, col)


def test_full_grammar():
    text = """
    # comment line
    curve A self=-3 genus=0 invariant Z=1   # trailing comment
    curve T self=-2 genus=1 transverse tang=2
    edge A T mult=2 sing=false
    boundary B coeff=2/3 invariant
    meets B A mult=1
    point p kind=reduced1 at=A bmult B=1
    """
    parsed = parse_config(text)
    g = parsed.graph
    assert g.vertex("T").tang == 2 and g.vertex("T").genus == 1
    assert g.mult("A", "T") == 2
    b = g.boundary_component("B")
    assert b.coeff == Fraction(2, 3) and b.invariant and b.meets == (("A", 1),)
    assert parsed.points[0].bmult == (("B", 1),)


def test_corpus_round_trip(corpus_dir):
    files = sorted(corpus_dir.glob("*.graph"))
    assert len(files) >= 10
    for path in files:
        text = path.read_text()
        parsed = parse_config(text)
        assert serialize_graph(parsed.graph, parsed.points) == normalize(text), path.name


def test_germ_parsing():
    v = parse_germ("P = x + 1/2*x^2*y\nQ = -y^3 - 3*x*y\n")
    assert _coeffs(v.P) == {(1, 0): 1, (2, 1): Fraction(1, 2)}
    assert _coeffs(v.Q) == {(0, 3): -1, (1, 1): -3}


def test_germ_round_trip(corpus_dir):
    for path in sorted(corpus_dir.glob("*.germ")):
        v = parse_germ(path.read_text())
        again = parse_germ(serialize_germ(v))
        assert (again.P, again.Q) == (v.P, v.Q)
        assert serialize_germ(again) == serialize_germ(v)


@pytest.mark.parametrize("text", ["P = x\n", "P = x\nP = y\nQ = x\n", "P = x\nR = y\n",
                                  "P = 2x + \nQ = y", "P = 0.5*x\nQ = y", "P = x^\nQ = y"])
def test_germ_errors(text):
    with pytest.raises(ParseError):
        parse_germ(text)


def test_poly_terms():
    assert parse_poly("x*y - 2*x^3 + 5") == {(1, 1): 1, (3, 0): -2, (0, 0): 5}
    assert parse_poly("-x + x") == {}
    assert parse_poly("3/4 y^2") == {(0, 2): Fraction(3, 4)}


def test_report_round_trip():
    rep = RunReport("discrep", RunReport.digest_of(b"abc"),
                    {"a": {"E1": Fraction(5, 12)}, "n": 3, "ok": True, "mld": NEG_INF, "vals": [Fraction(1, 2), 0]})
    text = rep.to_json()
    raw = json.loads(text)
    assert raw["results"]["a"]["E1"] == "5/12" and raw["results"]["n"] == 3
    assert "timestamp" not in raw
    back = RunReport.from_json(text)
    assert back == rep
    assert back.to_json() == text


def test_report_timestamp_optional():
    rep = RunReport("pld", "00", {}, "2026-01-01T00:00:00+00:00")
    assert json.loads(rep.to_json())["timestamp"] == "2026-01-01T00:00:00+00:00"


# --- properties ------------------------------------------------------------------

ids = st.text("ABCDEFGH", min_size=1, max_size=3)


@st.composite
def graphs(draw):
    names = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
    vs = []
    for n in names:
        w = draw(st.integers(1, 6))
        vs.append(trans(n, w, draw(st.integers(0, 3))) if draw(st.booleans())
                  else inv(n, w, draw(st.integers(0, 3)), draw(st.integers(0, 1))))
    es = []
    for k in range(1, len(names)):
        es.append(Edge(names[draw(st.integers(0, k - 1))], names[k], draw(st.integers(1, 2))))
    bs = []
    for k in range(draw(st.integers(0, 2))):
        c = draw(st.fractions(0, 1, max_denominator=7))
        bs.append(BoundaryComponent(f"b{k}", c, {draw(st.sampled_from(names)): draw(st.integers(1, 3))},
                                    draw(st.booleans())))
    return FoliatedDualGraph(tuple(vs), tuple(es), tuple(bs))


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_serialize_parse_identity(g):
    text = serialize_graph(g)
    assert parse_graph(text) == g
    assert serialize_graph(parse_graph(text)) == text


@settings(max_examples=100, deadline=None)
@given(st.recursive(st.one_of(st.integers(-50, 50), st.fractions(max_denominator=40), st.booleans(),
                              st.none(), st.just(NEG_INF), st.sampled_from(["Terminal", "E1"])),
                    lambda inner: st.one_of(st.lists(inner, max_size=4),
                                            st.dictionaries(st.sampled_from("abc"), inner, max_size=3)),
                    max_leaves=12))
def test_plain_round_trip(x):
    norm = lambda y: Fraction(y) if isinstance(y, Fraction) else y
    back = from_plain(json.loads(json.dumps(to_plain(x))))

    def same(a, b):
        if isinstance(a, list):
            return isinstance(b, list) and len(a) == len(b) and all(same(p, q) for p, q in zip(a, b))
        if isinstance(a, dict):
            return a.keys() == b.keys() and all(same(a[k], b[k]) for k in a)
        return a == b and type(a) is type(b) or (isinstance(a, Fraction) and b == a)

    assert same(x, back)
