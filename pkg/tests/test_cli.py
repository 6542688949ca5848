import io
import json

import pytest

from foliated.cli import main

def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_discrep_chain(capsys, corpus_dir):
    code, out, _ = run(capsys, "discrep", str(corpus_dir / "t1_chain323.graph"))
    assert code == 0
    assert "5/12" in out and "1/4" in out and "1/12" in out
    assert "status: Terminal" in out and "pld: 1/12" in out


def test_stdin(capsys, monkeypatch, corpus_dir):
    text = (corpus_dir / "t1_chain323.graph").read_text()
    code, out, _ = run(capsys, "classify", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 0 and "T1_GChain" in out


def test_classify_cycle(capsys, corpus_dir):
    code, out, _ = run(capsys, "classify", str(corpus_dir / "t5_egl_cycle.graph"))
    assert code == 0 and "T5_EGL" in out


def test_approx(capsys, corpus_dir):
    code, out, _ = run(capsys, "discrep", "--approx", str(corpus_dir / "t1_chain323.graph"))
    assert code == 0 and "0.416667" in out and "5/12" not in out


def test_json_deterministic(capsys, corpus_dir):
    path = str(corpus_dir / "t1_chain323.graph")
    _, a, _ = run(capsys, "discrep", "--json", path)
    _, b, _ = run(capsys, "discrep", "--json", path)
    assert a == b
    rep = json.loads(a)
    assert rep["command"] == "discrep" and len(rep["input_digest"]) == 64
    assert "timestamp" not in rep
    assert rep["results"]["pld"] == "1/12"
    _, c, _ = run(capsys, "discrep", "--json", "--timestamp", path)
    assert "timestamp" in json.loads(c)


def test_not_definite_exits_1(capsys, monkeypatch):
    text = "curve E1 self=-1 genus=0 invariant Z=1\ncurve E2 self=-1 genus=0 invariant Z=1\nedge E1 E2\n"
    code, _, err = run(capsys, "discrep", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 1 and err


def test_parse_error_exits_2(capsys, monkeypatch):
    code, _, err = run(capsys, "discrep", "-", stdin="curve E1 self=-2 genus=0 invariant Z=1\nedge E1 E9\n",
                       monkeypatch=monkeypatch)
    assert code == 2 and "2:9" in err and "E9" in err


def test_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "status", str(tmp_path / "nope.graph"))
    assert code == 2 and err


@pytest.mark.parametrize("argv", [["--depth", "0"], ["--epsilon", "0.3"], ["--bogus"]])
def test_bad_argument_exits_2(capsys, corpus_dir, argv):
    with pytest.raises(SystemExit) as ex:
        main(["mld", *argv, str(corpus_dir / "points_chain.graph")])
    assert ex.value.code == 2


def test_status_not_lc(capsys, corpus_dir):
    code, out, _ = run(capsys, "status", str(corpus_dir / "not_lc.graph"))
    assert code == 0 and "NotLC" in out


def test_mld_points(capsys, corpus_dir):
    code, out, _ = run(capsys, "mld", str(corpus_dir / "points_chain.graph"))
    assert code == 0 and "mld: 1/10" in out and "certified: true" in out


def test_gap_and_pld(capsys, corpus_dir):
    code, out, _ = run(capsys, "pld", "--json", str(corpus_dir / "t5_egl_cycle.graph"))
    assert code == 0 and json.loads(out)["results"]["pld"] == "0"
    code, out, _ = run(capsys, "gap", str(corpus_dir / "t1_chain323.graph"))
    assert code == 0 and out.strip()


def test_family_csv(capsys):
    argv = ["family", "--m1", "3", "--q1", "1", "--m2", "3", "--q2", "1", "--n", "1..3", "--csv"]
    code, out, _ = run(capsys, *argv)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4
    assert lines[1] == "3,1,3,1,1,1,0,12,5/12,1/12,1/12,0"
    assert [l.split(",")[7] for l in lines[1:]] == ["12", "16", "20"]


def test_family_digest_ignores_output_flags(capsys):
    base = ["family", "--m1", "3", "--q1", "1", "--m2", "2", "--q2", "1", "--n", "1..2", "--json"]
    _, a, _ = run(capsys, *base)
    _, b, _ = run(capsys, *base, "--approx")
    assert json.loads(a)["input_digest"] == json.loads(b)["input_digest"]


def test_acc_scan_spec(capsys, tmp_path):
    spec = tmp_path / "grid.json"
    spec.write_text(json.dumps({"pairs": [[2, 1, 3, 1], [3, 2, 3, 1]], "n": [1, 6],
                                "coefficients": ["1/2"], "layouts": [[], [[[-1], []]]]}))
    code, out, _ = run(capsys, "acc-scan", "--spec", str(spec), "--csv")
    assert code == 0 and len(out.strip().splitlines()) == 1 + 2 * 6 * 2
    _, again, _ = run(capsys, "acc-scan", "--spec", str(spec), "--csv", "--jobs", "2")
    assert again == out


def test_acc_scan_bad_spec(capsys, tmp_path):
    spec = tmp_path / "grid.json"
    spec.write_text("{not json")
    code, _, _ = run(capsys, "acc-scan", "--spec", str(spec))
    assert code == 2


def test_germ_commands(capsys, corpus_dir):
    code, out, _ = run(capsys, "germ", "indices", str(corpus_dir / "linear_half.germ"), "--curve", "y")
    assert code == 0 and "Z: 1" in out and "CS: 1/2" in out
    code, _, err = run(capsys, "germ", "tang", str(corpus_dir / "saddle_node.germ"), "--curve", "y")
    assert code == 1 and "infinite" in err.lower()
    code, out, _ = run(capsys, "germ", "tang", str(corpus_dir / "saddle_node.germ"), "--curve", "y - x")
    assert code == 0
    code, out, _ = run(capsys, "germ", "reduce", str(corpus_dir / "cusp.germ"))
    assert code == 0 and "success: true" in out and "blowup depth: 3" in out


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines and all(l.startswith("PASS") for l in lines)


def test_version(capsys):
    with pytest.raises(SystemExit) as ex:
        main(["--version"])
    assert ex.value.code == 0
