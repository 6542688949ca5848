"""Command line entry point: ``foliated <command> [options]``.

Exit status 0 means success, 1 a mathematical impossibility (for instance a
matrix that is not negative definite), 2 malformed input or arguments.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .errors import DomainError, ParseError
from .rational import NEG_INF, approx, fmt, parse_rational


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an exact rational p/q, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        k = 0
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return k


def _range_arg(text: str) -> tuple:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 0 <= A <= B, got {text!r}")
    return lo, hi


class _Out:
    """Collects the structured payload and the human-readable lines."""

    def __init__(self, approx_mode: bool):
        self.approx = approx_mode
        self.results: dict = {}
        self.lines: list = []

    def num(self, x) -> str:
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool) or x is NEG_INF:
            return approx(x) if self.approx else fmt(x)
        return str(x)

    def table(self, header, rows):
        cells = [list(header)] + [[self.num(c) for c in r] for r in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            self.lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())

    def kv(self, key, value):
        self.lines.append(f"{key}: {self.num(value)}")


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not UTF-8: {exc.reason}") from None


# --- graph commands ---------------------------------------------------------------

def _graph(args):
    from .io import parse_config

    data = _read(args.file)
    return parse_config(_decode(data)), data


def cmd_classify(args, out):
    from .classifier import classify

    parsed, data = _graph(args)
    res = classify(parsed.graph)
    out.results = {"type": res.name, "witness": res.witness}
    out.lines.append(res.name)
    for k, v in res.witness.items():
        out.lines.append(f"  {k}: {v}")
    return data


def cmd_discrep(args, out):
    from .discrepancy import discrepancies

    parsed, data = _graph(args)
    g = parsed.graph
    rep = discrepancies(g)
    out.results = {"a": rep.a, "log_disc": rep.log_disc, "status": rep.status.value,
                   "pld": rep.pld, "good_lc": rep.good_lc}
    out.table(["curve", "a", "log_disc"], [[v, rep.a[v], rep.log_disc[v]] for v in g.ids])
    out.kv("status", rep.status.value)
    out.kv("pld", rep.pld)
    return data


def cmd_status(args, out):
    from .classifier import thm_consistency
    from .discrepancy import discrepancies

    parsed, data = _graph(args)
    rep = discrepancies(parsed.graph)
    try:
        warnings = thm_consistency(parsed.graph, rep)
    except DomainError as exc:
        warnings = [str(exc)]
    out.results = {"status": rep.status.value, "good_lc": rep.good_lc, "warnings": warnings}
    out.kv("status", rep.status.value)
    out.kv("good_lc", "n/a" if rep.good_lc is None else str(rep.good_lc).lower())
    for w in warnings:
        out.lines.append(f"warning: {w}")
    return data


def cmd_pld(args, out):
    from .discrepancy import discrepancies

    parsed, data = _graph(args)
    rep = discrepancies(parsed.graph, with_good_lc=False)
    out.results = {"pld": rep.pld, "min_log_disc": rep.min_log_disc}
    out.kv("pld", rep.pld)
    out.kv("min_log_disc", rep.min_log_disc)
    return data


def cmd_mld(args, out):
    from .blowup import GermConfig, mld, mld_of_graph
    from .discrepancy import Status, discrepancies

    parsed, data = _graph(args)
    use = not args.no_shortcut
    if parsed.points:
        rep = discrepancies(parsed.graph, with_good_lc=False)
        if rep.status is Status.NOT_LC:
            res = mld_of_graph(parsed.graph, args.depth, args.epsilon, use)
        else:
            cfg = GermConfig(parsed.graph, tuple(parsed.points), dict(rep.a))
            res = mld(cfg, args.depth, args.epsilon, use, rep)
    else:
        res = mld_of_graph(parsed.graph, args.depth, args.epsilon, use)
    out.results = {"mld": res.value, "certified": res.certified, "source": res.source,
                   "explored": res.explored, "uncertified_states": len(res.uncertified)}
    out.kv("mld", res.value)
    out.kv("certified", str(res.certified).lower())
    out.kv("source", res.source)
    out.kv("explored", res.explored)
    return data


def cmd_gap(args, out):
    from .discrepancy import variety_gap

    parsed, data = _graph(args)
    b = variety_gap(parsed.graph).b
    out.results = {"b": b}
    out.table(["curve", "b"], [[v, b[v]] for v in parsed.graph.ids])
    return data


# --- families and scans -------------------------------------------------------------

def _csv(rows, approx_mode: bool) -> str:
    from .chains import CSV_COLUMNS, rows_to_csv

    if not approx_mode:
        return rows_to_csv(rows)
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(approx(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _row_dicts(rows) -> list:
    from .chains import CSV_COLUMNS

    return [{c: getattr(r, c) for c in CSV_COLUMNS} for r in rows]


def _args_digest_input(args) -> bytes:
    skip = {"json", "approx", "timestamp"}
    return repr(sorted((k, str(v)) for k, v in vars(args).items() if k not in skip)).encode()


def cmd_family(args, out):
    from .chains import CSV_COLUMNS, family_rows

    lo, hi = args.n
    try:
        rows = family_rows(args.m1, args.q1, args.m2, args.q2, args.alphaL, args.alphaR, lo, hi)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    out.results = {"rows": _row_dicts(rows)}
    if args.csv:
        out.lines.append(_csv(rows, out.approx).rstrip("\n"))
    else:
        out.table(CSV_COLUMNS, [[getattr(r, c) for c in CSV_COLUMNS] for r in rows])
    return _args_digest_input(args)


def cmd_acc_scan(args, out):
    from .chains import AccGrid, acc_scan, increasing_runs, standard_grid, theoretical_max_run
    from .verify import ACC_COEFFICIENTS

    if args.spec:
        data = _read(args.spec)
        try:
            grid = AccGrid.from_json(_decode(data))
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"bad scan spec: {exc}") from None
    else:
        grid = standard_grid(ACC_COEFFICIENTS)
        data = b"standard grid"
    rows = acc_scan(grid, jobs=args.jobs)
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.m1, r.q1, r.m2, r.q2, r.layout, r.coeffs), []).append(r)
    runs = increasing_runs(rows)
    limit = grid.max_run
    worst = []
    for key, run in runs.items():
        bound = limit if limit is not None else theoretical_max_run(groups[key], grid.coefficients)
        if run > bound:
            worst.append({"group": [str(x) for x in key], "run": run, "bound": bound})
    plds = sorted({r.pld for r in rows if r.lc})
    out.results = {"rows": len(rows), "distinct_pld": len(plds), "longest_run": max(runs.values(), default=0),
                   "violations": worst}
    if args.csv:
        out.lines.append(_csv(rows, out.approx).rstrip("\n"))
    else:
        out.kv("rows", len(rows))
        out.kv("distinct pld values", len(plds))
        out.kv("longest increasing run", max(runs.values(), default=0))
        out.kv("groups over their bound", len(worst))
    return data


# --- germs ---------------------------------------------------------------------------

def _germ(args):
    from .io import parse_germ

    data = _read(args.file)
    return parse_germ(_decode(data)), data


def _curve(args):
    from .germ import _poly
    from .io import parse_poly

    if not args.curve:
        raise ParseError("--curve is required for this command")
    return _poly(parse_poly(args.curve))


def _eigen_text(e, out) -> str:
    if e is None:
        return "not followed"
    lam = e.lam
    if lam is None:
        shown = "none"
    elif isinstance(lam, Fraction):
        shown = out.num(lam)
    else:
        shown = f"root ratio of t^2 - {out.num(lam.trace)} t + {out.num(lam.det)}"
    return f"{e.kind} lambda={shown} {'reduced' if e.reduced else 'not reduced'}"


def cmd_germ(args, out):
    from .germ import cs_index, seidenberg_reduce, tang, z_index

    v, data = _germ(args)
    if args.action == "indices":
        f = _curve(args)
        z, cs = z_index(v, f), cs_index(v, f)
        out.results = {"Z": z, "CS": cs}
        out.kv("Z", z)
        out.kv("CS", cs)
    elif args.action == "tang":
        f = _curve(args)
        t = tang(v, f)
        out.results = {"tang": t}
        out.kv("tang", t)
    else:
        tree = seidenberg_reduce(v, args.max_depth)
        nodes = []

        def walk(node, indent):
            e = node.eigen
            desc = _eigen_text(e, out) + (f" ({node.note})" if node.note else "")
            if node.blown_up and not node.children:
                desc += " (blown up, no singular points left)"
            out.lines.append("  " * indent + f"depth {node.depth}: {desc}")
            nodes.append({"depth": node.depth, "kind": e.kind if e else None,
                          "reduced": e.reduced if e else None, "note": node.note,
                          "blown_up": node.blown_up})
            for c in node.children:
                walk(c, indent + 1)

        walk(tree.root, 0)
        out.results = {"success": tree.success, "depth": tree.depth, "leaves": len(tree.root.leaves),
                       "nodes": nodes}
        out.kv("success", str(tree.success).lower())
        out.kv("blowup depth", tree.depth)
    return data


# --- verify ---------------------------------------------------------------------------

def cmd_verify(args, out):
    from .verify import run_all

    results = run_all(args.seed, quick=not args.full)
    out.results = {"suites": [{"name": r.name, "passed": r.passed, "checked": r.checked,
                               "failures": r.failures[:5]} for r in results]}
    for r in results:
        out.lines.append(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise _VerifyFailed(out, ", ".join(failed))
    return _args_digest_input(args)


class _VerifyFailed(DomainError):
    def __init__(self, out, names):
        self.out = out
        super().__init__(f"suites failed: {names}")


# --- plumbing -------------------------------------------------------------------------

COMMANDS = {
    "classify": cmd_classify,
    "discrep": cmd_discrep,
    "status": cmd_status,
    "pld": cmd_pld,
    "mld": cmd_mld,
    "gap": cmd_gap,
    "family": cmd_family,
    "acc-scan": cmd_acc_scan,
    "germ": cmd_germ,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured report on stdout")
    common.add_argument("--approx", action="store_true", help="decimal rendering of rationals")
    common.add_argument("--timestamp", action="store_true", help="add a timestamp to --json reports")

    p = _Parser(prog="foliated", description="Exact invariants of foliated surface germs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("classify", "type of the dual graph"),
                           ("discrep", "discrepancies of every curve"),
                           ("status", "terminal / canonical / lc status"),
                           ("pld", "minimal nonzero log discrepancy on the resolution"),
                           ("gap", "coefficients of K_F - K_X over the exceptional curves")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file", help="graph file, or - for stdin")

    s = sub.add_parser("mld", parents=[common], help="minimal log discrepancy by bounded search")
    s.add_argument("file")
    s.add_argument("--depth", type=_positive, default=2)
    s.add_argument("--epsilon", type=_rational_arg, default=Fraction(1, 4))
    s.add_argument("--no-shortcut", action="store_true", help="always search, even on long chains")

    s = sub.add_parser("family", parents=[common], help="closed-form chain family table")
    for k in ("m1", "q1", "m2", "q2"):
        s.add_argument(f"--{k}", type=int, required=True)
    s.add_argument("--alphaL", type=_rational_arg, default=Fraction(1))
    s.add_argument("--alphaR", type=_rational_arg, default=Fraction(0))
    s.add_argument("--n", type=_range_arg, default=(1, 10), metavar="A..B")
    s.add_argument("--csv", action="store_true")

    s = sub.add_parser("acc-scan", parents=[common], help="pld stabilization scan over a family grid")
    s.add_argument("--spec", help="JSON grid description (default: the standard grid)")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--jobs", type=_positive, default=1)

    s = sub.add_parser("germ", parents=[common], help="local vector field computations")
    s.add_argument("action", choices=("indices", "tang", "reduce"))
    s.add_argument("file", help="germ file with P = ... and Q = ...")
    s.add_argument("--curve", help='curve equation, e.g. "y - x^2"')
    s.add_argument("--max-depth", type=_positive, default=20)

    s = sub.add_parser("verify", parents=[common], help="run the cross-check suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--full", action="store_true", help="full-size suites (slow)")
    return p


def _emit(args, out, data: bytes):
    from .io import RunReport

    if args.json:
        stamp = datetime.now(timezone.utc).isoformat() if args.timestamp else None
        rep = RunReport(args.command, RunReport.digest_of(data), out.results, stamp)
        print(rep.to_json())
    else:
        for line in out.lines:
            print(line)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(args.approx)
    try:
        data = COMMANDS[args.command](args, out)
    except ParseError as exc:
        where = f"{getattr(args, 'file', None) or getattr(args, 'spec', None) or '<input>'}:"
        if exc.line:
            where += f"{exc.line}:{exc.column}:"
        print(f"foliated: parse error: {where} {exc.message}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"foliated: cannot read input: {exc}", file=sys.stderr)
        return 2
    except _VerifyFailed as exc:
        _emit(args, exc.out, b"verify")
        print(f"foliated: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"foliated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, out, data)
    return 0


if __name__ == "__main__":
    sys.exit(main())
