"""Command-line front end.

Results go to standard output (or ``--out``), diagnostics to standard error.
Exit status: 0 success, 1 usage error, 2 data or certification error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import bounds as _bounds
from . import paircorr, zero_engine, zero_store
from .errors import ZpcError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().rstrip()}")

    def exit(self, status=0, message=None):
        # --help lands here; anything else is routed through error()
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


# ---------------------------------------------------------------- flag types

def _float_at_least(lo, strict=False):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
        if not math.isfinite(v) or (v <= lo if strict else v < lo):
            raise argparse.ArgumentTypeError(f"must be {'>' if strict else '>='} {lo:g}, got {text}")
        return v
    return conv


def _int_at_least(lo):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return conv


def _default_threads() -> int:
    raw = os.environ.get("ZPC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------- io helpers

def load_zero_file(path) -> zero_store.ZeroSet:
    """Native files are recognised by their header; anything else is read as
    one ordinate per line."""
    with open(path, "rb") as fh:
        head = fh.readline().strip()
    if head == zero_store.NATIVE_VERSION.encode():
        return zero_store.load_native(path)
    return zero_store.ingest_odlyzko(path)


def _csv_rows(result: dict):
    if "table" in result:
        return result["table"]
    rows = [["key", "value"]]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(obj, list):
            rows.append([prefix, json.dumps(obj)])
        else:
            rows.append([prefix, repr(obj) if isinstance(obj, float) else obj])

    walk("", result)
    return rows


def _strict(obj):
    # JSON has no infinity; unbounded windows are reported as null
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _strict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_strict(v) for v in obj]
    return obj


def render(result: dict, fmt: str) -> str:
    if fmt == "json":
        body = _strict({k: v for k, v in result.items() if k != "table"})
        return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"
    rows = _csv_rows(result)
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    cells = [[f"{c:.10g}" if isinstance(c, float) else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells if i < len(r)) for i in range(max(map(len, cells)))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _set_summary(zs: zero_store.ZeroSet) -> dict:
    return {"records": len(zs), "weighted_count": zs.weighted_count(), "t_min": zs.t_min,
            "t_max": zs.t_max, "complete": zs.complete,
            "certificate": zs.certificate.to_dict() if zs.certificate else None}


# ---------------------------------------------------------------- commands

def cmd_zeros_compute(a):
    if not a.t_min < a.t_max:
        raise UsageError("zeros compute: --t-min must be below --t-max")
    cfg = zero_engine.ScanConfig(a.t_min, a.t_max, refine_tol=a.tol, threads=a.threads)
    zs = zero_engine.scan_zeros(cfg)
    zero_store.save_native(zs, a.out)
    return {"out": str(a.out), **_set_summary(zs)}


def cmd_zeros_ingest(a):
    zs = zero_store.ingest_odlyzko(a.inp)
    zero_store.save_native(zs, a.out)
    return {"out": str(a.out), **_set_summary(zs)}


def cmd_zeros_export(a):
    zs = load_zero_file(a.zeros)
    if a.as_ == "odlyzko":
        zero_store.write_odlyzko(zs, a.out)
    else:
        Path(a.out).write_text(zero_store.to_csv(zs), encoding="utf-8")
    return {"out": str(a.out), **_set_summary(zs)}


def cmd_stats_count(a):
    zs = load_zero_file(a.zeros)
    if not zs.covers(0.0, a.t):
        raise ZpcError(f"zero set does not cover (0, {a.t}]")
    found = zs.count(a.t)
    main_terms = paircorr.nt_formula(a.t)
    theta = zero_engine.n_theta(a.t)
    return {"T": a.t, "count": found, "main_terms": main_terms, "difference": found - main_terms,
            "log_T": math.log(a.t), "theta_count": theta, "theta_difference": found - theta}


def cmd_stats_fejer(a):
    zs = load_zero_file(a.zeros)
    res = paircorr.fejer_double_sum(zs, a.t, a.window, threads=a.threads)
    out = res.to_dict()
    out["distance_to_4_3"] = res.ratio - 4.0 / 3.0
    if a.integral_check:
        integ = paircorr.fejer_integral_form(zs, a.t, window=a.window)
        out["integral_form"] = {"value": integ.value, "error_estimate": integ.error_estimate,
                                "nodes": integ.nodes,
                                "relative_deviation": abs(integ.value - res.total) / res.total}
    return out


def cmd_stats_paircorr(a):
    zs = load_zero_file(a.zeros)
    h = paircorr.pcc_histogram(zs, a.lambda_max, a.bins)
    table = [["bin_lo", "bin_hi", "empirical", "predicted", "raw_count"]]
    for i in range(len(h.empirical)):
        table.append([h.bin_edges[i], h.bin_edges[i + 1], h.empirical[i], h.predicted[i], h.raw_counts[i]])
    return {**h.to_dict(), "table": table}


def cmd_stats_es(a):
    zs = load_zero_file(a.zeros)
    T = float(zs.gammas.max()) if len(zs) else 0.0
    if T < 10:
        raise ZpcError("zero set must reach height 10")
    count, ratio = paircorr.es_pair_count(zs, T, a.lam)
    return {"lambda": a.lam, "T": T, "count": count, "ratio": ratio}


def cmd_stats_decompose(a):
    zs = load_zero_file(a.zeros)
    d = paircorr.decompose_horizontal_pairs(zs)
    pairs, msq, m = paircorr.lower_bound_chain(zs)
    return {**d.to_dict(), "chain": {"same_ordinate_pairs": pairs, "sum_m_over_zeros": msq,
                                     "zeros_with_multiplicity": m, "records": len(zs)}}


def cmd_synth_build(a):
    spec = zero_store.SyntheticSpec.from_json(json.loads(Path(a.spec).read_text(encoding="utf-8")))
    zs = zero_store.build_synthetic(spec)
    zero_store.save_native(zs, a.out)
    return {"out": str(a.out), **_set_summary(zs)}


def cmd_bounds(a):
    if a.c is None:
        raise UsageError("bounds: give --c C or the 'box' subcommand")
    return _bounds.theorem2_bounds(a.c).to_dict()


def cmd_bounds_box(a):
    zs = load_zero_file(a.zeros)
    return _bounds.theorem3_report(zs, a.b, a.t).to_dict()


# ---------------------------------------------------------------- parser

def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--threads", type=_int_at_least(1), default=_default_threads(),
                        help="worker threads (default: $ZPC_THREADS or 1)")

    threads_only = _Parser(add_help=False)
    threads_only.add_argument("--threads", type=_int_at_least(1), default=_default_threads())

    p = _Parser(prog="zpc", description="Zeta zeros and pair-correlation statistics.")
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    zeros = top.add_parser("zeros", help="compute, ingest or export zero sets")
    zsub = zeros.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = zsub.add_parser("compute", parents=[common])
    c.add_argument("--t-min", type=_float_at_least(10), required=True)
    c.add_argument("--t-max", type=_float_at_least(10, strict=True), required=True)
    c.add_argument("--tol", type=_float_at_least(0, strict=True), default=1e-9)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_zeros_compute, writes_file=True)
    i = zsub.add_parser("ingest", parents=[threads_only])
    i.add_argument("--format", dest="in_format", choices=("odlyzko",), default="odlyzko")
    i.add_argument("--in", dest="inp", required=True)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_zeros_ingest, writes_file=True, format="json")
    e = zsub.add_parser("export", parents=[common])
    e.add_argument("--zeros", required=True)
    e.add_argument("--as", dest="as_", choices=("odlyzko", "csv"), default="csv")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_zeros_export, writes_file=True)

    stats = top.add_parser("stats", help="pair statistics on a zero set")
    ssub = stats.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = ssub.add_parser("count", parents=[common])
    s.add_argument("--t", type=_float_at_least(10), required=True)
    s.add_argument("--zeros", required=True)
    s.set_defaults(func=cmd_stats_count)
    s = ssub.add_parser("fejer", parents=[common])
    s.add_argument("--t", type=_float_at_least(10), required=True)
    s.add_argument("--window", choices=("0T", "T2T"), default="0T")
    s.add_argument("--zeros", required=True)
    s.add_argument("--integral-check", action="store_true")
    s.set_defaults(func=cmd_stats_fejer)
    s = ssub.add_parser("paircorr", parents=[common])
    s.add_argument("--lambda-max", type=_float_at_least(0, strict=True), required=True)
    s.add_argument("--bins", type=_int_at_least(4), required=True)
    s.add_argument("--zeros", required=True)
    s.set_defaults(func=cmd_stats_paircorr)
    s = ssub.add_parser("es", parents=[common])
    s.add_argument("--lambda", dest="lam", type=_float_at_least(0, strict=True), required=True)
    s.add_argument("--zeros", required=True)
    s.set_defaults(func=cmd_stats_es)
    s = ssub.add_parser("decompose", parents=[common])
    s.add_argument("--zeros", required=True)
    s.set_defaults(func=cmd_stats_decompose)
    for sp in ssub.choices.values():
        sp.add_argument("--out")

    synth = top.add_parser("synth", help="synthetic zero configurations")
    ysub = synth.add_subparsers(dest="action", required=True, parser_class=_Parser)
    y = ysub.add_parser("build", parents=[common])
    y.add_argument("--spec", required=True)
    y.add_argument("--out", required=True)
    y.set_defaults(func=cmd_synth_build, writes_file=True)

    b = top.add_parser("bounds", parents=[common], help="proportion bounds")
    b.add_argument("--c", type=float)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)
    bsub = b.add_subparsers(dest="action", parser_class=_Parser)
    bx = bsub.add_parser("box", parents=[common])
    bx.add_argument("--b", type=_float_at_least(0, strict=True), required=True)
    bx.add_argument("--t", type=_float_at_least(10), required=True)
    bx.add_argument("--zeros", required=True)
    bx.add_argument("--out")
    bx.set_defaults(func=cmd_bounds_box)
    for leaf in (*zsub.choices.values(), *ssub.choices.values(), *ysub.choices.values(), b, bx):
        leaf.set_defaults(usage=leaf.format_usage().rstrip())
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        try:
            result = args.func(args)
        except UsageError as exc:
            raise UsageError(f"{exc}\n{args.usage}") from None
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ZpcError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA
    text = render(result, getattr(args, "format", "json"))
    # commands that persist a data file report their summary on stdout
    _emit(text, None if getattr(args, "writes_file", False) else getattr(args, "out", None))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
