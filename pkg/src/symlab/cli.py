"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 capacity error, 3 acceptance failure.
Settings come from an optional TOML config file (``--config``); flags given
on the command line override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import acceptance, expsums, lemma
from .arith import CATALOG_NAMES, CapacityError, catalog, dirichlet_convolve
from .integrals import (
    RoundingError,
    correlation_fast,
    correlation_naive,
    dispersion_residual,
    mean_value,
    selberg_integral,
    symmetry_integral_exact,
    window_segment,
)
from .sweep import (
    doubling_family,
    format_value,
    json_value,
    records_to_csv,
    records_to_json,
    sweep_grid,
)

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_ACCEPTANCE = 0, 1, 2, 3
THREADS_ENV = "SYMLAB_THREADS"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML file with default parameters")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    parser = _Parser(prog="symlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def window_args(p, need_h=True):
        p.add_argument("--g", choices=CATALOG_NAMES)
        p.add_argument("--N", type=int)
        if need_h:
            p.add_argument("--h", type=int)
        p.add_argument("--Q", type=int)

    p = sub.add_parser("sieve", help="dump f = g*1 on a segment")
    p.add_argument("--g", choices=CATALOG_NAMES)
    p.add_argument("--Q", type=int)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)

    p = sub.add_parser("correlate", help="correlation table C_f(a), 0 < |a| <= 2h")
    window_args(p)
    p.add_argument("--method", choices=("fast", "naive"))

    p = sub.add_parser("symmetry", help="I_f, J_f and the dispersion residual")
    window_args(p)

    p = sub.add_parser("expsum", help="Ramanujan, Kloosterman and Weil tables")
    p.add_argument("--weil", action="store_true", default=None, help="Weil-Estermann check table")
    p.add_argument("--ramanujan", action="store_true", default=None, help="direct vs closed Ramanujan sums")
    p.add_argument("--cmax", type=int)
    p.add_argument("--abmax", type=int)
    p.add_argument("--tmax", type=int)

    p = sub.add_parser("lemma", help="lemma statistics over a coprime grid")
    p.add_argument("--amin", type=int)
    p.add_argument("--amax", type=int)
    p.add_argument("--tmax", type=int)
    p.add_argument("--calibrate", action="store_true", default=None, help="also report C1, C2")

    p = sub.add_parser("sweep", help="experiment records over a (theta, lambda, N) grid")
    p.add_argument("--g", help="comma-separated catalog names")
    p.add_argument("--theta", help="comma-separated widths")
    p.add_argument("--lambda", dest="lam", help="comma-separated levels")
    p.add_argument("--kmin", type=int, help="smallest N = 2^kmin")
    p.add_argument("--kmax", type=int, help="largest N = 2^kmax")
    p.add_argument("--no-selberg", dest="selberg", action="store_false", default=None)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion function names")
    return parser


DEFAULTS = {
    "format": "json",
    "g": "moebius",
    "method": "fast",
    "cmax": 400,
    "abmax": 10,
    "tmax": 300,
    "amin": 2,
    "amax": 10,
    "theta": "0.45",
    "lam": "0.75",
    "kmin": 14,
    "kmax": 18,
    "selberg": True,
}


def resolve(args):
    """Merge defaults < config file (global and per-command tables) < flags."""
    cfg = {}
    if args.config:
        with open(args.config, "rb") as fh:
            data = tomllib.load(fh)
        cfg = {k: v for k, v in data.items() if not isinstance(v, dict)}
        cfg.update(data.get(args.command, {}))
        if "lambda" in cfg:
            cfg["lam"] = cfg.pop("lambda")
    merged = dict(DEFAULTS)
    merged.update(cfg)
    for k, v in vars(args).items():
        if v is not None:
            merged[k] = v
    if merged.get("threads") is None:
        merged["threads"] = _default_threads()
    return merged


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join("--" + k for k in missing))


def _emit_rows(cfg, header, rows, meta):
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(row[k]) if not isinstance(row[k], str) else row[k] for k in header])
        return buf.getvalue()
    payload = {"meta": {k: json_value(v) for k, v in meta.items()},
               "rows": [{k: json_value(row[k]) for k in header} for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


def cmd_sieve(cfg):
    _require(cfg, "Q", "lo", "hi")
    seg = dirichlet_convolve(catalog(cfg["g"], cfg["Q"]), cfg["lo"], cfg["hi"])
    rows = [{"n": n, "f": seg[n]} for n in range(seg.lo, seg.hi + 1)]
    return _emit_rows(cfg, ("n", "f"), rows, {"g": cfg["g"], "Q": cfg["Q"], "lo": seg.lo, "hi": seg.hi})


def cmd_correlate(cfg):
    _require(cfg, "N", "h", "Q")
    N, h = cfg["N"], cfg["h"]
    seg = window_segment(catalog(cfg["g"], cfg["Q"]), N, h)
    fn = correlation_fast if cfg["method"] == "fast" else correlation_naive
    table = fn(seg, N, h)
    rows = [{"a": a, "C_f": c} for a, c in table.as_dict().items()]
    meta = {"g": cfg["g"], "N": N, "h": h, "Q": cfg["Q"], "method": cfg["method"]}
    return _emit_rows(cfg, ("a", "C_f"), rows, meta)


def symmetry_record(g_label, N, h, Q):
    g = catalog(g_label, Q)
    seg = window_segment(g, N, h)
    I_f = symmetry_integral_exact(seg, N, h).value
    disp = dispersion_residual(seg, N, h, I_f=I_f)
    J_f = selberg_integral(seg, N, h, mean_value(g)).value
    return {
        "N": N,
        "h": h,
        "Q": Q,
        "label": g_label,
        "I_f": I_f,
        "J_f": J_f,
        "dispersion_sum": disp.weighted_sum,
        "residual": disp.residual,
        "residual_normalized": disp.normalized,
    }


SYMMETRY_FIELDS = ("N", "h", "Q", "label", "I_f", "J_f", "dispersion_sum", "residual",
                   "residual_normalized")


def cmd_symmetry(cfg):
    _require(cfg, "N", "h", "Q")
    rec = symmetry_record(cfg["g"], cfg["N"], cfg["h"], cfg["Q"])
    if cfg["format"] == "csv":
        return _emit_rows(cfg, SYMMETRY_FIELDS, [rec], {})
    return json.dumps({k: json_value(rec[k]) if k != "label" else rec[k] for k in SYMMETRY_FIELDS},
                      indent=2) + "\n"


def cmd_expsum(cfg):
    threads = cfg["threads"]
    if not cfg.get("weil") and not cfg.get("ramanujan"):
        cfg["weil"] = True
    if cfg.get("weil"):
        res = acceptance.weil_estermann(threads=threads, c_max=cfg["cmax"], ab_max=cfg["abmax"])
        rows = [{"check": "weil", **res.details, "passed": res.passed}]
        header = ("check", "sums", "violations", "min_slack", "passed")
    else:
        rows = []
        ns = list(range(0, cfg["tmax"] + 1))
        for t in range(1, cfg["tmax"] + 1):
            direct = expsums.ramanujan_row(t, ns)
            for n, d in zip(ns, direct.tolist()):
                closed = expsums.ramanujan_closed(t, n)
                rows.append({"t": t, "n": n, "direct": d, "closed": closed, "diff": abs(d - closed)})
        header = ("t", "n", "direct", "closed", "diff")
        res = None
    meta = {k: cfg[k] for k in ("cmax", "abmax", "tmax")}
    out = _emit_rows(cfg, header, rows, meta)
    if res is not None and not res.passed:
        raise AcceptanceFailure(out)
    return out


LEMMA_FIELDS = ("a", "t", "identity_residual", "bound1_stat", "bound2_stat", "j0_cos", "j0_sin")


def _lemma_row(pair):
    s = lemma.LemmaSample.from_pair(*pair)
    # identity over a thinned j set keeps grid runs fast; full j is in selftest
    js = lemma.j_range(s.t)[:: max(1, s.t // 64)]
    st = lemma.lemma_stats(s, js)
    return {k: getattr(st, k) for k in LEMMA_FIELDS}


def cmd_lemma(cfg):
    from concurrent.futures import ThreadPoolExecutor

    pairs = lemma.coprime_grid(cfg["amin"], cfg["amax"], cfg["tmax"])
    with ThreadPoolExecutor(max_workers=cfg["threads"]) as pool:
        rows = list(pool.map(_lemma_row, pairs))
    meta = {"amin": cfg["amin"], "amax": cfg["amax"], "tmax": cfg["tmax"]}
    if cfg.get("calibrate"):
        cal = lemma.calibrate()
        meta.update(C1=cal.C1, C2=cal.C2)
    return _emit_rows(cfg, LEMMA_FIELDS, rows, meta)


def cmd_sweep(cfg):
    labels = [x.strip() for x in str(cfg["g"]).split(",") if x.strip()]
    records = sweep_grid(
        _floats(cfg["theta"]),
        _floats(cfg["lam"]),
        doubling_family(cfg["kmin"], cfg["kmax"]),
        g_labels=labels,
        threads=cfg["threads"],
        selberg=cfg["selberg"],
    )
    return records_to_csv(records) if cfg["format"] == "csv" else records_to_json(records)


class AcceptanceFailure(Exception):
    def __init__(self, output):
        super().__init__("acceptance failure")
        self.output = output


def cmd_selftest(cfg):
    only = set(cfg["only"].split(",")) if cfg.get("only") else None
    results = acceptance.run_all(threads=cfg["threads"], only=only,
                                 log=lambda s: print(s, file=sys.stderr))
    text = acceptance.report(results)
    if not all(r.ok for r in results):
        raise AcceptanceFailure(text)
    return text


COMMANDS = {
    "sieve": cmd_sieve,
    "correlate": cmd_correlate,
    "symmetry": cmd_symmetry,
    "expsum": cmd_expsum,
    "lemma": cmd_lemma,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
}


def _write(cfg, text):
    if cfg.get("out"):
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    cfg = {}
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve(args)
        cfg["_given"] = {k: v for k, v in vars(args).items() if v is not None}
        text = COMMANDS[args.command](cfg)
    except AcceptanceFailure as exc:
        _write(cfg, exc.output)
        print(f"symlab: acceptance failure ({_describe(cfg)})", file=sys.stderr)
        return EXIT_ACCEPTANCE
    except (CapacityError, RoundingError) as exc:
        print(f"symlab: capacity error: {exc} ({_describe(cfg)})", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, KeyError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"symlab: error: {exc} ({_describe(cfg)})", file=sys.stderr)
        return EXIT_VALIDATION
    _write(cfg, text)
    return EXIT_OK


def _describe(cfg):
    given = cfg.get("_given")
    if not given:
        return "no parameters parsed"
    return ", ".join(f"{k}={v}" for k, v in given.items())


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
