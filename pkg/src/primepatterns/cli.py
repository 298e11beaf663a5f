"""Command-line front end.

    primepatterns correlate --family "0; y^2" --N 100 --weight lambda
    primepatterns beta --family "0; y; 2*y" --pmax 5 --format csv
    primepatterns weil --family "0; y" --pmax 500 --trials 50 --out audit.csv --format csv

Every JSON report carries the schema version, the package version and an
echo of the scientific parameters.  Execution details (threads, cache path,
timing) go to a sidecar ``<out>.meta.json`` so that reports stay
byte-identical across runs and thread counts.

Exit codes: 0 success, 2 invalid input or violated contract, 3 capacity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .arith_tables import ALL_FUNCTIONS, cached_table, small_primes
from .char_sum import RealCharacter, gcd_product_scan, weil_audit
from .correlation import (
    bateman_horn_scan,
    convergence_study,
    double_average,
    one_dim_average,
    required_bound,
)
from .errors import ArtifactError, CapacityError
from .gowers import interval_norm
from .local_density import beta_p_fixed, singular_series
from .local_to_global import (
    correlation_factorization,
    custom_table_spec,
    indicator_coprime_spec,
    lambda_p_spec,
    mean_product,
)
from .poly_family import check_hypotheses, parse_family
from .vinogradov import build, sample_triples, verify
from .w_model import SiegelConfig, ap_discrepancy, gowers_of_error, truncation_moment

SCHEMA = "primepatterns.report/1"
CACHE_ENV = "PRIMEPATTERNS_CACHE_DIR"
# parameters that affect how, not what, is computed; kept out of the report
_EXECUTION_KEYS = {"threads", "out", "format", "sieve_cache", "func"}


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _table(args, X: int, functions=("lambda", "mu", "liouville")):
    X = max(int(X), 2)
    cache = args.sieve_cache
    if cache is None and os.environ.get(CACHE_ENV):
        cache = Path(os.environ[CACHE_ENV]) / "sieve.bin"
    return cached_table(X, functions, cache)


# -- commands ---------------------------------------------------------------------
# each returns (result dict, csv rows or None)


def cmd_sieve(args):
    functions = args.functions.split(",") if args.functions else sorted(ALL_FUNCTIONS)
    table = _table(args, args.X, functions)
    result = {"X": args.X, "functions": sorted(table.functions), "psi": table.chebyshev_sum(args.X)}
    rows = [["n"] + sorted(table.functions)]
    for n in args.query or []:
        rows.append([n] + [table.query(f, n) for f in sorted(table.functions)])
    result["queries"] = [dict(zip(rows[0], r)) for r in rows[1:]]
    return result, rows


def cmd_beta(args):
    fam = parse_family(args.family)
    if args.fixed:
        var, value = args.fixed
        factors = [beta_p_fixed(fam, p, var, int(value)) for p in small_primes(args.pmax).tolist()]
        result = {"family": str(fam), "fixed": {var: int(value)}, "factors": [f.as_row() for f in factors]}
    else:
        series = singular_series(fam, args.pmax, require_pairwise=False, workers=args.threads)
        factors = series.per_prime
        result = {"family": str(fam), "hypotheses": check_hypotheses(fam).as_dict(), "series": series.as_dict()}
    rows = [["p", "numerator", "denominator", "value"]]
    rows += [[f.p, f.value.numerator, f.value.denominator, repr(float(f.value))] for f in factors]
    return result, rows


def cmd_correlate(args):
    fam = parse_family(args.family)
    Ns = [int(x) for x in args.N.split(",")]
    top = max(Ns)
    if args.fix_n is not None:
        need = required_bound(fam, top, (args.fix_n, args.fix_n), range(1, top + 1))
    elif args.fix_m is not None:
        need = required_bound(fam, top, (1, top**fam.d), [args.fix_m])
    else:
        need = required_bound(fam, top, (1, top**fam.d), range(1, top + 1))
    table = _table(args, need)
    rows = None
    if args.scan is not None:
        scan = bateman_horn_scan(fam, top, args.scan, table, cutoff=args.cutoff, workers=args.threads)
        result = scan.as_dict()
        buf = io.StringIO()
        scan.write_csv(buf)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
    elif len(Ns) > 1:
        study = convergence_study(fam, Ns, args.weight, table, cutoff=args.cutoff, workers=args.threads)
        result = study.as_dict()
        rows = [["N", "empirical", "predicted", "discrepancy"]]
        rows += [[r["N"], repr(r["empirical"]), repr(r["predicted"]), repr(r["discrepancy"])] for r in study.rows]
    elif args.fix_m is not None or args.fix_n is not None:
        result = one_dim_average(fam, top, args.weight, table, m=args.fix_m, n=args.fix_n, cutoff=args.cutoff).as_dict()
    else:
        result = double_average(fam, top, args.weight, table, cutoff=args.cutoff, workers=args.threads).as_dict()
    return result, rows


def _read_values(path):
    vals = []
    for line in Path(path).read_text().split():
        vals.append(complex(line.replace("i", "j")))
    return np.array(vals, dtype=np.complex128)


def cmd_gowers(args):
    if args.input:
        f = _read_values(args.input)
    else:
        rng = np.random.default_rng(args.seed)
        f = np.exp(2j * np.pi * rng.random(args.random))
    start = args.start
    interval = tuple(args.interval) if args.interval else (start, start + len(f) - 1)
    res = interval_norm(f, interval, args.s, method=args.method, start=start)
    return {"length": int(len(f)), **res.as_dict()}, None


def _siegel(args):
    char = RealCharacter(args.inject_character) if args.inject_character is not None else None
    beta = args.beta_tilde if args.beta_tilde is not None else 1.0
    return SiegelConfig(args.w, char, beta)


def cmd_wmodel(args):
    cfg = _siegel(args)
    result = {"config": cfg.describe()}
    rows = None
    if args.check == "ap":
        rep = ap_discrepancy(cfg, args.N, _table(args, args.N, ("lambda",)))
        result.update(rep.as_dict())
        rows = [["q", "a", "sum"]] + [[e["q"], e["a"], repr(e["sum"])] for e in rep.entries]
    elif args.check == "moments":
        rows = [["s", "lhs", "reference", "ratio"]]
        out = []
        for s in args.s_exponents:
            lhs, ref = truncation_moment(cfg, args.N, s, args.C)
            out.append({"s": s, "lhs": lhs, "reference": ref, "ratio": lhs / ref})
            rows.append([s, repr(lhs), repr(ref), repr(lhs / ref)])
        result["moments"] = out
    else:
        res = gowers_of_error(cfg, args.N, args.s, _table(args, args.N, ("lambda",)))
        result["gowers"] = res.as_dict()
    return result, rows


def cmd_l2g(args):
    if args.spec == "correlation":
        rep = correlation_factorization(args.Q, args.a, args.levels, args.N)
    else:
        if args.spec == "lambda_p":
            spec = lambda_p_spec(int(args.param))
        elif args.spec == "indicator-coprime":
            spec = indicator_coprime_spec(int(args.param))
        else:
            data = json.loads(Path(args.param).read_text())
            tables = {int(p): [Fraction(v) for v in vals] for p, vals in data["tables"].items()}
            spec = custom_table_spec(tables, data.get("C", 1.0), tuple(data.get("fixed_divisor_poly", [1])))
        rep = mean_product(spec, args.N)
    return rep.as_dict(), None


def cmd_weil(args):
    fam = parse_family(args.family)
    audit = weil_audit(fam, args.pmin, args.pmax, args.trials, seed=args.seed, subsets=args.subsets)
    result = audit.as_dict()
    if args.gcd_scan:
        Q, budget = args.gcd_scan
        result["gcd_scan"] = gcd_product_scan(fam.polys[-1], int(Q), args.pmax, float(Fraction(budget))).as_dict()
    buf = io.StringIO()
    audit.write_csv(buf)
    return result, list(csv.reader(io.StringIO(buf.getvalue())))


def cmd_vinogradov(args):
    if args.sample:
        triples = sample_triples(args.sample, args.seed, args.eta_min)
    else:
        triples = [(args.alpha, args.beta, args.eta)]
    reports = [verify(build(a, b, e, args.J), args.grid).as_dict() for a, b, e in triples]
    rows = [list(reports[0])] + [[repr(v) if isinstance(v, float) else v for v in r.values()] for r in reports]
    return {"reports": reports, "all_ok": all(r["ok"] for r in reports)}, rows


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", help="report path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--sieve-cache", help=f"sieve cache file (default ${CACHE_ENV}/sieve.bin)")

    p = argparse.ArgumentParser(prog="primepatterns", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", parents=[common], help="sieve arithmetic functions")
    s.add_argument("--X", type=int, required=True)
    s.add_argument("--functions", help="comma separated, default all")
    s.add_argument("--query", type=int, nargs="*")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("beta", parents=[common], help="local factors and singular series")
    s.add_argument("--family", required=True)
    s.add_argument("--pmax", type=int, default=10**4)
    s.add_argument("--fixed", nargs=2, metavar=("VAR", "VALUE"), help="m or n and its value")
    s.set_defaults(func=cmd_beta)

    s = sub.add_parser("correlate", parents=[common], help="correlation averages")
    s.add_argument("--family", required=True)
    s.add_argument("--N", required=True, help="an integer, or a comma separated ladder")
    s.add_argument("--weight", default="lambda")
    s.add_argument("--cutoff", type=int, default=10**4)
    s.add_argument("--fix-m", type=int)
    s.add_argument("--fix-n", type=int)
    s.add_argument("--scan", type=float, metavar="A", help="per-n scan with threshold N/(log N)^A")
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("gowers", parents=[common], help="Gowers norms of a sequence")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="whitespace separated (complex) values")
    src.add_argument("--random", type=int, metavar="L", help="random unimodular sequence of length L")
    s.add_argument("--start", type=int, default=0)
    s.add_argument("--interval", type=float, nargs=2)
    s.add_argument("--s", type=int, default=2)
    s.add_argument("--method", default="auto", choices=("naive", "recursive", "recursive_fft", "fft_u2", "auto"))
    s.set_defaults(func=cmd_gowers)

    s = sub.add_parser("wmodel", parents=[common], help="W-tricked and Siegel models")
    s.add_argument("--w", type=float, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--inject-character", type=int, metavar="D")
    s.add_argument("--beta-tilde", type=float)
    s.add_argument("--check", choices=("ap", "moments", "gowers"), default="ap")
    s.add_argument("--s", type=int, default=2, help="Gowers degree for --check gowers")
    s.add_argument("--s-exponents", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    s.add_argument("--C", type=float, default=2.0)
    s.set_defaults(func=cmd_wmodel)

    s = sub.add_parser("l2g", parents=[common], help="local-to-global mean values")
    s.add_argument("--spec", choices=("lambda_p", "indicator-coprime", "custom-table", "correlation"), required=True)
    s.add_argument("--param", help="support bound, modulus, or JSON table path")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--Q", type=int, default=1)
    s.add_argument("--a", type=int, nargs="+", default=[0])
    s.add_argument("--levels", type=float, nargs="+", default=[5.0])
    s.set_defaults(func=cmd_l2g)

    s = sub.add_parser("weil", parents=[common], help="Weil-bound audit of complete sums")
    s.add_argument("--family", required=True)
    s.add_argument("--pmin", type=int, default=3)
    s.add_argument("--pmax", type=int, default=500)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--subsets", action="store_true")
    s.add_argument("--gcd-scan", nargs=2, metavar=("Q", "BUDGET"))
    s.set_defaults(func=cmd_weil)

    s = sub.add_parser("vinogradov", parents=[common], help="smoothed interval indicators")
    s.add_argument("--alpha", type=float, default=-0.25)
    s.add_argument("--beta", type=float, default=0.25)
    s.add_argument("--eta", type=float, default=1 / 16)
    s.add_argument("--J", type=int)
    s.add_argument("--grid", type=int, default=4096)
    s.add_argument("--sample", type=int, metavar="COUNT")
    s.add_argument("--eta-min", type=float, default=0.005)
    s.set_defaults(func=cmd_vinogradov)
    return p


def _render(args, result, rows) -> str:
    if args.format == "csv":
        if rows is None:
            rows = [["key", "value"]] + [[k, json.dumps(v, default=_jsonable, sort_keys=True)] for k, v in result.items()]
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _EXECUTION_KEYS}
    report = {
        "schema": SCHEMA,
        "artifact_version": __version__,
        "command": args.command,
        "config": config,
        "result": result,
    }
    return json.dumps(report, default=_jsonable, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        result, rows = args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ArtifactError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = _render(args, result, rows)
    if args.out:
        Path(args.out).write_text(text)
        meta = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "elapsed_seconds": time.perf_counter() - started,
            "threads": args.threads,
            "sieve_cache": args.sieve_cache,
            "argv": list(sys.argv[1:] if argv is None else argv),
        }
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
