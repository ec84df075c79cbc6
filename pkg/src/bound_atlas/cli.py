"""Command-line interface: ``bound-atlas {estimate,exact,scan,list,plot-data,rerun,repro}``.

Every output file starts with a header holding the run configuration as JSON;
``bound-atlas rerun FILE`` regenerates the file from that header and compares
bytes.  Outputs carry no timestamps, so reruns are bit-for-bit identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import formulas, regions, sampler, witnesses
from .targets import exact_for

SCHEMA = 1
HEADER = "# bound-atlas schema={} config="

DEFAULT_REGIONS = {"horodecki": ("PPT", "PPT & MUB"), "full3": ("PPT", "MUB & PPT")}

CSV_COLUMNS = ("region", "hits", "total", "estimate", "exact_id", "exact", "abs_err")


def count(text: str) -> int:
    """Sample counts accept ``1e7``, ``10_000_000`` and plain integers."""
    try:
        v = float(text.replace("_", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"sample count must be a positive integer, got {text!r}")
    return int(v)


def _witness_region(name: str, a: float | None, alpha: float | None) -> list[str]:
    name = name.lower()
    if name in ("mub", "chrusc1", "chrusc2", "torus"):
        atom = {"mub": "MUB", "chrusc1": "Chrusc1", "chrusc2": "Chrusc2", "torus": "Torus"}[name]
        return [atom, f"PPT & {atom}"]
    if name in ("choi", "class1", "class2"):
        atom = {"choi": "Choi", "class1": "Class1", "class2": "Class2"}[name]
        a = 1.0 if a is None else a
        return [f"{atom}(a={a!r})", f"PPT & {atom}(a={a!r})"]
    if name in ("jba", "jba2", "jba4", "jba4p"):
        atom = {"jba": "JBA", "jba2": "JBA2", "jba4": "JBA4", "jba4p": "JBA4p"}[name]
        if alpha is None:
            raise SystemExit(f"--witness {name} needs --alpha")
        return [f"{atom}(alpha={alpha!r})", f"PPT & {atom}(alpha={alpha!r})"]
    raise SystemExit(f"unknown witness {name!r}")


def _region_list(args) -> list[str]:
    out: list[str] = []
    if args.table1:
        if args.family != "hl3":
            raise SystemExit("--table1 needs --family hl3")
        out += [e for _, e, _ in regions.TABLE1]
    for r in args.regions or []:
        out += [p.strip() for p in r.split(",") if p.strip()]
    for w in args.witness or []:
        out += _witness_region(w, args.a, args.alpha)
    if args.ccnr:
        out += ["PPT", "CCNR", "PPT & CCNR"]
    if not out:
        out = list(DEFAULT_REGIONS.get(args.family, ("PPT",)))
    seen, uniq = set(), []
    for r in out:
        key = str(regions.parse_expr(r))
        if key not in seen:
            seen.add(key)
            uniq.append(key)
    return uniq


def _header(config: dict) -> str:
    return HEADER.format(SCHEMA) + json.dumps(config, sort_keys=True) + "\n"


def _read_config(text: str) -> dict:
    first = text.split("\n", 1)[0]
    prefix = HEADER.format(SCHEMA)
    if not first.startswith(prefix):
        raise SystemExit("file has no bound-atlas provenance header")
    return json.loads(first[len(prefix):])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# estimate


def run_estimate(config: dict, workers: int = 1, progress: bool = False) -> tuple[str, bool]:
    """Render an estimate run; returns ``(text, all_checks_ok)``."""
    fam = config["family"]

    def report(t):
        print(f"[{fam}] n={t.total}: " + ", ".join(f"{r}={e:.6f}" for r, e in zip(t.regions, t.estimates)),
              file=sys.stderr)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", witnesses.ExtrapolationWarning)
        table = sampler.estimate(
            config["regions"],
            fam,
            config["n"],
            alpha0=config["alpha0"],
            start_index=config["start"],
            slow=config["slow"],
            workers=workers,
            progress=report if progress else None,
        )
        rows = []
        ok = True
        for reg, hits in zip(table.regions, table.hits):
            est = hits / table.total
            ex = exact_for(fam, reg)
            fid, val = ex if ex else (None, None)
            err = abs(est - val) if val is not None else None
            if err is not None and err > config["tol"]:
                ok = False
            rows.append((reg, hits, table.total, est, fid, val, err))

    head = _header(config)
    if config["format"] == "json":
        doc = {
            "schema": SCHEMA,
            "config": config,
            "provenance": {
                "family": fam,
                "alpha0": table.alpha0,
                "index_range": list(table.index_range),
                "sequence": "roberts",
            },
            "rows": [dict(zip(CSV_COLUMNS, r)) for r in rows],
        }
        return head + json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n", ok
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return head + buf.getvalue(), ok


def _estimate_config(args) -> dict:
    return {
        "command": "estimate",
        "family": args.family,
        "regions": _region_list(args),
        "n": args.n if args.n is not None else (10**5 if args.slow else 10**6),
        "alpha0": args.alpha0,
        "start": args.start,
        "format": args.format,
        "slow": args.slow,
        "tol": args.tol,
    }


def cmd_estimate(args) -> int:
    try:
        config = _estimate_config(args)
        text, ok = run_estimate(config, args.workers, args.progress)
    except (ValueError, regions.ExprError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    if args.check and not ok:
        print("check failed: some estimates differ from the catalog by more than --tol", file=sys.stderr)
        return 1
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# exact / list / plot-data


def cmd_exact(args) -> int:
    try:
        e = formulas.get(args.id)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    x = args.a if args.a is not None else args.alpha
    try:
        v = formulas.eval_formula(args.id, x, extrapolate=args.extrapolate)
    except (formulas.DomainError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    tag = f"{e.param}={x!r}" if e.param else ""
    print(f"{args.id}{'(' + tag + ')' if tag else ''} = {v!r}")
    print(f"  {e.anchor}" + (f" [{', '.join(sorted(e.flags))}]" if e.flags else ""))
    return 0


def cmd_list(args) -> int:
    if args.what == "formulas":
        doc = formulas.catalog_listing()
    elif args.what == "witnesses":
        doc = json.loads(witnesses.catalog_json())
    elif args.what == "table1":
        doc = json.loads(regions.table1_json())
    else:
        doc = [
            {"name": a.name, "dims": list(a.dims), "kinds": list(a.kinds), "params": list(a.params), "doc": a.doc}
            for a in regions.ATOMS.values()
        ]
    _emit(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", args.out)
    return 0


def cmd_plot_data(args) -> int:
    try:
        pts = formulas.plot_data(args.id, args.lo, args.hi, args.points, extrapolate=args.extrapolate)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    e = formulas.get(args.id)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([e.param, "value"])
    for x, y in pts:
        w.writerow([repr(x), repr(y)])
    _emit(buf.getvalue(), args.out)
    return 0


# ---------------------------------------------------------------------------
# scan

# formula -> (family, region template)
FAMILY_CURVES = {
    "d3.choi.ent": ("hl3", "Choi(a={x!r})"),
    "d3.choi.bound": ("hl3", "PPT & Choi(a={x!r})"),
    "d3.jba.ent": ("hl3", "JBA(alpha={x!r})"),
    "d3.jba.bound": ("hl3", "PPT & JBA(alpha={x!r})"),
    "d4.jba.ent": ("hl4", "JBA4(alpha={x!r})"),
    "d4.jba.bound": ("hl4", "PPT & JBA4(alpha={x!r})"),
    "d4.jba.union": ("hl4", "JBA4(alpha={x!r}) | JBA4p(alpha={x!r})"),
    "d4.jba.intersection": ("hl4", "JBA4(alpha={x!r}) & JBA4p(alpha={x!r})"),
}


def _grid(lo: float, hi: float, points: int) -> list[float]:
    if points < 1:
        raise ValueError("grid needs at least one point")
    if points == 1:
        return [lo]
    return [lo + (hi - lo) * i / (points - 1) for i in range(points)]


def run_scan(config: dict, workers: int = 1) -> str:
    kind = config["kind"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if kind == "threshold":
        ts = _grid(config["lo"], config["hi"], config["points"])
        regs = ["PPT"] + [f"PPT & ChoiForm(t={t!r})" for t in ts]
        tab = sampler.estimate(regs, "hl3", config["n"], alpha0=config["alpha0"], start_index=config["start"],
                               workers=workers)
        w.writerow(["t", "hits", "total", "estimate", "ppt_estimate"])
        ppt = tab.estimates[0]
        for t, h in zip(ts, tab.hits[1:]):
            w.writerow([repr(t), h, tab.total, repr(h / tab.total), repr(ppt)])
    elif kind == "boundary":
        # points on the MUB equality surface Q2 = (Q1 - 4 Q3) / 3 inside the density polytope
        cfg = sampler.RobertsConfig(2, config["alpha0"], config["start"])
        w.writerow(["Q1", "Q2", "Q3", "ppt"])
        kept, n0, block = 0, 0, 4096
        while kept < config["n"]:
            u = sampler.roberts_points(cfg, n0, n0 + block)
            n0 += block
            q1 = u[:, 0]
            q3 = u[:, 1] / 4.0
            q2 = (q1 - 4.0 * q3) / 3.0
            Q = np.stack([q1, q2, q3], axis=-1)
            keep = regions.density_region(3, Q)
            flags = regions.ppt_region(3, Q)
            for row, f in zip(Q[keep], flags[keep]):
                if kept >= config["n"]:
                    break
                w.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])), int(bool(f))])
                kept += 1
    elif kind == "family-curve":
        fid = config["formula"]
        if fid not in FAMILY_CURVES:
            raise ValueError(f"no family curve for {fid}; choose from {sorted(FAMILY_CURVES)}")
        fam, template = FAMILY_CURVES[fid]
        e = formulas.get(fid)
        lo = e.domain[0] if config["lo"] is None else config["lo"]
        hi = e.domain[1] if config["hi"] is None else config["hi"]
        xs = _grid(lo, hi, config["points"])
        regs = [template.format(x=x) for x in xs]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", witnesses.ExtrapolationWarning)
            tab = sampler.estimate(regs, fam, config["n"], alpha0=config["alpha0"], start_index=config["start"],
                                   workers=workers)
            w.writerow([e.param, "exact", "sampled", "hits", "total"])
            for x, h in zip(xs, tab.hits):
                try:
                    ex = formulas.eval_formula(fid, x, extrapolate=True)
                except formulas.DomainError:
                    ex = math.nan
                w.writerow([repr(x), repr(ex), repr(h / tab.total), h, tab.total])
    else:
        raise ValueError(f"unknown scan kind {kind!r}")
    return _header(config) + buf.getvalue()


def cmd_scan(args) -> int:
    defaults = {"threshold": (-0.25, 1.5), "boundary": (None, None), "family-curve": (None, None)}
    lo, hi = defaults[args.kind]
    config = {
        "command": "scan",
        "kind": args.kind,
        "n": args.n if args.n is not None else (10**4 if args.kind == "boundary" else 10**6),
        "alpha0": args.alpha0,
        "start": args.start,
        "points": args.points,
        "lo": args.lo if args.lo is not None else lo,
        "hi": args.hi if args.hi is not None else hi,
        "formula": args.formula,
    }
    try:
        text = run_scan(config, args.workers)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# rerun / repro


def render(config: dict, workers: int = 1) -> str:
    if config["command"] == "estimate":
        return run_estimate(config, workers)[0]
    if config["command"] == "scan":
        return run_scan(config, workers)
    raise SystemExit(f"cannot rerun command {config['command']!r}")


def cmd_rerun(args) -> int:
    with open(args.file, encoding="utf-8", newline="") as fh:
        old = fh.read()
    new = render(_read_config(old), args.workers)
    if new == old:
        print(f"{args.file}: reproduced bit-for-bit")
        return 0
    print(f"{args.file}: rerun differs from the stored output", file=sys.stderr)
    return 1


def cmd_repro(args) -> int:
    from . import acceptance

    results = acceptance.run_all(quick=args.quick, only=args.only)
    for line in acceptance.format_results(results):
        print(line)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bound-atlas", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def sampling(sp, n_help):
        sp.add_argument("--n", type=count, default=None, help=n_help)
        sp.add_argument("--alpha0", type=float, default=0.5, help="Roberts offset in [0, 1) (default 0.5)")
        sp.add_argument("--start", type=int, default=0, help="first sequence index (default 0)")
        sp.add_argument("--workers", type=int, default=sampler.default_workers(),
                        help="worker processes (default: $BOUND_ATLAS_THREADS or 1)")
        sp.add_argument("--out", help="output file (default stdout)")

    e = sub.add_parser("estimate", help="quasi-Monte Carlo region probabilities")
    e.add_argument("--family", choices=sorted(regions.FAMILIES), default="hl3")
    e.add_argument("--table1", action="store_true", help="all twenty rows of the d=3 MUB/Choi table")
    e.add_argument("--regions", action="append", help="region expression(s), comma separated; repeatable")
    e.add_argument("--witness", action="append", help="witness id: mub choi jba jba2 jba4 jba4p chrusc1 chrusc2 "
                                                      "class1 class2 torus")
    e.add_argument("--ccnr", action="store_true", help="add PPT, CCNR and PPT & CCNR")
    e.add_argument("--a", type=float, help="witness parameter a")
    e.add_argument("--alpha", type=float, help="witness parameter alpha")
    sampling(e, "sample count (default 1e6, or 1e5 with --slow)")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--slow", action="store_true", help="allow spectral and realignment regions")
    e.add_argument("--check", action="store_true", help="exit 1 if |estimate - exact| > --tol for any row")
    e.add_argument("--tol", type=float, default=2e-3, help="absolute tolerance for --check (default 2e-3)")
    e.add_argument("--progress", action="store_true", help="running estimates on stderr every 1e6 samples")
    e.set_defaults(func=cmd_estimate)

    x = sub.add_parser("exact", help="evaluate a catalog formula")
    x.add_argument("id")
    x.add_argument("--a", type=float)
    x.add_argument("--alpha", type=float)
    x.add_argument("--extrapolate", action="store_true", help="allow parameters outside the domain")
    x.set_defaults(func=cmd_exact)

    s = sub.add_parser("scan", help="threshold, boundary or family-curve scans (CSV)")
    s.add_argument("kind", choices=("threshold", "boundary", "family-curve"))
    s.add_argument("--formula", help="unary formula id for family-curve")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--points", type=int, default=50)
    sampling(s, "samples per scan (default 1e6; boundary: points emitted, default 1e4)")
    s.set_defaults(func=cmd_scan)

    ls = sub.add_parser("list", help="dump catalogs as JSON")
    ls.add_argument("what", nargs="?", choices=("formulas", "witnesses", "table1", "regions"), default="formulas")
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_list)

    pd = sub.add_parser("plot-data", help="(parameter, value) CSV for a unary formula")
    pd.add_argument("id")
    pd.add_argument("--lo", type=float)
    pd.add_argument("--hi", type=float)
    pd.add_argument("--points", type=int, default=101)
    pd.add_argument("--extrapolate", action="store_true")
    pd.add_argument("--out")
    pd.set_defaults(func=cmd_plot_data)

    r = sub.add_parser("rerun", help="regenerate an output file from its header and compare")
    r.add_argument("file")
    r.add_argument("--workers", type=int, default=sampler.default_workers())
    r.set_defaults(func=cmd_rerun)

    rp = sub.add_parser("repro", help="run the acceptance checks and print a pass/fail table")
    rp.add_argument("--quick", action="store_true", help="reduced sample counts (not the acceptance settings)")
    rp.add_argument("--only", type=int, action="append", help="criterion number(s) to run")
    rp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
