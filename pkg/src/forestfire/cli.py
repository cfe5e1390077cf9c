"""Command-line front end: ``forestfire <subcommand> [flags]``.

Exit codes: 0 success, 1 I/O failure, 2 usage error or contradictory flags.
Without ``--out`` the result table goes to stdout; with it, the directory gets
``results.csv`` (or ``results.json``), ``manifest.json`` and a PNG figure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments as ex
from .dynamics import P_C, TrajectoryConfig, critical_time, run_eta, run_eta_L, run_sigma, run_xi
from .harness import RunManifest, resolve_workers
from .lattice import Region
from .tree import TreeConfig, run_zeta


class UsageError(Exception):
    pass


def parse_list(text: str, cast=float) -> list:
    """Comma list whose items may be ``start:stop:step`` ranges (stop included)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty item in {text!r}")
        try:
            if ":" in part:
                bits = part.split(":")
                if len(bits) != 3:
                    raise UsageError(f"range {part!r} must be start:stop:step")
                a, b, s = (float(x) for x in bits)
                if s <= 0 or b < a:
                    raise UsageError(f"range {part!r} needs step > 0 and stop >= start")
                count = int(math.floor((b - a) / s + 1e-9)) + 1
                vals = [round(a + j * s, 12) for j in range(count)]
                out.extend(cast(v) if cast is float else _as_int(v) for v in vals)
            else:
                out.append(cast(part) if cast is float else _as_int(part))
        except ValueError as err:
            raise UsageError(f"cannot parse {part!r}: {err}") from None
    return out


def _as_int(v) -> int:
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v} is not an integer")
    return int(f)


def _single(values, flag):
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value here")
    return values[0]


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="box radius or tree depth (list)")
    common.add_argument("--m", help="observation radius (list)")
    common.add_argument("--lambda", dest="lam", help="ignition rate (list)")
    common.add_argument("--L", dest="L", help="size threshold (list)")
    common.add_argument("--t", help="time or horizon (list)")
    common.add_argument("--delta", help="sprinkling probability (list)")
    common.add_argument("--replicas", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pc", type=float, default=None, help=f"critical probability (default {P_C})")
    common.add_argument("--tc", type=float, default=None, help="critical time; must agree with --pc if both are given")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: $PYRO_WORKERS or 1)")
    common.add_argument("--no-plot", action="store_true", help="skip the PNG figure")

    p = argparse.ArgumentParser(prog="forestfire", description="Forest-fire process experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="one trajectory; writes its event log")
    s.add_argument("--model", choices=("eta", "eta_L", "zeta", "sigma", "xi"), default="eta")

    s = sub.add_parser("delta-scan", parents=[common], help="crossing probability after destroy-and-sprinkle")
    s.add_argument("--horizontal", action="store_true", help="left-right crossing instead of bottom-top")

    s = sub.add_parser("fire-stats", parents=[common], help="probabilities of one and two fires in B(m)")
    s.add_argument("--model", choices=ex.MODELS, default="eta")

    sub.add_parser("bound-check", parents=[common], help="fire at the origin against the pure-growth bound")

    s = sub.add_parser("xi-probe", parents=[common], help="annulus crossing after removal at t_c")
    s.add_argument("--i", default="2", help="even annulus level(s)")
    s.add_argument("--eps", default="0.05", help="time after t_c (list)")

    s = sub.add_parser("tree-stats", parents=[common], help="root first-fire probabilities on the binary tree")
    s.add_argument("--ttilde", help="also compare the one-step recursion at this intermediate time")

    s = sub.add_parser("selftest", parents=[common], help="oracle-equivalence suites")
    s.set_defaults(replicas=None)
    return p


def constants(args) -> tuple[float, float]:
    if args.pc is not None and args.tc is not None:
        if not math.isclose(critical_time(args.pc), args.tc, rel_tol=0, abs_tol=1e-9):
            raise UsageError(f"--tc {args.tc} contradicts --pc {args.pc} (expected t_c = {critical_time(args.pc)!r})")
    if args.pc is not None:
        p_c = args.pc
    elif args.tc is not None:
        p_c = -math.expm1(-args.tc)
    else:
        p_c = P_C
    if not 0 < p_c < 1:
        raise UsageError(f"p_c must lie in (0, 1), got {p_c}")
    return p_c, critical_time(p_c)


def _rate(args, required=True):
    if args.lam is not None and args.L is not None:
        raise UsageError("--lambda and --L are mutually exclusive")
    if args.lam is not None:
        return "lambda", parse_list(args.lam)
    if args.L is not None:
        return "L", parse_list(args.L, int)
    if required:
        raise UsageError("one of --lambda or --L is required")
    return None, []


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required")
    return v


# --------------------------------------------------------------------------
# subcommands: each returns (params, rows, extra artifacts)


def cmd_delta_scan(args, p_c, workers):
    ns = parse_list(_need(args, "n"), int)
    deltas = parse_list(_need(args, "delta"))
    for d in deltas:
        if not 0 <= d <= 1:
            raise UsageError(f"delta must lie in [0, 1], got {d}")
    if min(ns) < 1:
        raise UsageError("--n must be >= 1")
    rows = ex.delta_scan(ns, deltas, p_c, args.replicas, args.seed, not args.horizontal, workers)
    return {"n": ns, "delta": deltas, "vertical": not args.horizontal}, rows


def cmd_fire_stats(args, p_c, workers):
    kind, rates = _rate(args)
    ns = parse_list(_need(args, "n"), int)
    ms = parse_list(_need(args, "m"), int)
    ts = parse_list(_need(args, "t"))
    rows = []
    for n in ns:
        for m in ms:
            for rate in rates:
                for t in ts:
                    kw = {"lam": rate} if kind == "lambda" else {"L": rate}
                    cfg = ex.FireStatConfig(args.model, n, m, t, replicas=args.replicas, seed=args.seed, p_c=p_c, **kw)
                    fs = ex.fire_stats(cfg, workers)
                    rows.append(
                        {
                            "model": args.model, "n": n, "m": m, kind: rate, "t": t,
                            "one": fs.one.value, "one_lo": fs.one.lo, "one_hi": fs.one.hi,
                            "two": fs.two.value, "two_lo": fs.two.lo, "two_hi": fs.two.hi,
                            "tau_count": int(fs.taus.size),
                            "tau_mean": float(fs.taus.mean()) if fs.taus.size else math.nan,
                            "replicas": args.replicas, "seed": args.seed,
                        }
                    )
    return {"model": args.model, "n": ns, "m": ms, kind: rates, "t": ts}, rows


def cmd_bound_check(args, p_c, workers):
    kind, rates = _rate(args)
    if kind != "lambda":
        raise UsageError("bound-check needs --lambda")
    n = _single(parse_list(_need(args, "n"), int), "--n")
    ts = parse_list(_need(args, "t"))
    rows = []
    for lam in rates:
        cfg = ex.FireStatConfig("eta", n, 0, max(ts), lam=lam, replicas=args.replicas, seed=args.seed, p_c=p_c)
        for r in ex.bound_check(cfg, ts, workers):
            rows.append(
                {
                    "n": n, "lambda": lam, "t": r.t, "lhs": r.lhs, "lhs_se": r.lhs_se, "rhs": r.rhs,
                    "rhs_se": r.rhs_se, "holds": r.holds, "origin_burns": r.origin_burns,
                    "necessary_violations": r.necessary_violations, "replicas": r.replicas, "seed": args.seed,
                }
            )
    return {"n": n, "lambda": rates, "t": ts}, rows


def cmd_xi_probe(args, p_c, workers):
    levels = parse_list(args.i, int)
    epss = parse_list(args.eps)
    rows = []
    for i in levels:
        for eps in epss:
            est = ex.xi_crossing_probe(i, eps, args.replicas, args.seed, p_c, workers)
            rows.append({"i": i, "eps": eps, "estimate": est.value, "lo": est.lo, "hi": est.hi, "replicas": args.replicas, "seed": args.seed})
    return {"i": levels, "eps": epss}, rows


def cmd_tree_stats(args, p_c, workers):
    kind, rates = _rate(args)
    if kind != "lambda":
        raise UsageError("tree-stats needs --lambda")
    lam = _single(rates, "--lambda")
    ns = parse_list(_need(args, "n"), int)
    ts = parse_list(_need(args, "t"))
    rows = ex.tree_stats(ns, lam, ts, args.replicas, args.seed, workers)
    extra = {}
    params = {"n": ns, "lambda": lam, "t": ts}
    if args.ttilde is not None:
        tt = float(args.ttilde)
        params["ttilde"] = tt
        extra["recursion"] = [
            ex.recursion_check(n, lam, tt, t, args.replicas, args.seed, workers) for n in ns for t in ts if t > tt
        ]
    return params, rows, extra


def cmd_simulate(args, p_c, workers):
    model = args.model
    n = _single(parse_list(_need(args, "n"), int), "--n")
    t = _single(parse_list(_need(args, "t")), "--t")
    params = {"model": model, "n": n, "t": t}
    if model in ("sigma", "xi"):
        if args.lam is not None or args.L is not None:
            raise UsageError(f"{model} takes neither --lambda nor --L")
        region = Region.box(n)
        grid = run_sigma(args.seed, region, t) if model == "sigma" else run_xi(args.seed, region, t, p_c)
        ys, xs = np.nonzero(grid.state)
        rows = [{"x": int(x) + region.x0, "y": int(y) + region.y0} for y, x in zip(ys, xs)]
        return params, rows, {"grid": grid}
    kind, rates = _rate(args)
    rate = _single(rates, f"--{kind}")
    params[kind] = rate
    if model == "zeta":
        if kind != "lambda":
            raise UsageError("zeta needs --lambda")
        log = run_zeta(TreeConfig(n, rate, t, args.seed))
    elif model == "eta":
        if kind != "lambda":
            raise UsageError("eta needs --lambda")
        log = run_eta(TrajectoryConfig(n, t, args.seed, lam=rate, p_c=p_c))
    else:
        if kind != "L":
            raise UsageError("eta_L needs --L")
        log = run_eta_L(TrajectoryConfig(n, t, args.seed, L=rate, p_c=p_c))
    return params, None, {"log": log}


def cmd_selftest(args, p_c, workers):
    from . import selftest

    reps = args.replicas if args.replicas is not None else 2000
    rows = selftest.run_all(seed=args.seed, replicas=reps)
    return {"replicas": reps}, rows


COMMANDS = {
    "simulate": cmd_simulate,
    "delta-scan": cmd_delta_scan,
    "fire-stats": cmd_fire_stats,
    "bound-check": cmd_bound_check,
    "xi-probe": cmd_xi_probe,
    "tree-stats": cmd_tree_stats,
    "selftest": cmd_selftest,
}


# --------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(rows, manifest_hash: str) -> str:
    buf = io.StringIO()
    buf.write(f"# manifest={manifest_hash}\n")
    if rows:
        cols = list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render_json(rows, manifest_hash: str) -> str:
    body = {"manifest_hash": manifest_hash, "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows]}
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def _render(rows, fmt, h):
    return render_csv(rows, h) if fmt == "csv" else render_json(rows, h)


def _write_outputs(args, manifest, rows, extra) -> list[str]:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    h = manifest.hash
    written = []
    if "log" in extra:
        path = out / "events.csv"
        with open(path, "w", newline="") as fp:
            fp.write(f"# manifest={h}\n")
            extra["log"].write(fp)
        written.append(path.name)
    if rows is not None:
        path = out / f"results.{args.format}"
        path.write_text(_render(rows, args.format, h))
        written.append(path.name)
    if "recursion" in extra:
        path = out / f"recursion.{args.format}"
        path.write_text(_render(extra["recursion"], args.format, h))
        written.append(path.name)
    if not args.no_plot:
        written.extend(_figures(args, out, rows, extra, h))
    return written


def _figures(args, out: Path, rows, extra, h) -> list[str]:
    from . import report

    path = out / "figure.png"
    if args.command == "simulate":
        if "grid" in extra:
            g = extra["grid"]
            r = g.region
            report.plot_occupancy(g.state, (r.x0 - 0.5, r.x1 + 0.5, r.y0 - 0.5, r.y1 + 0.5), path, f"{args.model} at t={args.t}", h)
        else:
            log = extra["log"]
            t = log.header["t"]
            if log.is_tree:
                report.plot_tree_occupancy(log.state_at(t), path, f"zeta at t={t}", h)
            else:
                r = log.region
                report.plot_occupancy(log.state_at(t), (r.x0 - 0.5, r.x1 + 0.5, r.y0 - 0.5, r.y1 + 0.5), path, f"{log.model} at t={t}", h)
        return [path.name]
    plot = report.PLOTTERS.get(args.command)
    if plot is None or not rows:
        return []
    plot(rows, path, h)
    return [path.name]


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        p_c, _ = constants(args)
        workers = resolve_workers(args.workers)
        if args.replicas is not None and args.replicas < 1:
            raise UsageError("--replicas must be >= 1")
        started = time.time()
        result = COMMANDS[args.command](args, p_c, workers)
    except (UsageError, ValueError) as err:
        print(f"forestfire {args.command}: error: {err}", file=sys.stderr)
        return 2
    params, rows = result[0], result[1]
    extra = result[2] if len(result) > 2 else {}
    if args.command == "simulate":
        params = dict(params, seed=args.seed)
    manifest = RunManifest(
        experiment=args.command,
        params=params,
        master_seed=args.seed,
        replicas=args.replicas if args.replicas is not None else 0,
        p_c=p_c,
        workers=workers,
        started=started,
    )
    if args.command == "selftest":
        failed = [r for r in rows if not r["ok"]]
        for r in rows:
            print(f"{'PASS' if r['ok'] else 'FAIL'} {r['suite']}: {r['detail']}")
        return 1 if failed else 0
    try:
        if args.out is None:
            if rows is not None:
                sys.stdout.write(_render(rows, args.format, manifest.hash))
            elif "log" in extra:
                sys.stdout.write(f"# manifest={manifest.hash}\n")
                extra["log"].write(sys.stdout)
            return 0
        manifest.outputs = _write_outputs(args, manifest, rows, extra)
        manifest.finished = time.time()
        (Path(args.out) / "manifest.json").write_text(manifest.dumps())
    except OSError as err:
        print(f"forestfire {args.command}: I/O error: {err}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
