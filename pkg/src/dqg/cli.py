"""Command-line entry point: ``dqg {run,analyze,verify,exponents,sweep}``.

Exit codes: 0 success, 1 verification failure, 2 usage/config/input error,
3 numerical blow-up.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import logging
import sys
from pathlib import Path

from .config import parse_config
from .diagnostics import compute_exponents
from .errors import ConfigurationError, NumericalBlowupError, SnapshotFormatError
from .evolution import run
from .io import load_snapshot, save_snapshot, series_to_csv, write_reports
from .littlewood_paley import besov_norm_2inf, shell_l2_norms
from .series import critical_lebesgue_exponent
from .spectral import l2_norm, lambda_power, lp_norm, to_physical

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BLOWUP = 0, 1, 2, 3


def _common(p):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, default=Path("dqg_out"))
    p.add_argument("--format", action="append", choices=("csv", "json"), dest="formats")


def build_parser():
    parser = argparse.ArgumentParser(prog="dqg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="integrate one configuration")
    _common(p)
    p = sub.add_parser("analyze", help="norms of a stored snapshot")
    _common(p)
    p.add_argument("snapshot", type=Path)
    p = sub.add_parser("verify", help="run the full verification battery")
    _common(p)
    p.add_argument("--fast", action="store_true", help="smaller ensembles and grids")
    p = sub.add_parser("exponents", help="print the exponent table for alpha")
    p.add_argument("--alpha", type=float, required=True)
    p = sub.add_parser("sweep", help="repeat run over several alpha values")
    _common(p)
    p.add_argument("--alphas", required=True, help="comma-separated alpha values")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def load_config(args):
    text = args.config.read_text() if getattr(args, "config", None) else ""
    return parse_config(text, alpha=args.alpha, kappa=args.kappa, n=args.n,
                        t_end=args.t_end, seed=args.seed)


def _formats(args):
    return tuple(args.formats or ("csv", "json"))


def do_run(cfg, out_dir, formats):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    keep = cfg.snapshot_stride > 0
    result = run(cfg, keep_snapshots=keep)
    final, series = result[0], result[1]
    if "csv" in formats:
        (out_dir / "series.csv").write_text(series_to_csv(series))
    if "json" in formats:
        (out_dir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, default=str))
    save_snapshot(out_dir / "final.sqgs", final, cfg.alpha, cfg.kappa)
    if keep:
        for i, snap in enumerate(result[2][::cfg.snapshot_stride]):
            save_snapshot(out_dir / f"snap_{i:05d}.sqgs", snap, cfg.alpha, cfg.kappa)
    return final, series


def analyze(path, alpha=None):
    snap = load_snapshot(path)
    a = snap.alpha if alpha is None else alpha
    theta = snap.theta
    s0 = 2.0 - 2.0 * a
    out = {"time": snap.time, "n": theta.grid.n, "alpha": a, "kappa": snap.kappa,
           "mean": theta.mean.real, "l2": l2_norm(theta),
           "h_alpha": l2_norm(lambda_power(theta, a)),
           "besov_s0": besov_norm_2inf(theta, s0),
           "shells": shell_l2_norms(theta).tolist()}
    pc = critical_lebesgue_exponent(a)
    if pc != float("inf"):
        out["lp_crit"] = lp_norm(to_physical(theta, 2 * theta.grid.n), pc)
    return out


def _sweep_one(job):
    cfg, out_dir, formats = job
    final, series = do_run(cfg, out_dir, formats)
    return cfg.alpha, final.time, series.l2[-1]


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "exponents":
            print(compute_exponents(args.alpha).table())
            return EXIT_OK
        if args.command == "analyze":
            result = analyze(args.snapshot, args.alpha)
            print(json.dumps(result, indent=2))
            return EXIT_OK
        cfg = load_config(args)
        if args.command == "run":
            final, series = do_run(cfg, args.out, _formats(args))
            print(f"t={final.time:.6g} l2={series.l2[-1]:.6e} -> {args.out}")
            return EXIT_OK
        if args.command == "sweep":
            alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
            jobs = [(cfg.with_(alpha=a), args.out / f"alpha_{a:g}", _formats(args))
                    for a in alphas]
            if args.jobs > 1:
                with ProcessPoolExecutor(args.jobs) as pool:
                    results = list(pool.map(_sweep_one, jobs))
            else:
                results = [_sweep_one(j) for j in jobs]
            for a, t, l2 in results:
                print(f"alpha={a:g} t={t:.6g} l2={l2:.6e}")
            return EXIT_OK
        if args.command == "verify":
            from .verification import verify

            reports = verify(cfg, fast=args.fast)
            write_reports(reports, args.out, _formats(args))
            for _, rep in reports:
                print(rep.summary())
            ok = all(rep.passed for _, rep in reports)
            print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for _, r in reports)}/{len(reports)} checks")
            return EXIT_OK if ok else EXIT_FAIL
    except (ConfigurationError, SnapshotFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalBlowupError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
