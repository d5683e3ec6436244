"""Command-line front end.

    gmgd-sim simulate --preset paper-study --epsilon 0.1 --horizon 1 --seed 7 --out run1
    gmgd-sim study --preset paper-study --epsilon 0.1 -N 100000 --compare-drop-small-jumps
    gmgd-sim check-convergence --preset paper-study --epsilons 0.1,0.01,0.001
    gmgd-sim acceptance --a 1 --p 1 --trials 100000
    gmgd-sim replay run1/manifest.json --out run1-again

Exit codes: 0 success, 2 bad arguments or input files, 3 numeric domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, radial
from .errors import DomainError
from .large_jumps import GmgdSpec, study_preset_spec
from .process import SimulationConfig, sample_path
from .validation import (
    compare_drop_small_jumps,
    convergence_check,
    convergence_csv,
    default_times,
    run_moment_study,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
PRESETS = {"paper-study": study_preset_spec}


class UsageError(Exception):
    pass


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _load_spec(args) -> GmgdSpec:
    if args.spec:
        try:
            return GmgdSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read spec file: {exc}") from exc
        except (ValueError, DomainError) as exc:
            raise UsageError(f"malformed spec file {args.spec}: {exc}") from exc
    return PRESETS[args.preset]()


def _config(args) -> SimulationConfig:
    return SimulationConfig(
        epsilon=args.epsilon,
        horizon=args.horizon,
        shot_noise_K=args.shot_noise_K,
        beta=args.beta,
        seed=args.seed,
    )


def _write(out: Path, name: str, text: str, written: list[str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    written.append(str(path))


def cmd_simulate(args, written: list[str]) -> dict:
    spec = _load_spec(args)
    cfg = _config(args)
    component = {"full": "full", "large-jumps": "large", "small-jumps": "small"}[args.component]
    path = sample_path(spec, cfg, component=component)
    out = Path(args.out)
    if args.format == "json":
        _write(out, "path.json", path.to_json(), written)
    else:
        _write(out, "path.csv", path.to_csv(), written)
    mags = path.magnitudes
    return {
        "n_jumps": path.n_jumps,
        "n_small_jumps": int(np.sum(mags < cfg.epsilon)),
        "n_large_jumps": int(np.sum(mags > cfg.epsilon)),
        "value_at_horizon": path.evaluate(cfg.horizon).tolist(),
    }


def cmd_study(args, written: list[str]) -> dict:
    if args.N < 2:
        raise UsageError("-N must be at least 2 (sample variance undefined)")
    spec = _load_spec(args)
    cfg = _config(args)
    n = 500_000 if args.full_scale else args.N
    times = default_times(cfg.horizon, args.n_times)
    out = Path(args.out)
    summary = {"N": n}
    if args.compare_drop_small_jumps:
        reports = dict(zip(("full_process", "drop_small_jumps"), compare_drop_small_jumps(spec, cfg, n, times, args.threads)))
    else:
        target = {"full": "full_process", "large-jumps": "large_jumps_only"}[args.target]
        reports = run_moment_study(spec, cfg, n, times, (target,), args.threads)
    for name, rep in reports.items():
        _write(out, f"study_{name}.json", rep.to_json(), written)
        _write(out, f"study_{name}.csv", rep.to_csv(), written)
        summary[name] = {"total_error_at_horizon": float(rep.total_error[-1])}
    return summary


def _sector(text: str, spec: GmgdSpec):
    if text == "all":
        return None
    if text == "none":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--sector expects 'all', 'none' or atom indices, got {text!r}") from exc


def cmd_check_convergence(args, written: list[str]) -> dict:
    spec = _load_spec(args)
    rows = convergence_check(spec, _sector(args.sector, spec), args.p_test, args.epsilons)
    _write(Path(args.out), "convergence.csv", convergence_csv(rows), written)
    return {"ratios": [[e, r] for e, r in rows]}


def cmd_acceptance(args, written: list[str]) -> dict:
    rng = np.random.default_rng(args.seed)
    rate = radial.acceptance_rate(args.a, args.p, args.beta, args.trials, rng)
    report = {
        "a": args.a,
        "p": args.p,
        "beta": args.beta,
        "trials": args.trials,
        "sampler": "h1" if args.a >= 1 else "h2",
        "acceptance_rate": rate,
        "exact_acceptance_probability": radial.acceptance_probability(args.a, args.p, args.beta),
    }
    _write(Path(args.out), "acceptance.json", json.dumps(report, indent=2), written)
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gmgd-sim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=None, help="worker threads (env GMGD_SIM_THREADS)")

    model = argparse.ArgumentParser(add_help=False)
    src = model.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), default="paper-study")
    src.add_argument("--spec", help="GMGD spec JSON file")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--epsilon", type=float, default=0.1)
    sim.add_argument("--horizon", type=float, default=1.0)
    sim.add_argument("--shot-noise-K", dest="shot_noise_K", type=int, default=10_000)
    sim.add_argument("--beta", type=float, default=0.5)

    p = sub.add_parser("simulate", parents=[common, model, sim], help="sample one path")
    p.add_argument("--component", choices=["full", "large-jumps", "small-jumps"], default="full")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("study", parents=[common, model, sim], help="Monte Carlo moment-error study")
    p.add_argument("-N", type=int, default=100_000, help="replications")
    p.add_argument("--full-scale", action="store_true", help="use 500000 replications")
    p.add_argument("--target", choices=["full", "large-jumps"], default="full")
    p.add_argument("--n-times", type=int, default=20, help="evenly spaced times in (0, horizon]")
    p.add_argument("--compare-drop-small-jumps", action="store_true")
    p.add_argument("--format", choices=["csv", "json"], default=None, help="accepted for symmetry; both are written")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("check-convergence", parents=[common, model], help="small-jump moment ratios")
    p.add_argument("--sector", default="all", help="'all', 'none' or comma-separated atom indices")
    p.add_argument("--p-test", type=float, default=None)
    p.add_argument("--epsilons", type=_csv_floats, default=[0.1, 0.01, 0.001, 0.0001])
    p.set_defaults(func=cmd_check_convergence)

    p = sub.add_parser("acceptance", parents=[common], help="empirical rejection-sampler acceptance rate")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_acceptance)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="override the recorded output directory")
    p.set_defaults(func=None)
    return ap


def _replay_argv(args) -> list[str]:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"unreadable manifest: {exc}") from exc
    if args.out is not None:
        argv = _without_option(argv, "--out") + ["--out", args.out]
    return argv


def _without_option(argv: list[str], flag: str) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == flag:
            skip = True
        elif not tok.startswith(flag + "="):
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return main(_replay_argv(args))
        start = time.perf_counter()
        written: list[str] = []
        summary = args.func(args, written)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
        manifest = {
            "command": args.command,
            "argv": argv,
            "parameters": params,
            "seed": args.seed,
            "version": __version__,
            "duration_seconds": time.perf_counter() - start,
            "outputs": written,
        }
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}_manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        print(json.dumps(summary, indent=2))
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
