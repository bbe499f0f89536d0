"""Command-line entry point.

Every verb writes its files into a private temporary directory that is moved
into ``--output-dir`` only when the verb succeeds. Failures print one line,
``ERROR <CODE>: <message>``, to stderr and exit with 2 (validation),
3 (numerical) or 4 (I/O). ``reproduce-paper`` exits 1 when a check fails.
"""

import argparse
import csv
import json
from pathlib import Path
import shutil
import sys
import tempfile

import numpy as np

from . import reproduce
from .errors import FefficientError, OutputError, ValidationError
from .liquidation import LiquidationProblem, most_liquid_strategy, msd_of_strategy
from .montecarlo import efficient_and_diversified, empirical_density, run_simulation
from .scenarios import DEFAULT_SEED, resolve_scenario, save_scenario
from .solver import (
    FeasibilitySpec,
    diverse_holdings,
    diversified_holdings,
    is_diversification_efficient,
    min_distance_solution,
    msd,
    solve_f_efficient,
)
from .statics import DEFAULT_POINTS, FIGURES

VERBS = ("validate", "significance", "solve", "sweep", "liquidation", "simulate", "reproduce-paper")
DEFAULT_OUTPUT_DIR = "fefficient-out"
DENSITY_BINS = 100


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(columns: dict, path) -> None:
    """CSV with a header row, 17 significant digits for reals and LF line endings."""
    names = list(columns)
    data = [np.asarray(columns[n]).reshape(-1) if not isinstance(columns[n], list) else columns[n] for n in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise ValidationError(f"columns have different lengths {sorted(lengths)}", code="VALIDATION_TABLE")
    rows = len(data[0]) if data else 0
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for r in range(rows):
                writer.writerow([_cell(col[r]) for col in data])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def write_json(obj, path) -> None:
    try:
        Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _matrix_columns(m: np.ndarray, prefix: str, index_name: str = "asset") -> dict:
    cols = {index_name: np.arange(1, m.shape[0] + 1)}
    for j in range(m.shape[1]):
        cols[f"{prefix}_{j + 1}"] = m[:, j]
    return cols


def _say(text: str) -> None:
    print(text)


def cmd_validate(args, out: Path) -> int:
    config = resolve_scenario(args.scenario, args.set)
    model = config.model()
    save_scenario(config, out / "scenario.json")
    _say(f"scenario {config.name}: K={config.assets.count} N={config.banks.count} valid")
    _say(f"spectral bound {model.spectral_bound:.6g}, stable={model.stable}")
    return 0


def cmd_significance(args, out: Path) -> int:
    model = resolve_scenario(args.scenario, args.set).model()
    write_csv({"bank": np.arange(1, model.banks.count + 1), "v": model.v}, out / "significance.csv")
    write_csv(_matrix_columns(model.s, "s"), out / "systemicness.csv")
    write_json({"v": model.v, "spectral_bound": model.spectral_bound, "stable": model.stable},
               out / "significance.json")
    _say("v = " + ", ".join(f"{x:.6g}" for x in model.v))
    _say(f"spectral bound {model.spectral_bound:.6g} ({'< 1' if model.spectral_bound < 1 else '>= 1'})")
    return 0


def cmd_solve(args, out: Path) -> int:
    model = resolve_scenario(args.scenario, args.set).model()
    spec = FeasibilitySpec.from_model(model)
    solset = solve_f_efficient(spec)
    div = diversified_holdings(spec)
    closest = min_distance_solution(solset, div)
    write_csv(_matrix_columns(solset.particular, "bank"), out / "holdings_particular.csv")
    write_csv(_matrix_columns(closest, "bank"), out / "holdings_closest_to_diversified.csv")
    summary = {
        "null_dimension": solset.dimension,
        "msd_optimal": solset.msd_optimal,
        "msd_particular": msd(solset, solset.particular),
        "msd_diversified": msd(solset, div),
        "diversification_efficient": is_diversification_efficient(spec),
        "y_star": solset.y_star,
        "distance_particular_from_diversified": float(np.linalg.norm(solset.particular - div)),
        "distance_closest_from_diversified": float(np.linalg.norm(closest - div)),
    }
    if spec.n_assets == spec.n_banks:
        diverse = min_distance_solution(solset, diverse_holdings(spec))
        write_csv(_matrix_columns(diverse, "bank"), out / "holdings_closest_to_diverse.csv")
        summary["distance_closest_from_diverse"] = float(np.linalg.norm(diverse - diverse_holdings(spec)))
    write_json(summary, out / "solve.json")
    _say(f"null-space dimension {solset.dimension}, optimal MSD {solset.msd_optimal:.10g}")
    _say(f"diversification f-efficient: {summary['diversification_efficient']}")
    return 0


def cmd_sweep(args, out: Path) -> int:
    names = [args.parameter] if args.parameter else list(FIGURES)
    for name in names:
        table = FIGURES[name].sweep(args.points)
        write_csv({k: table[k] for k in ("param", "q11", "q21", "distance")}, out / f"sweep_{name}.csv")
        _say(f"sweep {name}: {args.points} points")
    return 0


def cmd_liquidation(args, out: Path) -> int:
    model = resolve_scenario(args.scenario, args.set).model()
    problem = LiquidationProblem.from_model(model)
    best = most_liquid_strategy(problem)
    best_msd = msd_of_strategy(problem, best)
    current_msd = msd_of_strategy(problem, model.banks.alpha)
    write_csv(_matrix_columns(best, "bank"), out / "liquidation_strategy.csv")
    write_json({"msd_most_liquid": best_msd, "msd_scenario_strategy": current_msd,
                "liquidity": problem.liquidity}, out / "liquidation.json")
    _say(f"MSD most-liquid {best_msd:.10g} vs scenario strategy {current_msd:.10g}")
    return 0


def cmd_simulate(args, out: Path) -> int:
    config = resolve_scenario(args.scenario, args.set)
    seed = config.seed if args.seed is None else args.seed
    eff, div = efficient_and_diversified(config)
    choices = {"f_efficient": eff, "diversified": div, "custom": config.banks.holdings}
    summary = {}
    for label in args.holdings:
        run = run_simulation(config, choices[label], seed, label, args.workers, args.samples)
        write_csv(run.table(), out / f"samples_{label}.csv")
        dens = empirical_density(run.samples_d, DENSITY_BINS)
        write_csv({"center": dens["center"], "density": dens["density"]}, out / f"density_{label}.csv")
        summary[label] = {**run.summary.as_dict(), "box": dens["box"]}
        s = run.summary
        _say(f"{label}: E[MC^e]={s.mean_mc_e:.6g} Var={s.var_mc_e:.6g} MSD={s.mean_sq_dev:.6g}")
    write_json({"scenario": config.name, "seed": seed, "runs": summary}, out / "summary.json")
    return 0


def cmd_reproduce(args, out: Path) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    checks = reproduce.run_all(seed=seed, workers=args.workers, samples=args.samples or 100_000)
    lines = [c.line(stable=True) for c in checks]
    ok = reproduce.verdict(checks)
    lines.append(f"OVERALL {'PASS' if ok else 'FAIL'}")
    try:
        (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write report: {exc.strerror}") from None
    for c in checks:
        _say(c.line())
    _say(lines[-1])
    return 0 if ok else 1


HANDLERS = {
    "validate": cmd_validate,
    "significance": cmd_significance,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "liquidation": cmd_liquidation,
    "simulate": cmd_simulate,
    "reproduce-paper": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", default="L", help="builtin name (L, I, H, B) or scenario JSON path")
    common.add_argument("--output-dir", default=DEFAULT_OUTPUT_DIR)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="dotted-path override, e.g. assets.sigma2.0=0.3")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="fefficient", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb, parents=[common])
        if verb == "sweep":
            p.add_argument("--parameter", choices=sorted(FIGURES), default=None)
            p.add_argument("--points", type=int, default=DEFAULT_POINTS)
        if verb in ("simulate", "reproduce-paper"):
            p.add_argument("--samples", type=int, default=None)
        if verb == "simulate":
            p.add_argument("--holdings", nargs="+", choices=("f_efficient", "diversified", "custom"),
                           default=["f_efficient", "diversified"])
    return parser


def run_command(args) -> int:
    target = Path(args.output_dir)
    created = not target.exists()
    try:
        target.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".fefficient-", dir=target))
    except OSError as exc:
        raise OutputError(f"cannot use output directory {target}: {exc.strerror}") from None
    done = False
    try:
        status = HANDLERS[args.verb](args, staging)
        for item in sorted(staging.iterdir()):
            item.replace(target / item.name)
        done = True
        return status
    except OSError as exc:
        raise OutputError(f"{exc.filename or target}: {exc.strerror}") from None
    finally:
        shutil.rmtree(staging, ignore_errors=True)
        if created and not done:
            shutil.rmtree(target, ignore_errors=True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("ERROR VALIDATION_WORKERS: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return run_command(args)
    except FefficientError as exc:
        print(f"ERROR {exc.code}: {exc}".replace("\n", " "), file=sys.stderr)
        return exc.exit_status
