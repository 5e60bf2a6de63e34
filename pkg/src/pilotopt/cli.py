"""Command-line front end.

Subcommands:
  design     pattern visualizations and per-method JSON for one configuration
  sweep      CSV of objective/MSE across a density, SNR or spreading axis
  structure  designed patterns plus a dispersion statistic along an axis
  validate   run the automated acceptance checks

Configurations are JSON files; every output embeds the fully resolved
configuration and a format version.  Floats are written with 12 significant
digits and rows/keys in a fixed order, so identical configurations reproduce
identical result files (recorded wall times are the one exception).
"""

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .channel import GridConfig, ScatteringSpec, build_statistics
from .errors import BudgetError, ConfigError, PilotOptError
from .objective import (
    average_mse,
    make_design_problem,
    objective_value,
)
from .optimizers import (
    METHOD_CR,
    METHOD_CR_ROUND,
    METHOD_CR_ROUND_SWAP,
    METHOD_DIAMOND,
    METHOD_GREEDY,
    METHOD_GREEDY_SWAP,
    METHOD_RECT,
    METHOD_EXHAUSTIVE,
    best_lattice,
    dependent_rounding,
    exhaustive_search,
    greedy_design,
    greedy_swap_design,
    relax_round_swap_design,
    solve_relaxation,
)
from .validation import run_all_checks

FORMAT_VERSION = 1

VALID_METHODS = (
    METHOD_CR,
    METHOD_CR_ROUND,
    METHOD_CR_ROUND_SWAP,
    METHOD_GREEDY,
    METHOD_GREEDY_SWAP,
    METHOD_RECT,
    METHOD_DIAMOND,
    METHOD_EXHAUSTIVE,
)

CSV_COLUMNS = (
    "axis",
    "method",
    "K",
    "objective",
    "average_mse",
    "swap_iterations",
    "wall_time",
    "axis_name",
    "density",
    "snr_db",
    "spreading_factor",
    "seed",
    "rounding_seed",
)

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_BAD_CONFIG = 2
EXIT_IO_ERROR = 3


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridConfig
    scattering: dict  # ScatteringSpec kwargs minus spreading_factor
    spreading_factors: tuple
    snr_dbs: tuple
    budgets: tuple  # (kind, value) with kind in {"pilots", "density"}
    beta: float | None
    methods: tuple
    seeds: tuple
    rounding_repeats: int
    output_dir: str
    list_axes: tuple = ()  # axis names the config gave as lists


def _as_tuple(value) -> tuple:
    return tuple(value) if isinstance(value, (list, tuple)) else (value,)


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate an experiment configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    _require(isinstance(raw, dict), "config root must be an object")
    unknown = set(raw) - {
        "grid",
        "scattering",
        "snr_db",
        "pilot_budget",
        "beta",
        "methods",
        "seeds",
        "rounding_repeats",
        "output_dir",
    }
    _require(not unknown, f"unknown config fields: {sorted(unknown)}")

    grid_raw = raw.get("grid")
    _require(isinstance(grid_raw, dict) and "M" in grid_raw and "N" in grid_raw,
             "field 'grid' must be an object with M and N")
    try:
        grid = GridConfig(int(grid_raw["M"]), int(grid_raw["N"]))
    except PilotOptError as exc:
        raise ConfigError(f"field 'grid': {exc}") from exc

    list_axes = []
    scattering_raw = dict(raw.get("scattering") or {})
    if isinstance(scattering_raw.get("spreading_factor"), list):
        list_axes.append("spreading_factor")
    spreading = _as_tuple(scattering_raw.pop("spreading_factor", None))
    _require(spreading != (None,), "field 'scattering.spreading_factor' is required")
    for value in spreading:
        _require(isinstance(value, (int, float)) and value > 0,
                 f"field 'scattering.spreading_factor': {value!r} is not a positive number")
    try:
        ScatteringSpec(spreading_factor=spreading[0], **scattering_raw)
    except (PilotOptError, TypeError) as exc:
        raise ConfigError(f"field 'scattering': {exc}") from exc

    if isinstance(raw.get("snr_db"), list):
        list_axes.append("snr_db")
    snr = _as_tuple(raw.get("snr_db", 10.0))
    for value in snr:
        _require(isinstance(value, (int, float)), f"field 'snr_db': {value!r} is not a number")

    budget_raw = raw.get("pilot_budget")
    _require(budget_raw is not None, "field 'pilot_budget' is required")
    if isinstance(budget_raw, list):
        list_axes.insert(0, "density")
        for d in budget_raw:
            _require(isinstance(d, (int, float)) and 0 < d <= 1,
                     f"field 'pilot_budget': density {d!r} outside (0, 1]")
        budgets = tuple(("density", float(d)) for d in budget_raw)
    else:
        _require(isinstance(budget_raw, int) and not isinstance(budget_raw, bool),
                 "field 'pilot_budget' must be an integer or a list of densities")
        _require(budget_raw >= 1, f"field 'pilot_budget': K = {budget_raw} is not a valid budget")
        budgets = (("pilots", int(budget_raw)),)

    beta = raw.get("beta")
    if beta is not None:
        _require(isinstance(beta, (int, float)) and beta > 0, "field 'beta' must be positive")

    methods_raw = raw.get("methods", ["greedy-swap"])
    _require(isinstance(methods_raw, list) and len(methods_raw) >= 1,
             "field 'methods' must list at least one method")
    methods = tuple(methods_raw)
    for m in methods:
        _require(m in VALID_METHODS, f"field 'methods': unknown method {m!r}; valid: {VALID_METHODS}")

    seeds = tuple(int(s) for s in _as_tuple(raw.get("seeds", 0)))
    repeats = int(raw.get("rounding_repeats", 50))
    _require(repeats >= 1, "field 'rounding_repeats' must be >= 1")

    return ExperimentConfig(
        grid=grid,
        scattering=scattering_raw,
        spreading_factors=spreading,
        snr_dbs=snr,
        budgets=budgets,
        beta=beta,
        methods=methods,
        seeds=seeds,
        rounding_repeats=repeats,
        output_dir=str(raw.get("output_dir", "out")),
        list_axes=tuple(list_axes),
    )


def resolved_config_dict(cfg: ExperimentConfig) -> dict:
    if cfg.budgets[0][0] == "pilots":
        budget = cfg.budgets[0][1]
    else:
        budget = [value for _, value in cfg.budgets]
    return {
        "grid": {"M": cfg.grid.M, "N": cfg.grid.N},
        "scattering": {
            "spreading_factor": list(cfg.spreading_factors),
            **cfg.scattering,
        },
        "snr_db": list(cfg.snr_dbs),
        "pilot_budget": budget,
        "beta": cfg.beta,
        "methods": list(cfg.methods),
        "seeds": list(cfg.seeds),
        "rounding_repeats": cfg.rounding_repeats,
        "output_dir": cfg.output_dir,
    }


def budget_pilots(grid: GridConfig, kind: str, value) -> int:
    """Density fractions convert to K = round(density * M * N)."""
    K = int(round(value * grid.size)) if kind == "density" else int(value)
    if not 1 <= K <= grid.size:
        raise BudgetError(f"budget {K} from {kind}={value} outside [1, {grid.size}]")
    return K


def derive_rounding_seed(seed: int, index: int) -> int:
    """Stable per-rounding seed derived from the run seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1)[0])


# --------------------------------------------------------------------------
# serialization helpers


def fmt_float(x) -> str:
    return format(float(x), ".12g")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _round_floats(obj.item())
    return obj


def write_json(path: Path, payload: dict) -> None:
    body = {"format_version": FORMAT_VERSION, **payload}
    path.write_text(
        json.dumps(_round_floats(body), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def render_pattern(grid: GridConfig, indices, footer: str) -> str:
    """ASCII grid: rows are subcarriers, columns OFDM symbols."""
    cells = [["." for _ in range(grid.N)] for _ in range(grid.M)]
    for k in indices:
        m, n = grid.cell(int(k))
        cells[m][n] = "X"
    lines = [" ".join(row) for row in cells]
    lines.append(footer)
    return "\n".join(lines) + "\n"


def render_weights(grid: GridConfig, weights, footer: str) -> str:
    """ASCII grid of fractional weights in deciles ('.' for ~0, 9 for ~1)."""
    cells = [["." for _ in range(grid.N)] for _ in range(grid.M)]
    for k, w in enumerate(weights):
        m, n = grid.cell(k)
        decile = int(round(float(w) * 9))
        cells[m][n] = "." if decile == 0 else str(decile)
    lines = [" ".join(row) for row in cells]
    lines.append(footer)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# one design point


def run_point(cfg: ExperimentConfig, stats, K, snr_db, seed, methods, repeats):
    """Run every requested method at one configuration point.

    Returns ``{method: outcome}`` where an outcome is a dict with at least
    the objective and average MSE, or an ``error`` entry for methods that are
    infeasible at this point.  One relaxation solve is shared by all
    relaxation-based methods; its time is attributed to the first of them.
    """
    problem = make_design_problem(stats, K=K, snr_db=snr_db, beta=cfg.beta)
    outcomes = {}
    allocation = None
    relax_time = 0.0
    if any(m.startswith("cr") for m in methods):
        t0 = time.perf_counter()
        allocation = solve_relaxation(problem)
        relax_time = time.perf_counter() - t0

    for method in methods:
        t0 = time.perf_counter()
        shared = 0.0
        if method.startswith("cr"):
            shared, relax_time = relax_time, 0.0
        try:
            if method == METHOD_CR:
                obj = objective_value(problem, allocation)
                outcomes[method] = {
                    "weights": allocation.weights.tolist(),
                    "objective": obj,
                    "average_mse": average_mse(problem, obj),
                    "K": K,
                    "converged": allocation.converged,
                    "swap_iterations": 0,
                    "wall_time": shared + time.perf_counter() - t0,
                }
            elif method == METHOD_CR_ROUND:
                pattern = dependent_rounding(
                    allocation, derive_rounding_seed(seed, 0), grid=problem.grid
                )
                obj = objective_value(problem, pattern)
                outcomes[method] = {
                    "indices": list(pattern.indices),
                    "objective": obj,
                    "average_mse": average_mse(problem, obj),
                    "K": K,
                    "swap_iterations": 0,
                    "wall_time": shared + time.perf_counter() - t0,
                }
            elif method == METHOD_CR_ROUND_SWAP:
                seeds = [derive_rounding_seed(seed, i) for i in range(repeats)]
                best, reports = relax_round_swap_design(
                    problem, seeds, allocation=allocation
                )
                outcomes[method] = {
                    "indices": list(best.pattern.indices),
                    "objective": best.objective,
                    "average_mse": best.average_mse,
                    "K": best.budget_used,
                    "swap_iterations": best.swap_iterations,
                    "wall_time": shared + time.perf_counter() - t0,
                    "distribution": [
                        {
                            "rounding_seed": s,
                            "objective": r.objective,
                            "average_mse": r.average_mse,
                            "swap_iterations": r.swap_iterations,
                            "wall_time": r.wall_time,
                        }
                        for s, r in zip(seeds, reports)
                    ],
                }
            else:
                if method == METHOD_GREEDY:
                    report = greedy_design(problem)
                elif method == METHOD_GREEDY_SWAP:
                    report = greedy_swap_design(problem)
                elif method in (METHOD_RECT, METHOD_DIAMOND):
                    report = best_lattice(problem, problem.grid, method)
                elif method == METHOD_EXHAUSTIVE:
                    report = exhaustive_search(problem)
                else:  # pragma: no cover - guarded by config validation
                    raise ConfigError(f"unknown method {method}")
                outcomes[method] = {
                    "indices": list(report.pattern.indices),
                    "objective": report.objective,
                    "average_mse": report.average_mse,
                    "K": report.budget_used,
                    "swap_iterations": report.swap_iterations,
                    "wall_time": report.wall_time,
                }
        except PilotOptError as exc:
            outcomes[method] = {"error": f"{type(exc).__name__}: {exc}", "K": K}
    return outcomes


def load_pattern(path):
    """Reload a pattern written by the design or structure commands."""
    from .objective import PilotPattern

    data = json.loads(Path(path).read_text(encoding="utf-8"))
    grid = GridConfig(data["M"], data["N"])
    return PilotPattern(tuple(data["indices"]), grid)


def _statistics_cache(cfg: ExperimentConfig) -> dict:
    cache = {}
    for dd in cfg.spreading_factors:
        spec = ScatteringSpec(spreading_factor=dd, **cfg.scattering)
        cache[dd] = build_statistics(cfg.grid, spec)
    return cache


# --------------------------------------------------------------------------
# subcommands


def cmd_design(cfg: ExperimentConfig, out_dir: Path, threads: int) -> int:
    if cfg.list_axes:
        raise ConfigError(f"design needs scalar parameters; {cfg.list_axes[0]!r} is a list")
    dd = cfg.spreading_factors[0]
    snr_db = cfg.snr_dbs[0]
    kind, value = cfg.budgets[0]
    K = budget_pilots(cfg.grid, kind, value)
    stats = _statistics_cache(cfg)[dd]
    resolved = resolved_config_dict(cfg)

    summary = {"config": resolved, "runs": []}
    for seed in cfg.seeds:
        # Panels stay consistent: the swap-refined rounding refines the same
        # single rounding that the unrefined panel displays.
        outcomes = run_point(cfg, stats, K, snr_db, seed, cfg.methods, repeats=1)
        for method, outcome in outcomes.items():
            stem = f"design_{method}_seed{seed}"
            entry = {"method": method, "seed": seed, **outcome}
            entry.pop("distribution", None)
            if "error" in outcome:
                summary["runs"].append(entry)
                print(f"[design] {method} seed={seed}: {outcome['error']}", file=sys.stderr)
                continue
            payload = {
                "config": resolved,
                "M": cfg.grid.M,
                "N": cfg.grid.N,
                "K": outcome["K"],
                "method": method,
                "seed": seed,
                "objective": outcome["objective"],
                "average_mse": outcome["average_mse"],
            }
            footer = f"avg MSE = {outcome['average_mse']:.2f}"
            if method == METHOD_CR:
                payload["weights"] = outcome["weights"]
                art = render_weights(cfg.grid, outcome["weights"], footer)
            else:
                payload["indices"] = outcome["indices"]
                art = render_pattern(cfg.grid, outcome["indices"], footer)
            write_json(out_dir / f"{stem}.json", payload)
            (out_dir / f"{stem}.txt").write_text(art, encoding="utf-8")
            summary["runs"].append(entry)
    write_json(out_dir / "design_summary.json", summary)
    return EXIT_OK


def _axis_points(cfg: ExperimentConfig):
    for kind_value in cfg.budgets:
        for snr_db in cfg.snr_dbs:
            for dd in cfg.spreading_factors:
                yield kind_value, snr_db, dd


def cmd_sweep(cfg: ExperimentConfig, out_dir: Path, threads: int) -> int:
    if not cfg.list_axes:
        raise ConfigError("sweep needs a list-valued axis (pilot_budget, snr_db or spreading)")
    primary = cfg.list_axes[0]
    cache = _statistics_cache(cfg)
    points = list(_axis_points(cfg))
    tasks = [(point, seed) for point in points for seed in cfg.seeds]

    def run_task(task):
        ((kind, value), snr_db, dd), seed = task
        K = budget_pilots(cfg.grid, kind, value)
        return run_point(cfg, cache[dd], K, snr_db, seed, cfg.methods, cfg.rounding_repeats)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]

    meta = {"format_version": FORMAT_VERSION, "config": resolved_config_dict(cfg), "columns": list(CSV_COLUMNS)}
    lines = ["# " + json.dumps(_round_floats(meta), sort_keys=True)]
    lines.append(",".join(CSV_COLUMNS))
    errors = []
    for (((kind, value), snr_db, dd), seed), outcomes in zip(tasks, results):
        density = value if kind == "density" else value / cfg.grid.size
        axis_value = {"density": density, "snr_db": snr_db, "spreading_factor": dd}[primary]
        base = {
            "axis": fmt_float(axis_value),
            "axis_name": primary,
            "density": fmt_float(density),
            "snr_db": fmt_float(snr_db),
            "spreading_factor": fmt_float(dd),
            "seed": str(seed),
            "rounding_seed": "",
        }
        for method in cfg.methods:
            outcome = outcomes[method]
            if "error" in outcome:
                errors.append({"method": method, "seed": seed, "axis": axis_value, **outcome})
                continue
            row = dict(
                base,
                method=method,
                K=str(outcome["K"]),
                objective=fmt_float(outcome["objective"]),
                average_mse=fmt_float(outcome["average_mse"]),
                swap_iterations=str(outcome["swap_iterations"]),
                wall_time=format(outcome["wall_time"], ".3f"),
            )
            lines.append(",".join(row[c] for c in CSV_COLUMNS))
            for dist in outcome.get("distribution", ()):
                drow = dict(
                    base,
                    method=method + "-dist",
                    K=str(outcome["K"]),
                    objective=fmt_float(dist["objective"]),
                    average_mse=fmt_float(dist["average_mse"]),
                    swap_iterations=str(dist["swap_iterations"]),
                    wall_time=format(dist["wall_time"], ".3f"),
                    rounding_seed=str(dist["rounding_seed"]),
                )
                lines.append(",".join(drow[c] for c in CSV_COLUMNS))
    (out_dir / "sweep.csv").write_text("\r\n".join(lines) + "\r\n", encoding="utf-8")
    if errors:
        write_json(out_dir / "sweep_errors.json", {"errors": errors})
        for err in errors:
            print(f"[sweep] {err['method']}: {err['error']}", file=sys.stderr)
    return EXIT_OK


def nearest_neighbor_dispersion(grid: GridConfig, indices) -> float | None:
    """Mean distance from each pilot to its nearest other pilot, in cells."""
    if len(indices) < 2:
        return None
    cells = np.array([grid.cell(int(k)) for k in indices], dtype=float)
    diff = cells[:, None, :] - cells[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    return float(dist.min(axis=1).mean())


def cmd_structure(cfg: ExperimentConfig, out_dir: Path, threads: int) -> int:
    kind, value = cfg.budgets[0]
    if len(cfg.budgets) > 1 or "density" in cfg.list_axes:
        raise ConfigError("structure needs a fixed pilot budget")
    if cfg.list_axes not in (("snr_db",), ("spreading_factor",)):
        raise ConfigError("structure needs exactly one list axis: snr_db or spreading factor")
    axis = cfg.list_axes[0]
    K = budget_pilots(cfg.grid, kind, value)
    cache = _statistics_cache(cfg)
    methods = [m for m in cfg.methods if m != METHOD_CR]
    resolved = resolved_config_dict(cfg)

    summary = {"config": resolved, "axis": axis, "patterns": []}
    for snr_db in cfg.snr_dbs:
        for dd in cfg.spreading_factors:
            axis_value = snr_db if axis == "snr_db" else dd
            for seed in cfg.seeds:
                outcomes = run_point(
                    cfg, cache[dd], K, snr_db, seed, methods, cfg.rounding_repeats
                )
                for method, outcome in outcomes.items():
                    if "error" in outcome:
                        print(f"[structure] {method}: {outcome['error']}", file=sys.stderr)
                        continue
                    dispersion = nearest_neighbor_dispersion(cfg.grid, outcome["indices"])
                    stem = f"structure_{axis}_{fmt_float(axis_value)}_{method}_seed{seed}"
                    payload = {
                        "config": resolved,
                        "M": cfg.grid.M,
                        "N": cfg.grid.N,
                        "K": outcome["K"],
                        "method": method,
                        "seed": seed,
                        "axis": axis,
                        "axis_value": axis_value,
                        "objective": outcome["objective"],
                        "average_mse": outcome["average_mse"],
                        "indices": outcome["indices"],
                        "dispersion": dispersion,
                    }
                    write_json(out_dir / f"{stem}.json", payload)
                    footer = (
                        f"avg MSE = {outcome['average_mse']:.2f} | "
                        f"dispersion = {'n/a' if dispersion is None else format(dispersion, '.2f')}"
                    )
                    (out_dir / f"{stem}.txt").write_text(
                        render_pattern(cfg.grid, outcome["indices"], footer), encoding="utf-8"
                    )
                    summary["patterns"].append(
                        {
                            "axis_value": axis_value,
                            "method": method,
                            "seed": seed,
                            "K": outcome["K"],
                            "objective": outcome["objective"],
                            "average_mse": outcome["average_mse"],
                            "dispersion": dispersion,
                        }
                    )
    write_json(out_dir / "structure_summary.json", summary)
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig | None, out_dir: Path) -> int:
    results = run_all_checks(progress=lambda r: print(r.line(), flush=True))
    payload = {
        "config": resolved_config_dict(cfg) if cfg else None,
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "runtime_s": r.runtime,
                "budget_s": r.budget_s,
                "details": r.details,
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    write_json(out_dir / "validate.json", payload)
    return EXIT_OK if payload["all_passed"] else EXIT_CHECK_FAILURE


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotopt",
        description="A-optimal pilot pattern design for OFDM over doubly dispersive channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("design", True),
        ("sweep", True),
        ("structure", True),
        ("validate", False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="path to a JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seeds")
        p.add_argument("--out", default=None, help="override the config output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument(
            "--method",
            action="append",
            default=None,
            help="override config methods (repeatable)",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else None
        if cfg is not None:
            if args.seed is not None:
                cfg = _replace(cfg, seeds=(args.seed,))
            if args.method:
                for m in args.method:
                    if m not in VALID_METHODS:
                        raise ConfigError(f"--method {m!r} unknown; valid: {VALID_METHODS}")
                cfg = _replace(cfg, methods=tuple(args.method))
        out_dir = Path(args.out) if args.out else Path(cfg.output_dir if cfg else "out")
        out_dir.mkdir(parents=True, exist_ok=True)

        if args.command == "design":
            return cmd_design(cfg, out_dir, args.threads)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir, args.threads)
        if args.command == "structure":
            return cmd_structure(cfg, out_dir, args.threads)
        if args.command == "validate":
            return cmd_validate(cfg, out_dir)
        raise ConfigError(f"unknown command {args.command}")  # pragma: no cover
    except PilotOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR


def _replace(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **changes)


if __name__ == "__main__":
    sys.exit(main())
