"""Command-line front end: `python -m hypersync <command> [options]`."""
import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from dotenv import dotenv_values
from pydantic import ValidationError

from hypersync import experiments
from hypersync.dynamics import load_frequencies
from hypersync.exceptions import EXIT_FAILURE, EXIT_IO, EXIT_OK, ConfigError, HypersyncError, OutputError
from hypersync.hypergraph import Hypergraph, all_to_all, load_hypergraph, random_simplicial_complex, save_hypergraph
from hypersync.models import (
    ControlSpec,
    ExperimentConfig,
    InitialCondition,
    IntegrationPlan,
    ModelParams,
    SweepGrid,
)
from hypersync.settings import settings
from hypersync.utils import ensure_dir, format_header, get_logger, write_csv
from hypersync.validation import run_validation

logger = get_logger(__name__)

TWO_PI = 2.0 * np.pi


# Configuration

def parse_overrides(items: Sequence[str]) -> Dict[str, str]:
    """`key=value` strings to a dict."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override {item!r} is not of the form key=value")
        out[key.strip()] = value.strip()
    return out


def load_config(
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    out: Optional[Path] = None,
) -> ExperimentConfig:
    """Resolve defaults < config file < --set overrides < flags."""
    values: Dict[str, object] = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"Config file not found: {path}")
        values.update({k: v for k, v in dotenv_values(path).items() if v is not None})
    values.update(parse_overrides(overrides))
    for key, value in (("seed", seed), ("workers", workers), ("out", out)):
        if value is not None:
            values[key] = value
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def build_hypergraph(cfg: ExperimentConfig) -> Hypergraph:
    if cfg.topology == "all_to_all":
        return all_to_all(cfg.n)
    if cfg.topology == "random_sc":
        return random_simplicial_complex(cfg.n, cfg.k1_deg, cfg.k2_deg, cfg.graph_seed)
    return load_hypergraph(cfg.path)


def explicit_omega(cfg: ExperimentConfig, h: Hypergraph) -> Optional[np.ndarray]:
    if cfg.omega_path is None:
        return None
    omega = load_frequencies(cfg.omega_path)
    if omega.size != h.n:
        raise ConfigError(f"{cfg.omega_path} holds {omega.size} frequencies for {h.n} nodes")
    return omega


def integration_plan(cfg: ExperimentConfig) -> IntegrationPlan:
    return IntegrationPlan(t0=0.0, t_end=cfg.t_end, dt=cfg.dt, sample_every=cfg.sample_every)


def initial_condition(cfg: ExperimentConfig, full_circle: bool = False) -> InitialCondition:
    """Phase distribution from the config; `full_circle` widens it to [0, 2*pi) unless theta_high was set."""
    theta_high = cfg.theta_high
    if full_circle and "theta_high" not in cfg.model_fields_set:
        theta_high = TWO_PI
    return InitialCondition(
        theta_low=cfg.theta_low,
        theta_high=theta_high,
        draw_omega=cfg.omega_path is None,
        omega_low=cfg.omega_low,
        omega_high=cfg.omega_high,
    )


def control_spec(cfg: ExperimentConfig, h: Hypergraph, m: Optional[int] = None) -> ControlSpec:
    """First m nodes of the seeded shuffle, or every node."""
    if cfg.mode == "none":
        return ControlSpec()
    m = cfg.m if m is None else m
    if m is None or m >= h.n:
        return ControlSpec.all_nodes(h.n, cfg.mode)
    order = experiments.pinned_order(h.n, cfg.seed)
    return ControlSpec(mode=cfg.mode, pinned=tuple(int(v) for v in order[:m]))


def window(cfg: ExperimentConfig):
    return cfg.r_hat_t0, cfg.t_end


def header(cfg: ExperimentConfig) -> List[str]:
    lines = format_header(cfg.model_dump(mode="json"), cfg.seed)
    lines.append(
        f"thresholds sync={settings.SYNC_THRESHOLD} cluster={settings.CLUSTER_THRESHOLD} "
        f"sync_level={settings.SYNC_LEVEL} resonance_tol={settings.RESONANCE_TOL}"
    )
    return lines


def write_plot_script(csv_path: Path, columns: Sequence[str], x_column: str = "") -> Path:
    """Plain gnuplot script plotting every numeric column of a CSV against the first."""
    script = csv_path.with_suffix(".gp")
    x = x_column or columns[0]
    xi = list(columns).index(x) + 1
    plots = [
        f"'{csv_path.name}' using {xi}:{i + 1} with lines title '{name}'"
        for i, name in enumerate(columns)
        if name != x and name not in ("mode", "state", "replicates")
    ]
    text = "\n".join([
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        "set terminal pngcairo size 900,600",
        f"set output '{csv_path.stem}.png'",
        "plot " + ", \\\n     ".join(plots),
        "",
    ])
    try:
        script.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Cannot write plot script {script}: {e}") from e
    return script


def _emit(cfg: ExperimentConfig, name: str, columns: Sequence[str], rows, plot: bool) -> Path:
    path = write_csv(cfg.out / name, columns, rows, header(cfg))
    if plot or cfg.plot_script:
        write_plot_script(path, columns)
    return path


# Commands

def cmd_sweep(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    grid = SweepGrid(k1_values=cfg.k1_values, k2_values=cfg.k2_values, replicates=cfg.replicates, base_seed=cfg.seed)
    rmap = experiments.sweep_r_hat(
        h, grid, control_spec(cfg, h), integration_plan(cfg), initial_condition(cfg),
        workers=cfg.workers, window=window(cfg), triadic_sign=cfg.triadic_sign,
        omega=explicit_omega(cfg, h),
    )
    rows = [
        (k1, k2, rmap.mode, rmap.mean[i][j], rmap.std[i][j], rmap.replicates)
        for i, k1 in enumerate(rmap.k1_values)
        for j, k2 in enumerate(rmap.k2_values)
    ]
    _emit(cfg, "rhat_map.csv", ["k1", "k2", "mode", "r_hat_mean", "r_hat_std", "replicates"], rows, plot)
    summary = experiments.map_summary(rmap)
    logger.info(f"Map summary: {summary}")
    return EXIT_OK


def cmd_pin(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    m_values = cfg.m_values or [round(h.n * f / 5) for f in range(6)]
    mode = cfg.mode if cfg.mode != "none" else "full"
    rows = experiments.pinning_sweep(
        h, m_values, cfg.pin_couplings, mode, cfg.replicates, cfg.seed, integration_plan(cfg),
        initial_condition(cfg), workers=cfg.workers, window=window(cfg), omega=explicit_omega(cfg, h),
        triadic_sign=cfg.triadic_sign,
    )
    _emit(
        cfg, "pin_sweep.csv", ["m", "k1", "k2", "mode", "r_hat_mean"],
        [(r.m, r.k1, r.k2, r.mode, r.r_hat_mean) for r in rows], plot,
    )
    return EXIT_OK


def cmd_switch(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    omega = explicit_omega(cfg, h)
    before = ModelParams(
        k1=cfg.k1, k2=cfg.k2, omega=np.zeros(h.n) if omega is None else omega, triadic_sign=cfg.triadic_sign
    )
    after = before.with_couplings(k2=cfg.k2_after)
    unctrl, ctrl = experiments.switch_experiment(
        h, before, after, cfg.t_switch, integration_plan(cfg), control_spec(cfg, h), cfg.seed,
        initial_condition(cfg, full_circle=True), window(cfg),
    )
    rows = [
        (t, r_u, r_c, i_c)
        for (t, r_u), (_, r_c), (_, i_c) in zip(unctrl.r_series, ctrl.r_series, ctrl.intensity_series)
    ]
    _emit(cfg, "switch.csv", ["t", "R_unctrl", "R_ctrl", "intensity"], rows, plot)
    return EXIT_OK


def cmd_basin(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    omega = explicit_omega(cfg, h)
    p = ModelParams(
        k1=cfg.k1, k2=cfg.k2, omega=np.zeros(h.n) if omega is None else omega, triadic_sign=cfg.triadic_sign
    )
    result = experiments.basin_analysis(
        h, p, cfg.n_ic, cfg.seed, integration_plan(cfg), draw_omega=omega is None, workers=cfg.workers,
        omega_low=cfg.omega_low, omega_high=cfg.omega_high,
    )
    larger = "" if result.mean_larger_fraction is None else result.mean_larger_fraction
    rows = [(state, fraction, larger) for state, fraction in result.fractions.items()]
    _emit(cfg, "basins.csv", ["state", "fraction", "mean_larger_fraction"], rows, plot)
    return EXIT_OK


def cmd_cost(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    summaries = experiments.cost_campaign(
        h, cfg.k1, cfg.k2, cfg.replicates, cfg.seed, integration_plan(cfg), cfg.m,
        initial_condition(cfg), workers=cfg.workers, window=window(cfg), omega=explicit_omega(cfg, h),
        triadic_sign=cfg.triadic_sign,
    )
    rows = [(s.mode, s.median, s.q1, s.q3, s.outliers) for s in summaries.values()]
    _emit(cfg, "cost.csv", ["mode", "median", "q1", "q3", "outliers"], rows, plot)
    if cfg.cost_grid:
        grid = SweepGrid(
            k1_values=cfg.k1_values, k2_values=cfg.k2_values, replicates=cfg.replicates, base_seed=cfg.seed
        )
        medians = experiments.cost_map(
            h, grid, integration_plan(cfg), cfg.m, initial_condition(cfg),
            workers=cfg.workers, window=window(cfg), omega=explicit_omega(cfg, h),
            triadic_sign=cfg.triadic_sign,
        )
        rows = [
            (k1, k2, mode, medians[mode][i, j])
            for i, k1 in enumerate(grid.k1_values)
            for j, k2 in enumerate(grid.k2_values)
            for mode in medians
        ]
        _emit(cfg, "cost_map.csv", ["k1", "k2", "mode", "median_cost"], rows, plot)
    return EXIT_OK


def cmd_trajectory(cfg: ExperimentConfig, plot: bool = False) -> int:
    h = build_hypergraph(cfg)
    omega = explicit_omega(cfg, h)
    p = ModelParams(
        k1=cfg.k1, k2=cfg.k2, omega=np.zeros(h.n) if omega is None else omega, triadic_sign=cfg.triadic_sign
    )
    runs = experiments.trajectory_experiment(
        h, p, integration_plan(cfg), cfg.seed, initial_condition(cfg), cfg.m, window(cfg)
    )
    rows = [
        (t, r_n, r_f, r_p)
        for (t, r_n), (_, r_f), (_, r_p) in zip(
            runs["none"].r_series, runs["full"].r_series, runs["pairwise_only"].r_series
        )
    ]
    _emit(cfg, "trajectory.csv", ["t", "R_unctrl", "R_full", "R_pairwise"], rows, plot)
    return EXIT_OK


def cmd_gen(cfg: ExperimentConfig, plot: bool = False) -> int:
    if cfg.topology == "file":
        raise ConfigError("gen needs topology all_to_all or random_sc")
    h = build_hypergraph(cfg)
    ensure_dir(cfg.out)
    path = save_hypergraph(h, cfg.out / "hypergraph.txt")
    logger.info(f"Wrote {h!r} to {path}")
    return EXIT_OK


def cmd_validate(flip_sign: bool = False, hypergraph: Optional[Path] = None, seed: int = 0) -> int:
    h = load_hypergraph(hypergraph) if hypergraph is not None else None
    report = run_validation(flip_sign=flip_sign, hypergraph=h, seed=seed)
    for check in report.checks:
        print(
            f"{'PASS' if check.passed else 'FAIL'}  {check.name:<24} "
            f"residual={check.residual:.3e}  tol={check.tolerance:.1e}  {check.detail}"
        )
    print("ALL CHECKS PASSED" if report.passed else "VALIDATION FAILED")
    return EXIT_OK if report.passed else EXIT_FAILURE


COMMANDS: Dict[str, Callable[[ExperimentConfig, bool], int]] = {
    "sweep": cmd_sweep,
    "pin": cmd_pin,
    "switch": cmd_switch,
    "basin": cmd_basin,
    "cost": cmd_cost,
    "trajectory": cmd_trajectory,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value configuration file")
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("--plot-script", action="store_true", help="write a gnuplot script next to the CSV")

    parser = argparse.ArgumentParser(prog="hypersync", description="Higher-order Kuramoto synchronization control")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep": "R-hat map over a (K1, K2) grid",
        "pin": "R-hat as a function of the number of pinned nodes",
        "switch": "coupling switch run with and without control",
        "basin": "basin sizes of the asymptotic states",
        "cost": "control cost of full and pairwise control",
        "trajectory": "R(t) without control and under both control modes",
        "gen": "write a hypergraph file",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)

    val = sub.add_parser("validate", help="run the numerical self-checks")
    val.add_argument("--flip-sign", action="store_true", help="use the negative triadic sign")
    val.add_argument("--hypergraph", type=Path, help="hypergraph file to validate on")
    val.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.flip_sign, args.hypergraph, args.seed)
        cfg = load_config(args.config, args.overrides, args.seed, args.workers, args.out)
        logger.info(f"Running {args.command} with seed={cfg.seed}, workers={cfg.workers}, out={cfg.out}")
        return COMMANDS[args.command](cfg, args.plot_script)
    except HypersyncError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
