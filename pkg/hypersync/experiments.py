"""Simulation campaigns: coupling maps, pinning sweeps, switch runs, basins and control cost."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from scipy import integrate as sp_integrate

from hypersync.control import ControlledField, control_intensity
from hypersync.dynamics import (
    averaged_order_parameter,
    check_resonance,
    cluster_order_parameter,
    draw_frequencies,
    order_parameter,
    wrap_phase,
)
from hypersync.exceptions import HypersyncError, ParameterError
from hypersync.hypergraph import Hypergraph
from hypersync.integrate import integrate
from hypersync.models import (
    BasinResult,
    ControlMode,
    ControlSpec,
    CostSummary,
    InitialCondition,
    IntegrationPlan,
    ModelParams,
    ParameterSwitch,
    PinningRow,
    RHatMap,
    RunRecord,
    StateLabel,
    SweepGrid,
)
from hypersync.settings import settings
from hypersync.utils import derive_seed, get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Window = Tuple[float, float]
CONTROL_MODES: Tuple[ControlMode, ...] = ("full", "pairwise_only")


# Single runs

class _RunObserver:
    """Records R(t) and the mean |h_i| at each sample, and |h_i| at every step for the cost.

    The integrator is driven with sample_every=1 for controlled runs;
    R and intensity are only stored on the caller's sample cadence.
    """

    def __init__(self, spec: ControlSpec, plan: IntegrationPlan):
        self.spec = spec
        self.plan = plan
        self.times: List[float] = []
        self.r: List[float] = []
        self.intensity: List[float] = []
        self.step_times: List[float] = []
        self.controls: List[np.ndarray] = []

    def _is_sample(self, t: float) -> bool:
        k = int(round((t - self.plan.t0) / self.plan.dt))
        return k % self.plan.sample_every == 0 or k == self.plan.n_steps

    def __call__(self, t: float, theta: np.ndarray, field: ControlledField) -> None:
        h = field.control(theta) if self.spec.active else None
        if h is not None:
            self.step_times.append(t)
            self.controls.append(np.abs(h))
        if not self._is_sample(t):
            return
        self.times.append(t)
        self.r.append(order_parameter(theta))
        self.intensity.append(0.0 if h is None else control_intensity(h, len(self.spec.pinned)))


def _with_drawn_omega(
    h: Hypergraph, p: ModelParams, plan: IntegrationPlan, ic: InitialCondition, rng: np.random.Generator
) -> Tuple[ModelParams, IntegrationPlan]:
    if not ic.draw_omega:
        return p, plan
    omega = draw_frequencies(h, rng, ic.omega_low, ic.omega_high)
    p = p.with_omega(omega)
    if plan.switches:
        switches = tuple(ParameterSwitch(time=s.time, params=s.params.with_omega(omega)) for s in plan.switches)
        plan = plan.model_copy(update={"switches": switches})
    return p, plan


def run_once(
    h: Hypergraph,
    p: ModelParams,
    spec: ControlSpec,
    ic: InitialCondition,
    plan: IntegrationPlan,
    seed: int,
    window: Optional[Window] = None,
    theta0: Optional[np.ndarray] = None,
) -> RunRecord:
    """Integrate the controlled model once and summarize it.

    With `ic.draw_omega` the frequencies are drawn from the seed (and resampled
    past resonances) before the initial phases. Explicit frequencies in `p`
    must pass the resonance guard as given.
    The control cost is accumulated on every integration step, independent
    of `plan.sample_every`.
    """
    rng = np.random.default_rng(seed)
    p, plan = _with_drawn_omega(h, p, plan, ic, rng)
    if not ic.draw_omega and spec.active:
        check_resonance(h, p.omega_array)
    if theta0 is None:
        theta0 = rng.uniform(ic.theta_low, ic.theta_high, size=h.n)

    field = ControlledField(h, p, spec)
    obs = _RunObserver(spec, plan)
    step_plan = plan.model_copy(update={"sample_every": 1}) if spec.active else plan
    result = integrate(field, theta0, step_plan, observers=[obs])

    r_series = list(zip(obs.times, obs.r))
    t0, t_fin = window if window is not None else (settings.R_HAT_T0, settings.R_HAT_T_FIN)
    r_hat = averaged_order_parameter(r_series, t0, t_fin)
    cost = None
    if spec.active:
        cost = control_cost(obs.step_times, np.array(obs.controls), len(spec.pinned))
    final = wrap_phase(result.final)
    logger.debug(f"run seed={seed} mode={spec.mode} M={spec.m}: r_hat={r_hat:.4f}")
    return RunRecord(
        r_series=r_series,
        intensity_series=list(zip(obs.times, obs.intensity)),
        r_hat=min(max(r_hat, 0.0), 1.0),
        final_theta=final.tolist(),
        cost=cost,
        classification=classify_state(final),
        seed=seed,
        omega=list(p.omega),
        pinned=list(spec.pinned),
    )


@dataclass(frozen=True)
class RunTask:
    """Picklable work item for the process pool."""

    h: Hypergraph
    params: ModelParams
    spec: ControlSpec
    ic: InitialCondition
    plan: IntegrationPlan
    seed: int
    window: Optional[Window] = None


def execute_task(task: RunTask) -> Optional[RunRecord]:
    """run_once on a task; library errors are logged and give None."""
    try:
        return run_once(task.h, task.params, task.spec, task.ic, task.plan, task.seed, task.window)
    except HypersyncError as e:
        logger.warning(f"Run with seed {task.seed} failed: {e}")
        return None


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Ordered map, in a process pool when workers > 1."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items, chunksize=chunksize))


def _mean_std(values: Iterable[float]) -> Tuple[float, float]:
    finite = [v for v in values if v is not None and np.isfinite(v)]
    if not finite:
        return float("nan"), float("nan")
    return float(np.mean(finite)), float(np.std(finite))


def _campaign_ic(ic: Optional[InitialCondition], omega: Optional[np.ndarray]) -> InitialCondition:
    """Explicit frequencies switch off the per-replicate frequency draw."""
    ic = ic or InitialCondition()
    if omega is not None and ic.draw_omega:
        ic = ic.model_copy(update={"draw_omega": False})
    return ic


def _base_params(
    h: Hypergraph, k1: float, k2: float, omega: Optional[np.ndarray] = None,
    triadic_sign: Optional[int] = None,
) -> ModelParams:
    """Couplings with explicit frequencies, or a zero placeholder replaced by drawn ones."""
    sign = settings.TRIADIC_SIGN if triadic_sign is None else triadic_sign
    return ModelParams(k1=k1, k2=k2, omega=np.zeros(h.n) if omega is None else omega, triadic_sign=sign)


# Campaigns

def sweep_r_hat(
    h: Hypergraph,
    grid: SweepGrid,
    spec: ControlSpec,
    plan: IntegrationPlan,
    ic: Optional[InitialCondition] = None,
    workers: int = 1,
    window: Optional[Window] = None,
    triadic_sign: Optional[int] = None,
    omega: Optional[np.ndarray] = None,
) -> RHatMap:
    """Mean and spread of R-hat over replicates for each (K1, K2) cell.

    Replicate r of cell (i, j) uses seed derive_seed(base_seed, i, j, r),
    so the table does not depend on the worker count.
    Explicit `omega` is used for every replicate instead of a fresh draw.
    """
    ic = _campaign_ic(ic, omega)
    tasks = []
    for i, k1 in enumerate(grid.k1_values):
        for j, k2 in enumerate(grid.k2_values):
            params = _base_params(h, k1, k2, omega, triadic_sign)
            for r in range(grid.replicates):
                seed = derive_seed(grid.base_seed, i, j, r)
                tasks.append(RunTask(h, params, spec, ic, plan, seed, window))

    logger.info(
        f"Sweeping {len(grid.k1_values)}x{len(grid.k2_values)} grid, "
        f"{grid.replicates} replicates, mode={spec.mode}, M={spec.m}"
    )
    records = parallel_map(execute_task, tasks, workers)

    mean = np.full((len(grid.k1_values), len(grid.k2_values)), np.nan)
    std = np.full_like(mean, np.nan)
    idx = 0
    for i in range(len(grid.k1_values)):
        for j in range(len(grid.k2_values)):
            chunk = records[idx: idx + grid.replicates]
            idx += grid.replicates
            mean[i, j], std[i, j] = _mean_std(rec.r_hat if rec else None for rec in chunk)
            if np.isnan(mean[i, j]):
                logger.warning(f"Cell K1={grid.k1_values[i]}, K2={grid.k2_values[j]} has no successful run")
    return RHatMap(
        k1_values=grid.k1_values,
        k2_values=grid.k2_values,
        mode=spec.mode,
        replicates=grid.replicates,
        mean=mean.tolist(),
        std=std.tolist(),
    )


def pinned_order(n: int, base_seed: int) -> np.ndarray:
    """Seeded node shuffle; the first M entries form the pinned set."""
    return np.random.default_rng(derive_seed(base_seed, n, n)).permutation(n)


def pinning_sweep(
    h: Hypergraph,
    m_values: Sequence[int],
    couplings: Sequence[Tuple[float, float]],
    mode: ControlMode,
    replicates: int,
    base_seed: int,
    plan: IntegrationPlan,
    ic: Optional[InitialCondition] = None,
    workers: int = 1,
    window: Optional[Window] = None,
    omega: Optional[np.ndarray] = None,
    triadic_sign: Optional[int] = None,
) -> List[PinningRow]:
    """Mean R-hat as a function of the number of pinned nodes.

    Replicates draw fresh frequencies unless `omega` is given; seeds are shared across M so every
    row is compared on the same realizations.
    """
    if any(not 0 <= m <= h.n for m in m_values):
        raise ParameterError(f"Pinned counts must lie in [0, {h.n}]")
    ic = _campaign_ic(ic, omega)
    order = pinned_order(h.n, base_seed)
    keys, tasks = [], []
    for c, (k1, k2) in enumerate(couplings):
        params = _base_params(h, k1, k2, omega, triadic_sign)
        for m in m_values:
            spec = ControlSpec(mode=mode, pinned=tuple(int(v) for v in order[:m]))
            keys.append((m, k1, k2))
            for r in range(replicates):
                tasks.append(RunTask(h, params, spec, ic, plan, derive_seed(base_seed, c, r), window))

    logger.info(f"Pinning sweep over M={list(m_values)} at {len(couplings)} couplings, mode={mode}")
    records = parallel_map(execute_task, tasks, workers)

    rows = []
    for idx, (m, k1, k2) in enumerate(keys):
        chunk = records[idx * replicates: (idx + 1) * replicates]
        mean, std = _mean_std(rec.r_hat if rec else None for rec in chunk)
        rows.append(PinningRow(m=m, k1=k1, k2=k2, mode=mode, r_hat_mean=mean, r_hat_std=std))
    return rows


def switch_experiment(
    h: Hypergraph,
    p_before: ModelParams,
    p_after: ModelParams,
    t_switch: float,
    plan: IntegrationPlan,
    spec: ControlSpec,
    seed: int,
    ic: Optional[InitialCondition] = None,
    window: Optional[Window] = None,
) -> Tuple[RunRecord, RunRecord]:
    """Uncontrolled and controlled runs with couplings switched at t_switch.

    Both runs share seed, frequencies and initial phases.
    """
    if not plan.t0 < t_switch < plan.t_end:
        raise ParameterError(f"Switch time {t_switch} outside ({plan.t0}, {plan.t_end})")
    ic = ic or InitialCondition(theta_high=2.0 * np.pi)
    plan = plan.model_copy(update={"switches": (ParameterSwitch(time=t_switch, params=p_after),)})
    uncontrolled = run_once(h, p_before, ControlSpec(mode="none"), ic, plan, seed, window)
    controlled = run_once(h, p_before, spec, ic, plan, seed, window)
    logger.info(
        f"Switch at t={t_switch}: r_hat uncontrolled={uncontrolled.r_hat:.3f}, "
        f"controlled={controlled.r_hat:.3f}"
    )
    return uncontrolled, controlled


def trajectory_experiment(
    h: Hypergraph,
    p: ModelParams,
    plan: IntegrationPlan,
    seed: int,
    ic: Optional[InitialCondition] = None,
    m: Optional[int] = None,
    window: Optional[Window] = None,
) -> Dict[ControlMode, RunRecord]:
    """R(t) without control and under both control modes from shared frequencies and phases."""
    ic = ic or InitialCondition()
    pinned = tuple(range(h.n)) if m is None else tuple(int(v) for v in pinned_order(h.n, seed)[:m])
    out: Dict[ControlMode, RunRecord] = {}
    for mode in ("none",) + CONTROL_MODES:
        spec = ControlSpec(mode=mode, pinned=() if mode == "none" else pinned)
        out[mode] = run_once(h, p, spec, ic, plan, seed, window)
    return out


# State classification and basins

def classify_state(
    theta: np.ndarray,
    sync_threshold: Optional[float] = None,
    cluster_threshold: Optional[float] = None,
) -> StateLabel:
    """Sync if R >= sync_threshold, two-cluster if R_2 >= cluster_threshold, else incoherent.

    For ideal antipodal clusters R = |2p - 1|, so the larger fraction is (1 + R)/2.
    """
    sync_threshold = settings.SYNC_THRESHOLD if sync_threshold is None else sync_threshold
    cluster_threshold = settings.CLUSTER_THRESHOLD if cluster_threshold is None else cluster_threshold
    r = order_parameter(theta)
    if r >= sync_threshold:
        return StateLabel(kind="sync")
    if cluster_order_parameter(theta, 2) >= cluster_threshold:
        larger = min(1.0, max(0.5, 0.5 * (1.0 + r)))
        return StateLabel(kind="two_cluster", larger_fraction=larger)
    return StateLabel(kind="incoherent")


def _final_state(task: Tuple[Hypergraph, ModelParams, IntegrationPlan, np.ndarray]) -> Optional[np.ndarray]:
    h, p, plan, theta0 = task
    try:
        return integrate(ControlledField(h, p, ControlSpec()), theta0, plan).final
    except HypersyncError as e:
        logger.warning(f"Basin run failed: {e}")
        return None


def basin_analysis(
    h: Hypergraph,
    p: ModelParams,
    n_ic: int,
    seed: int,
    plan: Optional[IntegrationPlan] = None,
    draw_omega: bool = True,
    workers: int = 1,
    omega_low: float = 0.0,
    omega_high: float = 1.0,
) -> BasinResult:
    """Relative basin sizes from n_ic uniform initial phases on [0, 2*pi).

    Frequencies are fixed for the whole analysis: drawn once from `seed`
    when `draw_omega`, otherwise taken from `p`. Runs are uncontrolled, so
    no resonance guard applies and omega_low == omega_high gives identical
    oscillators.
    """
    if n_ic < 1:
        raise ParameterError("basin_analysis needs at least one initial condition")
    plan = plan or IntegrationPlan()
    if draw_omega:
        omega = np.random.default_rng(derive_seed(seed, 0)).uniform(omega_low, omega_high, size=h.n)
        p = p.with_omega(omega)
    tasks = [
        (h, p, plan, np.random.default_rng(derive_seed(seed, 1, j)).uniform(0.0, 2.0 * np.pi, size=h.n))
        for j in range(n_ic)
    ]
    logger.info(f"Basin analysis: {n_ic} initial conditions at K1={p.k1}, K2={p.k2}")
    finals = parallel_map(_final_state, tasks, workers)

    counts = {"sync": 0, "two_cluster": 0, "incoherent": 0}
    larger = []
    done = 0
    for final in finals:
        if final is None:
            continue
        done += 1
        label = classify_state(wrap_phase(final))
        counts[label.kind] += 1
        if label.larger_fraction is not None:
            larger.append(label.larger_fraction)
    if done == 0:
        raise HypersyncError("Every basin run failed")
    return BasinResult(
        n_ic=n_ic,
        fractions={k: v / done for k, v in counts.items()},
        mean_larger_fraction=float(np.mean(larger)) if larger else None,
    )


# Control cost

def control_cost(
    times: Sequence[float],
    abs_controls: np.ndarray,
    pinned_count: int,
    horizon: Optional[float] = None,
) -> float:
    """(1 / (T M)) sum_i integral |h_i| dt by the trapezoid rule.

    `abs_controls` holds one row of |h_i| per sample time.
    """
    times = np.asarray(times, dtype=float)
    abs_controls = np.asarray(abs_controls, dtype=float)
    if times.size == 0 or abs_controls.size == 0:
        raise ParameterError("Control cost of an empty series")
    if pinned_count < 1:
        raise ParameterError("Control cost needs at least one pinned node")
    if abs_controls.ndim == 1:
        abs_controls = abs_controls[:, None]
    if abs_controls.shape[0] != times.size:
        raise ParameterError(f"{abs_controls.shape[0]} control samples for {times.size} times")
    horizon = times[-1] - times[0] if horizon is None else horizon
    if horizon <= 0.0:
        raise ParameterError("Control cost needs a positive horizon")
    per_node = sp_integrate.trapezoid(np.abs(abs_controls), times, axis=0)
    return float(per_node.sum() / (horizon * pinned_count))


def summarize_costs(mode: ControlMode, costs: Sequence[Optional[float]]) -> CostSummary:
    """Median, quartiles and outliers (cost > COST_OUTLIER_FACTOR x median)."""
    values = np.array([c for c in costs if c is not None and np.isfinite(c)], dtype=float)
    if values.size == 0:
        nan = float("nan")
        return CostSummary(mode=mode, median=nan, q1=nan, q3=nan, outliers=0, mean_without_outliers=nan, costs=[])
    median = float(np.median(values))
    q1, q3 = (float(v) for v in np.percentile(values, [25, 75]))
    mask = values > settings.COST_OUTLIER_FACTOR * median
    if mask.any():
        logger.warning(f"{int(mask.sum())} {mode} cost outliers above {settings.COST_OUTLIER_FACTOR} x median")
    kept = values[~mask]
    return CostSummary(
        mode=mode,
        median=median,
        q1=q1,
        q3=q3,
        outliers=int(mask.sum()),
        mean_without_outliers=float(kept.mean()) if kept.size else float("nan"),
        costs=values.tolist(),
    )


def cost_campaign(
    h: Hypergraph,
    k1: float,
    k2: float,
    replicates: int,
    base_seed: int,
    plan: IntegrationPlan,
    m: Optional[int] = None,
    ic: Optional[InitialCondition] = None,
    workers: int = 1,
    window: Optional[Window] = None,
    omega: Optional[np.ndarray] = None,
    triadic_sign: Optional[int] = None,
) -> Dict[ControlMode, CostSummary]:
    """Costs of full and pairwise control over the same seeds."""
    ic = _campaign_ic(ic, omega)
    pinned = tuple(range(h.n)) if m is None else tuple(int(v) for v in pinned_order(h.n, base_seed)[:m])
    params = _base_params(h, k1, k2, omega, triadic_sign)
    tasks = [
        RunTask(h, params, ControlSpec(mode=mode, pinned=pinned), ic, plan, derive_seed(base_seed, r), window)
        for mode in CONTROL_MODES
        for r in range(replicates)
    ]
    logger.info(f"Cost campaign at K1={k1}, K2={k2}: {replicates} paired seeds, M={len(pinned)}")
    records = parallel_map(execute_task, tasks, workers)
    out = {}
    for idx, mode in enumerate(CONTROL_MODES):
        chunk = records[idx * replicates: (idx + 1) * replicates]
        out[mode] = summarize_costs(mode, [rec.cost if rec else None for rec in chunk])
    return out


def cost_map(
    h: Hypergraph,
    grid: SweepGrid,
    plan: IntegrationPlan,
    m: Optional[int] = None,
    ic: Optional[InitialCondition] = None,
    workers: int = 1,
    window: Optional[Window] = None,
    omega: Optional[np.ndarray] = None,
    triadic_sign: Optional[int] = None,
) -> Dict[ControlMode, np.ndarray]:
    """Median control cost per (K1, K2) cell for both control modes."""
    out = {mode: np.full((len(grid.k1_values), len(grid.k2_values)), np.nan) for mode in CONTROL_MODES}
    for i, k1 in enumerate(grid.k1_values):
        for j, k2 in enumerate(grid.k2_values):
            summaries = cost_campaign(
                h, k1, k2, grid.replicates, derive_seed(grid.base_seed, i, j), plan, m, ic,
                workers=workers, window=window, omega=omega, triadic_sign=triadic_sign,
            )
            for mode, summary in summaries.items():
                out[mode][i, j] = summary.median
    return out


def map_summary(rmap: RHatMap, level: Optional[float] = None) -> Dict[str, Optional[float]]:
    """Fraction of cells above `level`, grid mean and max, and onsets along both axes.

    The K1 onset is read along the first K2 value and the K2 onset along
    the first K1 value; None when the level is never reached.
    """
    level = settings.SYNC_LEVEL if level is None else level
    mean = np.array(rmap.mean, dtype=float)
    finite = mean[np.isfinite(mean)]

    def onset(values: Sequence[float], series: np.ndarray) -> Optional[float]:
        above = np.flatnonzero(np.nan_to_num(series, nan=-1.0) > level)
        return float(values[above[0]]) if above.size else None

    return {
        "fraction_above": float(np.mean(finite > level)) if finite.size else float("nan"),
        "mean": float(finite.mean()) if finite.size else float("nan"),
        "max": float(finite.max()) if finite.size else float("nan"),
        "onset_k1": onset(rmap.k1_values, mean[:, 0]),
        "onset_k2": onset(rmap.k2_values, mean[0, :]),
    }
