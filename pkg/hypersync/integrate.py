"""Fixed-step classical Runge-Kutta integration with observers and parameter switches."""
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from hypersync.exceptions import DimensionError, DivergenceError, ParameterError
from hypersync.models import IntegrationPlan, ModelParams
from hypersync.utils import get_logger

logger = get_logger(__name__)


class VectorField(Protocol):
    def __call__(self, y: np.ndarray) -> np.ndarray: ...


class SwitchableField(VectorField, Protocol):
    def with_params(self, p: ModelParams) -> "SwitchableField": ...


Observer = Callable[[float, np.ndarray, VectorField], None]


@dataclass
class IntegrationResult:
    """Final state and the states seen by the observers."""

    final: np.ndarray
    times: List[float] = dataclass_field(default_factory=list)
    states: List[np.ndarray] = dataclass_field(default_factory=list)

    @property
    def series(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.times, self.states))


def rk4_step(f: VectorField, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order step."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def switch_steps(plan: IntegrationPlan) -> List[Tuple[int, ModelParams]]:
    """Switch events as (step index, params), times snapped to the step grid."""
    events = []
    for switch in plan.switches:
        step = int(round((switch.time - plan.t0) / plan.dt))
        snapped = plan.t0 + step * plan.dt
        if abs(snapped - switch.time) > 1e-9 * max(1.0, abs(switch.time)):
            logger.warning(f"Switch at t={switch.time} snapped to grid time t={snapped}")
        events.append((step, switch.params))
    return events


def integrate(
    f: VectorField,
    s0: np.ndarray,
    plan: IntegrationPlan,
    observers: Sequence[Observer] = (),
    record: bool = False,
) -> IntegrationResult:
    """Integrate y' = f(y) from plan.t0 to plan.t_end with step plan.dt.

    Observers receive (t, y, field) at t0, every `sample_every` steps and
    at t_end. Times are t0 + k*dt. The state is never reduced modulo 2*pi.
    """
    y = np.array(s0, dtype=float)
    probe = np.asarray(f(y))
    if probe.shape != y.shape:
        raise DimensionError(f"Field returns shape {probe.shape} for a state of shape {y.shape}")

    events = switch_steps(plan)
    if events and not hasattr(f, "with_params"):
        raise ParameterError("Parameter switches need a field with a with_params method")

    n_steps = plan.n_steps
    result = IntegrationResult(final=y)

    def observe(t: float, state: np.ndarray, field: VectorField) -> None:
        for obs in observers:
            obs(t, state, field)
        if record:
            result.times.append(t)
            result.states.append(state.copy())

    next_event = 0
    observe(plan.t0, y, f)
    for k in range(n_steps):
        while next_event < len(events) and events[next_event][0] <= k:
            f = f.with_params(events[next_event][1])
            logger.debug(f"Parameters switched at t={plan.t0 + k * plan.dt}")
            next_event += 1
        y = rk4_step(f, y, plan.dt)
        t = plan.t0 + (k + 1) * plan.dt
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"Non-finite state at t={t}", t=t)
        if (k + 1) % plan.sample_every == 0 or k + 1 == n_steps:
            observe(t, y, f)

    result.final = y
    return result


class SeriesRecorder:
    """Observer storing (t, value(y, field)) pairs."""

    def __init__(self, value: Callable[[np.ndarray, VectorField], float], name: Optional[str] = None):
        self.value = value
        self.name = name
        self.samples: List[Tuple[float, float]] = []

    def __call__(self, t: float, y: np.ndarray, field: VectorField) -> None:
        self.samples.append((t, float(self.value(y, field))))
