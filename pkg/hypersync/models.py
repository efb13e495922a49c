"""Pydantic models for simulation inputs, results and request/response validation."""
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hypersync.settings import settings

ControlMode = Literal["none", "pairwise_only", "full"]
StateKind = Literal["sync", "two_cluster", "incoherent"]
TopologyKind = Literal["all_to_all", "random_sc", "file"]


def _as_float_tuple(value):
    if isinstance(value, np.ndarray):
        return tuple(float(x) for x in value.ravel())
    return value


class ModelParams(BaseModel):
    """Coupling strengths and natural frequencies."""
    model_config = ConfigDict(frozen=True)

    k1: float = Field(default=0.0, ge=0.0, description="Pairwise coupling strength")
    k2: float = Field(default=0.0, ge=0.0, description="Triadic coupling strength")
    k3: float = Field(default=0.0, ge=0.0, description="Quartic coupling strength")
    omega: Tuple[float, ...] = Field(..., description="Natural frequencies (rad/time)")
    triadic_sign: Literal[1, -1] = Field(
        default_factory=lambda: settings.TRIADIC_SIGN, description="Sign of the sin(2θj-θk-θi) term; +1 is the Hamiltonian-consistent one"
    )

    @field_validator("omega", mode="before")
    @classmethod
    def _omega_as_tuple(cls, v):
        return _as_float_tuple(v)

    @property
    def n(self) -> int:
        return len(self.omega)

    @property
    def omega_array(self) -> np.ndarray:
        return np.asarray(self.omega, dtype=float)

    def with_couplings(
        self,
        k1: Optional[float] = None,
        k2: Optional[float] = None,
        k3: Optional[float] = None,
    ) -> "ModelParams":
        """Copy with some couplings replaced."""
        return ModelParams(
            k1=self.k1 if k1 is None else k1,
            k2=self.k2 if k2 is None else k2,
            k3=self.k3 if k3 is None else k3,
            omega=self.omega,
            triadic_sign=self.triadic_sign,
        )

    def with_omega(self, omega) -> "ModelParams":
        return ModelParams(
            k1=self.k1, k2=self.k2, k3=self.k3, omega=omega, triadic_sign=self.triadic_sign
        )


class ControlSpec(BaseModel):
    """Control mode and pinned node subset. Unpinned nodes receive no control."""
    model_config = ConfigDict(frozen=True)

    mode: ControlMode = "none"
    pinned: Tuple[int, ...] = ()

    @field_validator("pinned")
    @classmethod
    def _distinct_nonnegative(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(set(v)) != len(v):
            raise ValueError("pinned indices must be distinct")
        if any(i < 0 for i in v):
            raise ValueError("pinned indices must be non-negative")
        return v

    @classmethod
    def all_nodes(cls, n: int, mode: ControlMode = "full") -> "ControlSpec":
        return cls(mode=mode, pinned=tuple(range(n)))

    @property
    def active(self) -> bool:
        return self.mode != "none" and len(self.pinned) > 0

    @property
    def m(self) -> int:
        return 0 if self.mode == "none" else len(self.pinned)


class ParameterSwitch(BaseModel):
    """Replace the model parameters from `time` onwards."""
    model_config = ConfigDict(frozen=True)

    time: float
    params: ModelParams


class IntegrationPlan(BaseModel):
    """Fixed-step integration horizon, observer cadence and parameter switches."""
    model_config = ConfigDict(frozen=True)

    t0: float = 0.0
    t_end: float = 40.0
    dt: float = Field(default_factory=lambda: settings.DEFAULT_DT, gt=0.0)
    sample_every: int = Field(default=1, ge=1)
    switches: Tuple[ParameterSwitch, ...] = ()

    @model_validator(mode="after")
    def _check_horizon(self) -> "IntegrationPlan":
        if not self.t0 < self.t_end:
            raise ValueError("t0 must be smaller than t_end")
        times = [s.time for s in self.switches]
        if any(not self.t0 < t < self.t_end for t in times):
            raise ValueError("switch times must lie strictly inside (t0, t_end)")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("switch times must be strictly ascending")
        return self

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))


class InitialCondition(BaseModel):
    """Uniform initial phases, and optionally uniform natural frequencies."""
    model_config = ConfigDict(frozen=True)

    theta_low: float = 0.0
    theta_high: float = 0.3
    draw_omega: bool = True
    omega_low: float = 0.0
    omega_high: float = 1.0

    @model_validator(mode="after")
    def _check_bounds(self) -> "InitialCondition":
        if self.theta_high < self.theta_low or self.omega_high < self.omega_low:
            raise ValueError("upper bounds must not be below lower bounds")
        return self


class StateLabel(BaseModel):
    """Asymptotic state classification."""
    kind: StateKind
    larger_fraction: Optional[float] = Field(default=None, ge=0.5, le=1.0)


class RunRecord(BaseModel):
    """Result of a single simulation."""
    r_series: List[Tuple[float, float]]
    intensity_series: List[Tuple[float, float]]
    r_hat: float = Field(..., ge=0.0, le=1.0)
    final_theta: List[float]
    cost: Optional[float] = None
    classification: Optional[StateLabel] = None
    seed: int
    omega: List[float] = Field(default_factory=list)
    pinned: List[int] = Field(default_factory=list)


class SweepGrid(BaseModel):
    """(K1, K2) grid with replicate count and base seed."""
    k1_values: List[float]
    k2_values: List[float]
    replicates: int = Field(default=1, ge=1)
    base_seed: int = 0

    @field_validator("k1_values", "k2_values")
    @classmethod
    def _ascending(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("grid axes must be nonempty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid axes must be strictly ascending")
        return v


class RHatMap(BaseModel):
    """Mean and spread of R-hat per grid cell; NaN marks failed cells."""
    k1_values: List[float]
    k2_values: List[float]
    mode: ControlMode
    replicates: int
    mean: List[List[float]]
    std: List[List[float]]


class PinningRow(BaseModel):
    m: int
    k1: float
    k2: float
    mode: ControlMode
    r_hat_mean: float
    r_hat_std: float


class BasinResult(BaseModel):
    """Relative basin sizes per state and mean larger-cluster fraction."""
    n_ic: int
    fractions: Dict[StateKind, float]
    mean_larger_fraction: Optional[float] = None


class CostSummary(BaseModel):
    """Control cost statistics for one mode over paired seeds."""
    mode: ControlMode
    median: float
    q1: float
    q3: float
    outliers: int
    mean_without_outliers: float
    costs: List[float]


class CheckResult(BaseModel):
    """One oracle check of the validation suite."""
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


class ValidationReport(BaseModel):
    passed: bool
    checks: List[CheckResult]


class ExperimentConfig(BaseModel):
    """Experiment configuration assembled from a key=value file and overrides."""
    model_config = ConfigDict(extra="forbid")

    # Topology
    topology: TopologyKind = "all_to_all"
    n: int = Field(default=50, ge=2)
    k1_deg: float = 40.0
    k2_deg: float = 20.0
    graph_seed: int = 0
    path: Optional[Path] = None

    # Couplings
    k1: float = Field(default=1.0, ge=0.0)
    k2: float = Field(default=1.0, ge=0.0)
    k1_values: List[float] = Field(default_factory=lambda: list(np.linspace(0.0, 2.0, 11)))
    k2_values: List[float] = Field(default_factory=lambda: list(np.linspace(0.0, 2.0, 11)))
    k2_after: float = Field(default=1.0, ge=0.0)
    t_switch: float = 15.0
    triadic_sign: Literal[1, -1] = Field(default_factory=lambda: settings.TRIADIC_SIGN)

    # Control
    mode: ControlMode = "full"
    m: Optional[int] = Field(default=None, ge=0)
    m_values: Optional[List[int]] = None
    pin_couplings: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 1.0)])

    # Initial conditions
    theta_low: float = 0.0
    theta_high: float = 0.3
    omega_low: float = 0.0
    omega_high: float = 1.0
    omega_path: Optional[Path] = None

    # Integration
    t_end: float = 40.0
    dt: float = Field(default=0.1, gt=0.0)
    sample_every: int = Field(default=1, ge=1)
    r_hat_t0: float = 30.0

    # Campaign
    replicates: int = Field(default_factory=lambda: settings.DEFAULT_REPLICATES, ge=1)
    n_ic: int = Field(default=100, ge=1)
    seed: int = 0
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)
    out: Path = Field(default_factory=lambda: settings.OUTPUT_DIR)
    plot_script: bool = False
    cost_grid: bool = False

    @field_validator("k1_values", "k2_values", mode="before")
    @classmethod
    def _parse_float_list(cls, v):
        if isinstance(v, str):
            return parse_float_list(v)
        return v

    @field_validator("m_values", mode="before")
    @classmethod
    def _parse_int_list(cls, v):
        if isinstance(v, str):
            return [int(x) for x in v.split(",") if x.strip()] if v.strip() else None
        return v

    @field_validator("pin_couplings", mode="before")
    @classmethod
    def _parse_pairs(cls, v):
        if isinstance(v, str):
            pairs = []
            for item in v.split(","):
                if not item.strip():
                    continue
                a, b = item.split("/")
                pairs.append((float(a), float(b)))
            return pairs
        return v

    @field_validator("triadic_sign", mode="before")
    @classmethod
    def _parse_sign(cls, v):
        if isinstance(v, str):
            return int(v)
        return v

    @field_validator("omega_path", "path", mode="before")
    @classmethod
    def _empty_path(cls, v):
        if isinstance(v, str) and not v.strip():
            return None
        return v

    @model_validator(mode="after")
    def _check_topology(self) -> "ExperimentConfig":
        if self.topology == "file" and self.path is None:
            raise ValueError("topology=file requires path")
        if self.m is not None and self.m > self.n and self.topology != "file":
            raise ValueError("m cannot exceed n")
        return self


def parse_float_list(text: str) -> List[float]:
    """Parse `a,b,c` or the inclusive range form `start:stop:count`."""
    text = text.strip()
    if ":" in text:
        start, stop, count = text.split(":")
        return [float(x) for x in np.linspace(float(start), float(stop), int(count))]
    return [float(x) for x in text.split(",") if x.strip()]


class SimulateRequest(BaseModel):
    """Request model for a single controlled run."""
    topology: Literal["all_to_all", "random_sc"] = "all_to_all"
    n: int = Field(default=20, ge=3, le=200)
    k1_deg: float = 10.0
    k2_deg: float = 5.0
    k1: float = Field(default=1.0, ge=0.0)
    k2: float = Field(default=1.0, ge=0.0)
    mode: ControlMode = "full"
    m: Optional[int] = Field(default=None, ge=0)
    seed: int = 0
    t_end: float = Field(default=40.0, gt=0.0)
    dt: float = Field(default=0.1, gt=0.0)
    theta_high: float = 0.3


class SimulateResponse(BaseModel):
    """Response model for a single controlled run."""
    status: str
    r_hat: float
    final_r: float
    mean_intensity: float
    cost: Optional[float]
    classification: StateLabel
    samples: int


class ClassifyRequest(BaseModel):
    phases: List[float] = Field(..., min_length=1)


class ValidateRequest(BaseModel):
    flip_sign: bool = False
