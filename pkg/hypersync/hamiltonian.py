"""Action-angle Hamiltonian whose invariant tori carry the higher-order Kuramoto model.

    H(I, theta) = sum_i omega_i I_i
        - (K1/N)   sum_ij  A_ij  sqrt(I_i I_j)      (I_j - I_i)         sin(theta_j - theta_i)
        - (K2/N^2) sum_ijk B_ijk cbrt(I_i I_j I_k) (I_j + I_k - 2 I_i) sin(theta_j + theta_k - 2 theta_i)

On the torus I = c * 1 the action equations vanish and the angles follow
the model with couplings (2c K1, 2c K2); c = 1/2 gives the model itself.
The embedding realizes the `triadic_sign = +1` convention only.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from hypersync.dynamics import linearize
from hypersync.exceptions import ActionDomainError, DimensionError
from hypersync.fourier import FourierTerms, build_terms
from hypersync.hypergraph import Hypergraph
from hypersync.models import ModelParams
from hypersync.settings import settings


@dataclass(frozen=True)
class ActionAngleState:
    """Actions I > 0 and angles theta, both of length n."""

    actions: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        actions = np.asarray(self.actions, dtype=float)
        angles = np.asarray(self.angles, dtype=float)
        if actions.ndim != 1 or actions.shape != angles.shape:
            raise DimensionError(
                f"Actions {actions.shape} and angles {angles.shape} must be equal-length vectors"
            )
        if not np.all(actions > 0.0):
            raise ActionDomainError(f"Actions must be positive, min is {actions.min():.3g}")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "angles", angles)

    @property
    def n(self) -> int:
        return int(self.actions.shape[0])

    def as_vector(self) -> np.ndarray:
        """Concatenated (I, theta) vector used by the integrator."""
        return np.concatenate([self.actions, self.angles])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "ActionAngleState":
        y = np.asarray(y, dtype=float)
        if y.ndim != 1 or y.size % 2:
            raise DimensionError(f"State vector of shape {y.shape} is not (2n,)")
        n = y.size // 2
        return cls(actions=y[:n], angles=y[n:])


def torus_state(n: int, c: float, theta: Optional[np.ndarray] = None) -> ActionAngleState:
    """State on the invariant torus I_i = c."""
    angles = np.zeros(n) if theta is None else np.asarray(theta, dtype=float)
    return ActionAngleState(actions=np.full(n, float(c)), angles=angles)


def clamp_actions(actions: np.ndarray) -> np.ndarray:
    if not np.all(actions > 0.0):
        bad = int(np.argmin(actions))
        raise ActionDomainError(f"Action I_{bad} = {actions[bad]:.3g} is not positive")
    return np.maximum(actions, settings.ACTION_FLOOR)


def _terms_for(h: Hypergraph, p: ModelParams, s: ActionAngleState) -> FourierTerms:
    if s.n != h.n or p.n != h.n:
        raise DimensionError(f"State length {s.n} and frequencies {p.n} must match n={h.n}")
    return build_terms(h)


def hamiltonian_value(h: Hypergraph, p: ModelParams, s: ActionAngleState) -> float:
    """H(I, theta)."""
    terms = _terms_for(h, p, s)
    actions = clamp_actions(s.actions)
    g, k_dot_i, _ = terms.action_factors(actions)
    coef = terms.coefficients(p)
    interaction = np.dot(coef * g * k_dot_i, np.sin(terms.phases(s.angles)))
    return float(np.dot(p.omega_array, actions) + interaction)


def hamiltonian_flow_rhs(
    h: Hypergraph, p: ModelParams, s: ActionAngleState
) -> Tuple[np.ndarray, np.ndarray]:
    """(I_dot, theta_dot) = (-dH/dtheta, dH/dI)."""
    terms = _terms_for(h, p, s)
    return _flow(terms, p, s.actions, s.angles)


def _flow(
    terms: FourierTerms, p: ModelParams, actions: np.ndarray, angles: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    actions = clamp_actions(actions)
    g, k_dot_i, df = terms.action_factors(actions)
    coef = terms.coefficients(p)
    phi = terms.phases(angles)
    i_dot = -(terms.wave_t @ (coef * g * k_dot_i * np.cos(phi)))
    weights = (coef * np.sin(phi))[terms.rows]
    theta_dot = p.omega_array + np.bincount(terms.cols, df * weights, minlength=terms.n)
    return i_dot, theta_dot


class HamiltonianFlow:
    """The flow as a vector field on y = (I, theta) in R^{2n}."""

    def __init__(self, h: Hypergraph, p: ModelParams):
        if p.n != h.n:
            raise DimensionError(f"Frequency vector has length {p.n}, expected {h.n}")
        self.h = h
        self.params = p
        self._terms = build_terms(h)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        n = self.h.n
        if y.shape != (2 * n,):
            raise DimensionError(f"State vector has shape {y.shape}, expected ({2 * n},)")
        i_dot, theta_dot = _flow(self._terms, self.params, y[:n], y[n:])
        return np.concatenate([i_dot, theta_dot])

    def with_params(self, p: ModelParams) -> "HamiltonianFlow":
        return HamiltonianFlow(self.h, p)

    def energy(self, y: np.ndarray) -> float:
        return hamiltonian_value(self.h, self.params, ActionAngleState.from_vector(y))


def flow_jacobian(
    h: Hypergraph, p: ModelParams, s: ActionAngleState, eps: float = 1e-6
) -> np.ndarray:
    """Central-difference Jacobian of the flow at s, in (I, theta) block order."""
    return linearize(HamiltonianFlow(h, p), s.as_vector(), eps)
