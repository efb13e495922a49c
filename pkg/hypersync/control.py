"""Feedback control terms that keep the oscillators away from synchronization.

The control is the first-order term f = -1/2 {Gamma V} V of the Hamiltonian
control series, differentiated with respect to the actions and evaluated
on the torus I = 1/2. With K the wave-vector matrix of the interaction
terms, C their coefficients, Omega = K omega their frequency combinations
and phi = K theta, it reduces to

    h = -1/8 K^T [ C cos(phi) * K K^T (w cos(phi)) + w sin(phi) * K K^T (C sin(phi)) ]

with w = -C / Omega. Restricting the term table to simplices inside the
pinned set gives the pinning control; columns of K outside that set are
empty, so unpinned components are exactly zero.
"""
from typing import Literal, Optional, Tuple

import numpy as np

from hypersync.dynamics import check_phases, hokm_rhs
from hypersync.exceptions import DimensionError, ParameterError
from hypersync.fourier import FourierTerms, build_terms
from hypersync.hamiltonian import ActionAngleState, clamp_actions
from hypersync.hypergraph import Hypergraph
from hypersync.models import ControlSpec, ModelParams

NormalizeOver = Literal["all_nodes", "pinned"]


def control_terms(h: Hypergraph, spec: ControlSpec) -> Optional[FourierTerms]:
    """Term table used by `spec`, or None when no control is applied."""
    if not spec.active:
        return None
    for i in spec.pinned:
        if not 0 <= i < h.n:
            raise DimensionError(f"Pinned node {i} out of range [0, {h.n})")
    nodes = tuple(sorted(spec.pinned))
    if len(nodes) == h.n:
        nodes = None
    return build_terms(h, nodes, spec.mode == "full")


def _weights(terms: FourierTerms, p: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    coef = terms.coefficients(p)
    freq = terms.check_resonance(p.omega_array)
    return coef, -coef / freq


def _closed_form(
    terms: FourierTerms, coef: np.ndarray, w: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    phi = terms.phases(theta)
    cos, sin = np.cos(phi), np.sin(phi)
    wave, wave_t = terms.wave, terms.wave_t
    first = (coef * cos) * (wave @ (wave_t @ (w * cos)))
    second = (w * sin) * (wave @ (wave_t @ (coef * sin)))
    return -0.125 * (wave_t @ (first + second))


def _control(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    theta = check_phases(h.n, p, theta)
    terms = control_terms(h, spec)
    if terms is None or terms.size == 0:
        return np.zeros(h.n)
    coef, w = _weights(terms, p)
    return _closed_form(terms, coef, w, theta)


def control_full(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    """Control built from pairwise and triadic terms over the pinned set."""
    if spec.mode != "full":
        raise ParameterError(f"control_full needs mode 'full', got {spec.mode!r}")
    return _control(h, p, theta, spec)


def control_pairwise(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    """Control built from pairwise terms only; K2 and B do not enter."""
    if spec.mode != "pairwise_only":
        raise ParameterError(f"control_pairwise needs mode 'pairwise_only', got {spec.mode!r}")
    return _control(h, p, theta, spec)


def bracket_functional(h: Hypergraph, p: ModelParams, s: ActionAngleState, spec: ControlSpec) -> float:
    """{Gamma V} V at (I, theta) for the interaction terms selected by `spec`.

    Evaluated from the closed-form partial derivatives of V and Gamma V:

        sum_m dGV/dI_m dV/dtheta_m - dGV/dtheta_m dV/dI_m
    """
    if s.n != h.n:
        raise DimensionError(f"State length {s.n} does not match n={h.n}")
    terms = control_terms(h, spec)
    if terms is None or terms.size == 0:
        return 0.0
    coef, w = _weights(terms, p)
    actions = clamp_actions(s.actions)
    g, k_dot_i, df = terms.action_factors(actions)
    f = g * k_dot_i
    phi = terms.phases(s.angles)
    cos, sin = np.cos(phi), np.sin(phi)

    def d_transpose(x: np.ndarray) -> np.ndarray:
        return np.bincount(terms.cols, df * x[terms.rows], minlength=terms.n)

    d_gv_d_i = d_transpose(w * cos)
    d_v_d_theta = terms.wave_t @ (coef * f * cos)
    d_gv_d_theta = -(terms.wave_t @ (w * f * sin))
    d_v_d_i = d_transpose(coef * sin)
    return float(np.dot(d_gv_d_i, d_v_d_theta) - np.dot(d_gv_d_theta, d_v_d_i))


def controlled_rhs(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    """Model velocities plus the control selected by `spec.mode`."""
    out = hokm_rhs(h, p, theta)
    if spec.mode == "none":
        return out
    return out + _control(h, p, theta, spec)


def control_intensity(
    control: np.ndarray, pinned_count: int, normalize_over: NormalizeOver = "all_nodes"
) -> float:
    """Mean |h_i| over all nodes, or over the pinned nodes."""
    control = np.asarray(control, dtype=float)
    if normalize_over == "all_nodes":
        if control.size == 0:
            raise ParameterError("Control intensity over an empty node set")
        return float(np.mean(np.abs(control)))
    if normalize_over != "pinned":
        raise ParameterError(f"Unknown normalization {normalize_over!r}")
    if pinned_count < 1:
        raise ParameterError("Control intensity over an empty pinned set")
    return float(np.sum(np.abs(control)) / pinned_count)


def induced_control(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    """Control computed on the sub-hypergraph induced by the pinned set, zero-padded.

    Couplings are rescaled so that K1/N and K2/N^2 keep their values on
    the smaller node count.
    """
    theta = check_phases(h.n, p, theta)
    out = np.zeros(h.n)
    if not spec.active:
        return out
    nodes = list(spec.pinned)
    sub = h.induced(nodes)
    ratio = len(nodes) / h.n
    sub_params = ModelParams(
        k1=p.k1 * ratio,
        k2=p.k2 * ratio ** 2,
        omega=p.omega_array[nodes],
        triadic_sign=p.triadic_sign,
    )
    sub_spec = ControlSpec.all_nodes(len(nodes), spec.mode)
    out[nodes] = _control(sub, sub_params, theta[nodes], sub_spec)
    return out


class ControlledField:
    """Controlled phase velocities bound to (h, p, spec) for the integrator.

    The term table, coefficients and resonance guard are evaluated once.
    """

    def __init__(self, h: Hypergraph, p: ModelParams, spec: ControlSpec):
        if p.n != h.n:
            raise DimensionError(f"Frequency vector has length {p.n}, expected {h.n}")
        self.h = h
        self.params = p
        self.spec = spec
        self._terms = control_terms(h, spec)
        if self._terms is not None and self._terms.size:
            self._coef, self._w = _weights(self._terms, p)
        else:
            self._terms = None

    def control(self, theta: np.ndarray) -> np.ndarray:
        if self._terms is None:
            return np.zeros(self.h.n)
        return _closed_form(self._terms, self._coef, self._w, theta)

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        out = hokm_rhs(self.h, self.params, theta)
        if self._terms is None:
            return out
        return out + self.control(theta)

    def intensity(self, theta: np.ndarray, normalize_over: NormalizeOver = "all_nodes") -> float:
        return control_intensity(self.control(theta), len(self.spec.pinned), normalize_over)

    def with_params(self, p: ModelParams) -> "ControlledField":
        return ControlledField(self.h, p, self.spec)
