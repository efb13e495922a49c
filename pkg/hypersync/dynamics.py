"""Uncontrolled higher-order Kuramoto dynamics, order parameters and spectral objects."""
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Literal, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from hypersync.exceptions import (
    DimensionError,
    EmptyWindowError,
    NumericalError,
    ParameterError,
    ResonanceError,
)
from hypersync.hypergraph import Hypergraph, index_combinations
from hypersync.models import ModelParams
from hypersync.settings import settings
from hypersync.utils import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * np.pi
QuarticVariant = Literal["type1", "type2"]


def wrap_phase(theta: np.ndarray) -> np.ndarray:
    """Reduce phases to [0, 2π)."""
    return np.mod(theta, TWO_PI)


def check_phases(n: int, p: ModelParams, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n,):
        raise DimensionError(f"Phase vector has shape {theta.shape}, expected ({n},)")
    if p.n != n:
        raise DimensionError(f"Frequency vector has length {p.n}, expected {n}")
    return theta


def hokm_rhs(h: Hypergraph, p: ModelParams, theta: np.ndarray) -> np.ndarray:
    """Phase velocities of the higher-order Kuramoto model.

    theta_dot_i = omega_i + (K1/N) sum_j A_ij sin(theta_j - theta_i)
        + (K2/N^2) sum_{j,k} B_ijk [sin(theta_j + theta_k - 2 theta_i)
                                    + s sin(2 theta_j - theta_k - theta_i)]

    where (j, k) runs over both orderings of the two non-centre nodes of
    every stored triangle containing i, and s is `p.triadic_sign`.
    """
    theta = check_phases(h.n, p, theta)
    n = h.n
    out = p.omega_array.copy()

    if p.k1 != 0.0 and h.num_edges:
        i, j = h.edges[:, 0], h.edges[:, 1]
        s = np.sin(theta[j] - theta[i])
        out += (p.k1 / n) * (np.bincount(i, s, minlength=n) - np.bincount(j, s, minlength=n))

    if p.k2 != 0.0 and h.num_triangles:
        c, a, b = h.triangle_centres
        tc, ta, tb = theta[c], theta[a], theta[b]
        # Both orderings of (a, b) give the same first term
        term = 2.0 * np.sin(ta + tb - 2.0 * tc)
        term += p.triadic_sign * (np.sin(2.0 * ta - tb - tc) + np.sin(2.0 * tb - ta - tc))
        out += (p.k2 / n ** 2) * np.bincount(c, term, minlength=n)

    return out


def order_parameter(theta: np.ndarray) -> float:
    """R = |mean(exp(i theta))|."""
    return cluster_order_parameter(theta, 1)


def cluster_order_parameter(theta: np.ndarray, m: int) -> float:
    """|mean(exp(i m theta))|; m=2 equals 1 on any exact antipodal two-cluster state."""
    if m < 1:
        raise ParameterError(f"Cluster order must be >= 1, got {m}")
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise DimensionError("Order parameter of an empty phase vector")
    z = np.mean(np.exp(1j * m * theta))
    return float(min(1.0, abs(z)))


def averaged_order_parameter(
    series: Union[np.ndarray, Iterable[Tuple[float, float]]],
    t0: Optional[float] = None,
    t_fin: Optional[float] = None,
) -> float:
    """Mean of R over samples with t0 < t <= t_fin (defaults from settings)."""
    t0 = settings.R_HAT_T0 if t0 is None else t0
    t_fin = settings.R_HAT_T_FIN if t_fin is None else t_fin
    if not t0 < t_fin:
        raise EmptyWindowError(f"Averaging window ({t0}, {t_fin}] is empty")
    data = np.asarray(list(series) if not isinstance(series, np.ndarray) else series, dtype=float)
    if data.size == 0:
        raise EmptyWindowError("Empty order-parameter series")
    t, r = data[:, 0], data[:, 1]
    tol = 1e-9 * max(1.0, abs(t_fin))
    if t[-1] < t_fin - tol or t[0] > t0 + tol:
        raise EmptyWindowError(
            f"Series covers [{t[0]}, {t[-1]}], window ({t0}, {t_fin}] is outside it"
        )
    mask = (t > t0 + tol) & (t <= t_fin + tol)
    if not mask.any():
        raise EmptyWindowError(f"No samples in ({t0}, {t_fin}]")
    return float(np.mean(r[mask]))


def multiorder_laplacian(h: Hypergraph, p: ModelParams) -> np.ndarray:
    """L = 2 L1 + 6 L2 with zero row sums.

    L1_ij = -(K1/N) A_ij and L2_ij = -(K2/N^2) sum_k B_ijk off the diagonal.
    """
    n = h.n
    off = np.zeros((n, n))
    if h.num_edges:
        i, j = h.edges[:, 0], h.edges[:, 1]
        off[i, j] -= 2.0 * p.k1 / n
        off[j, i] -= 2.0 * p.k1 / n
    if h.num_triangles:
        off -= 6.0 * p.k2 / n ** 2 * h.pair_triangle_counts
    np.fill_diagonal(off, 0.0)
    return off - np.diag(off.sum(axis=1))


def sync_jacobian_spectrum(h: Hypergraph, p: ModelParams) -> np.ndarray:
    """Sorted eigenvalues of diag(L, -L), the block Jacobian at the synchronized torus."""
    lap = multiorder_laplacian(h, p)
    try:
        eigvals, eigvecs = linalg.eigh(lap)
    except linalg.LinAlgError as e:
        raise NumericalError(f"Symmetric eigensolver did not converge: {e}") from e
    scale = max(np.linalg.norm(lap, ord=2), np.finfo(float).tiny)
    residual = np.linalg.norm(lap @ eigvecs - eigvecs * eigvals, axis=0).max()
    if residual > 1e-8 * scale:
        raise NumericalError(f"Eigen residual {residual:.3g} exceeds 1e-8 * ||L|| = {1e-8 * scale:.3g}")
    return np.sort(np.concatenate([eigvals, -eigvals]))


def linearize(field: Callable[[np.ndarray], np.ndarray], x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of `field` at `x`."""
    x = np.asarray(x, dtype=float)
    jac = np.empty((x.size, x.size))
    for col in range(x.size):
        step = np.zeros_like(x)
        step[col] = eps
        jac[:, col] = (field(x + step) - field(x - step)) / (2.0 * eps)
    return jac


# Resonance guard

def frequency_combinations(h: Hypergraph, omega: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """|omega_j - omega_i| per edge and |omega_j + omega_k - 2 omega_i| per (triangle, centre)."""
    omega = np.asarray(omega, dtype=float)
    pair = np.abs(omega[h.edges[:, 1]] - omega[h.edges[:, 0]])
    c, a, b = h.triangle_centres
    triad = np.abs(omega[a] + omega[b] - 2.0 * omega[c])
    return pair, triad


def check_resonance(h: Hypergraph, omega: np.ndarray, tol: Optional[float] = None) -> None:
    """Raise ResonanceError if any frequency combination over the stored simplices is below tol."""
    tol = settings.RESONANCE_TOL if tol is None else tol
    if len(omega) != h.n:
        raise DimensionError(f"Frequency vector has length {len(omega)}, expected {h.n}")
    pair, triad = frequency_combinations(h, omega)
    if pair.size and pair.min() <= tol:
        idx = int(np.argmin(pair))
        simplex = tuple(int(v) for v in h.edges[idx])
        raise ResonanceError(
            f"Resonant edge {simplex}: |omega_j - omega_i| = {pair[idx]:.3g} <= {tol:g}",
            simplex=simplex,
            combination=float(pair[idx]),
        )
    if triad.size and triad.min() <= tol:
        idx = int(np.argmin(triad))
        c, a, b = h.triangle_centres
        simplex = (int(c[idx]), int(a[idx]), int(b[idx]))
        raise ResonanceError(
            f"Resonant triangle {simplex} (centre first): "
            f"|omega_j + omega_k - 2 omega_i| = {triad[idx]:.3g} <= {tol:g}",
            simplex=simplex,
            combination=float(triad[idx]),
        )


def draw_frequencies(
    h: Hypergraph,
    rng: np.random.Generator,
    low: float = 0.0,
    high: float = 1.0,
    tol: Optional[float] = None,
    retry_cap: Optional[int] = None,
) -> np.ndarray:
    """Draw omega ~ U([low, high]) and resample until it passes the resonance guard."""
    retry_cap = settings.OMEGA_RETRY_CAP if retry_cap is None else retry_cap
    last_error = None
    for attempt in range(retry_cap + 1):
        omega = rng.uniform(low, high, size=h.n)
        try:
            check_resonance(h, omega, tol)
            return omega
        except ResonanceError as e:
            last_error = e
            logger.warning(f"Resampling frequencies (attempt {attempt + 1}): {e}")
    raise ResonanceError(
        f"No admissible frequency vector after {retry_cap} resamples: {last_error}",
        simplex=last_error.simplex if last_error else (),
        combination=last_error.combination if last_error else 0.0,
    )


def load_frequencies(path: Path) -> np.ndarray:
    """One frequency per line; blank lines and `#` comments are ignored."""
    values = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ParameterError(f"Cannot read frequency file {path}: {e}") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: not a number: {raw!r}")
    return np.array(values)


# Quartic (three-simplex) interactions on the analytic all-to-all structure

@dataclass(frozen=True)
class QuadrupleCoupling:
    """All distinct quadruples over n nodes; never stored as a hypergraph."""

    n: int

    @cached_property
    def quadruples(self) -> np.ndarray:
        return index_combinations(self.n, 4)


def d3_rhs(
    h4: QuadrupleCoupling,
    p: ModelParams,
    theta: np.ndarray,
    variant: QuarticVariant = "type1",
) -> np.ndarray:
    """Phase velocities with the quartic coupling embedded at I = 1/2.

    type1: omega_i + (3/2)(K3/N^3) sum_{j,k,l} [sin(theta_j + theta_k + theta_l - 3 theta_i)
                                              + sin(3 theta_j - theta_k - theta_l - theta_i)]
    type2: omega_i + 2 (K3/N^3) sum_{j,k,l} sin(theta_k + theta_l - theta_j - theta_i)

    Sums run over ordered triples of distinct nodes, all different from i.
    """
    if variant not in ("type1", "type2"):
        raise ParameterError(f"Unknown quartic variant {variant!r}")
    n = h4.n
    theta = check_phases(n, p, theta)
    out = p.omega_array.copy()
    if p.k3 == 0.0 or n < 4:
        return out

    q = h4.quadruples
    acc = np.zeros(n)
    for centre in range(4):
        others = [col for col in range(4) if col != centre]
        i = q[:, centre]
        ti = theta[i]
        tj = theta[q[:, others]]
        total = tj.sum(axis=1)
        if variant == "type1":
            # 6 orderings share the symmetric term; each choice of j appears twice in the other
            term = 6.0 * np.sin(total - 3.0 * ti)
            term += 2.0 * np.sin(4.0 * tj - total[:, None] - ti[:, None]).sum(axis=1)
        else:
            term = 2.0 * np.sin(total[:, None] - 2.0 * tj - ti[:, None]).sum(axis=1)
        acc += np.bincount(i, term, minlength=n)

    prefactor = 1.5 if variant == "type1" else 2.0
    return out + prefactor * p.k3 / n ** 3 * acc

