"""Self-validation suite: numerical oracles for the model, the embedding, the control and the integrator."""
from itertools import permutations
from typing import Callable, List, Optional, Tuple

import numpy as np

from hypersync.control import control_full, control_pairwise, bracket_functional, induced_control
from hypersync.dynamics import (
    QuadrupleCoupling,
    d3_rhs,
    draw_frequencies,
    hokm_rhs,
    multiorder_laplacian,
    sync_jacobian_spectrum,
)
from hypersync.exceptions import HypersyncError
from hypersync.hamiltonian import (
    ActionAngleState,
    flow_jacobian,
    hamiltonian_flow_rhs,
    hamiltonian_value,
    torus_state,
)
from hypersync.hypergraph import Hypergraph, all_to_all
from hypersync.integrate import integrate
from hypersync.models import CheckResult, ControlSpec, IntegrationPlan, ModelParams, ValidationReport
from hypersync.utils import get_logger

logger = get_logger(__name__)

ORACLE_STEP = 1e-5


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(b))) if np.size(b) else 1.0)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale if np.size(b) else 0.0


def bracket_oracle(h: Hypergraph, p: ModelParams, theta: np.ndarray, spec: ControlSpec) -> np.ndarray:
    """-1/2 d/dI_i of the bracket at I = 1/2, by central differences."""
    out = np.zeros(h.n)
    for i in range(h.n):
        up = np.full(h.n, 0.5)
        down = np.full(h.n, 0.5)
        up[i] += ORACLE_STEP
        down[i] -= ORACLE_STEP
        f_up = bracket_functional(h, p, ActionAngleState(up, theta), spec)
        f_down = bracket_functional(h, p, ActionAngleState(down, theta), spec)
        out[i] = -0.5 * (f_up - f_down) / (2.0 * ORACLE_STEP)
    return out


def check_control_oracle(h: Hypergraph, rng: np.random.Generator, sign: int = 1, instances: int = 5) -> CheckResult:
    """Closed-form controls against the finite-difference bracket oracle on random pinned sets."""
    worst = 0.0
    for _ in range(instances):
        omega = draw_frequencies(h, rng)
        p = ModelParams(k1=rng.uniform(0.2, 2.0), k2=rng.uniform(0.2, 2.0), omega=omega, triadic_sign=sign)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=h.n)
        m = int(rng.integers(2, h.n + 1))
        pinned = tuple(int(v) for v in rng.permutation(h.n)[:m])
        full = ControlSpec(mode="full", pinned=pinned)
        pair = ControlSpec(mode="pairwise_only", pinned=pinned)
        worst = max(
            worst,
            _relative(control_full(h, p, theta, full), bracket_oracle(h, p, theta, full)),
            _relative(control_pairwise(h, p, theta, pair), bracket_oracle(h, p, theta, pair)),
        )
    tol = 1e-6
    return CheckResult(name="control_oracle", passed=worst <= tol, residual=worst, tolerance=tol,
                       detail=f"{instances} instances, n={h.n}")


def check_embedding(h: Hypergraph, rng: np.random.Generator, sign: int = 1) -> CheckResult:
    """Angle velocities of the flow on I = 1/2 against the model."""
    p = ModelParams(k1=1.0, k2=1.0, omega=rng.uniform(0.0, 1.0, size=h.n), triadic_sign=sign)
    worst = 0.0
    for _ in range(5):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=h.n)
        _, theta_dot = hamiltonian_flow_rhs(h, p, torus_state(h.n, 0.5, theta))
        worst = max(worst, float(np.max(np.abs(theta_dot - hokm_rhs(h, p, theta)))))
    tol = 1e-12
    return CheckResult(name="embedding_equivalence", passed=worst <= tol, residual=worst, tolerance=tol,
                       detail=f"triadic_sign={sign:+d}")


def check_torus_invariance(h: Hypergraph, rng: np.random.Generator) -> CheckResult:
    """I_dot vanishes on I = c and the angles follow the model with couplings (2c K1, 2c K2)."""
    p = ModelParams(k1=1.0, k2=1.0, omega=rng.uniform(0.0, 1.0, size=h.n))
    worst = 0.0
    for c in (0.3, 0.5, 1.0):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=h.n)
        i_dot, theta_dot = hamiltonian_flow_rhs(h, p, torus_state(h.n, c, theta))
        scaled = p.with_couplings(k1=2.0 * c * p.k1, k2=2.0 * c * p.k2)
        worst = max(worst, float(np.max(np.abs(i_dot))),
                    float(np.max(np.abs(theta_dot - hokm_rhs(h, scaled, theta)))))
    tol = 1e-12
    return CheckResult(name="torus_invariance", passed=worst <= tol, residual=worst, tolerance=tol,
                       detail="c in {0.3, 0.5, 1}")


def check_gradient(h: Hypergraph, rng: np.random.Generator, eps: float = 1e-6) -> CheckResult:
    """Flow against central differences of H at an interior state."""
    p = ModelParams(k1=1.0, k2=1.0, omega=rng.uniform(0.0, 1.0, size=h.n))
    s = ActionAngleState(rng.uniform(0.3, 1.0, size=h.n), rng.uniform(0.0, 2.0 * np.pi, size=h.n))
    i_dot, theta_dot = hamiltonian_flow_rhs(h, p, s)
    d_i = np.zeros(h.n)
    d_theta = np.zeros(h.n)
    for m in range(h.n):
        e = np.zeros(h.n)
        e[m] = eps
        d_i[m] = (hamiltonian_value(h, p, ActionAngleState(s.actions + e, s.angles))
                  - hamiltonian_value(h, p, ActionAngleState(s.actions - e, s.angles))) / (2 * eps)
        d_theta[m] = (hamiltonian_value(h, p, ActionAngleState(s.actions, s.angles + e))
                      - hamiltonian_value(h, p, ActionAngleState(s.actions, s.angles - e))) / (2 * eps)
    worst = max(_relative(theta_dot, d_i), _relative(i_dot, -d_theta))
    tol = 1e-6
    return CheckResult(name="gradient_consistency", passed=worst <= tol, residual=worst, tolerance=tol)


def rk4_convergence_factors() -> List[float]:
    """Endpoint error ratios on x' = -x for dt in {0.1, 0.05, 0.025}."""
    errors = []
    for dt in (0.1, 0.05, 0.025):
        res = integrate(lambda y: -y, np.array([1.0]), IntegrationPlan(t0=0.0, t_end=1.0, dt=dt))
        errors.append(abs(res.final[0] - np.exp(-1.0)))
    return [errors[0] / errors[1], errors[1] / errors[2]]


def check_rk4_order() -> CheckResult:
    factors = rk4_convergence_factors()
    worst = max(abs(f - 16.0) for f in factors)
    return CheckResult(name="rk4_order", passed=all(14.0 <= f <= 18.0 for f in factors), residual=worst,
                       tolerance=2.0, detail=f"factors={[round(f, 3) for f in factors]}")


def check_spectrum(h: Hypergraph) -> CheckResult:
    """Laplacian row sums, +-lambda pairing and the flow Jacobian at the synchronized state on I = 1."""
    p = ModelParams(k1=1.0, k2=1.0, omega=np.zeros(h.n))
    lap = multiorder_laplacian(h, p)
    spectrum = sync_jacobian_spectrum(h, p)
    row_sums = float(np.max(np.abs(lap.sum(axis=1))))
    pairing = float(np.max(np.abs(spectrum + spectrum[::-1])))
    jac = flow_jacobian(h, p, torus_state(h.n, 1.0, np.full(h.n, 0.3)))
    estimated = np.sort(np.linalg.eigvals(jac).real)
    worst = max(row_sums, pairing, float(np.max(np.abs(estimated - spectrum))))
    zeros = int(np.sum(np.abs(spectrum) < 1e-9))
    tol = 1e-4
    return CheckResult(name="laplacian_spectrum", passed=worst <= tol and zeros >= 2, residual=worst,
                       tolerance=tol, detail=f"zero eigenvalues={zeros}")


def d3_loop(n: int, p: ModelParams, theta: np.ndarray, variant: str) -> np.ndarray:
    """Quartic velocities summed over ordered triples of distinct nodes."""
    out = p.omega_array.copy()
    for i in range(n):
        acc = 0.0
        for j, k, l in permutations([v for v in range(n) if v != i], 3):
            if variant == "type1":
                acc += 1.5 * (np.sin(theta[j] + theta[k] + theta[l] - 3 * theta[i])
                              + np.sin(3 * theta[j] - theta[k] - theta[l] - theta[i]))
            else:
                acc += 2.0 * np.sin(theta[k] + theta[l] - theta[j] - theta[i])
        out[i] += p.k3 / n ** 3 * acc
    return out


def check_d3(rng: np.random.Generator, n: int = 5) -> CheckResult:
    p = ModelParams(k3=1.3, omega=rng.uniform(0.0, 1.0, size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    h4 = QuadrupleCoupling(n)
    worst = max(
        float(np.max(np.abs(d3_rhs(h4, p, theta, v) - d3_loop(n, p, theta, v)))) for v in ("type1", "type2")
    )
    tol = 1e-12
    return CheckResult(name="d3_oracle", passed=worst <= tol, residual=worst, tolerance=tol, detail=f"n={n}")


def check_frequency_shift(h: Hypergraph, rng: np.random.Generator) -> CheckResult:
    p = ModelParams(k1=1.0, k2=1.0, omega=draw_frequencies(h, rng))
    shifted = p.with_omega(p.omega_array + 3.7)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=h.n)
    spec = ControlSpec.all_nodes(h.n)
    worst = _relative(control_full(h, shifted, theta, spec), control_full(h, p, theta, spec))
    tol = 1e-10
    return CheckResult(name="frequency_shift", passed=worst <= tol, residual=worst, tolerance=tol)


def check_locality(h: Hypergraph, rng: np.random.Generator) -> CheckResult:
    """Pinned control against the control of the induced sub-hypergraph."""
    p = ModelParams(k1=1.0, k2=1.0, omega=draw_frequencies(h, rng))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=h.n)
    pinned = tuple(int(v) for v in rng.permutation(h.n)[: max(2, h.n // 2)])
    spec = ControlSpec(mode="full", pinned=pinned)
    worst = _relative(control_full(h, p, theta, spec), induced_control(h, p, theta, spec))
    tol = 1e-12
    return CheckResult(name="pinning_locality", passed=worst <= tol, residual=worst, tolerance=tol,
                       detail=f"M={len(pinned)}")


def run_validation(
    flip_sign: bool = False, hypergraph: Optional[Hypergraph] = None, seed: int = 0
) -> ValidationReport:
    """Run every check; a check that raises is reported as failed."""
    h = hypergraph if hypergraph is not None else all_to_all(5)
    sign = -1 if flip_sign else 1
    rng = np.random.default_rng(seed)
    checks: List[Tuple[str, Callable[[], CheckResult]]] = [
        ("control_oracle", lambda: check_control_oracle(h, rng, sign)),
        ("embedding_equivalence", lambda: check_embedding(h, rng, sign)),
        ("torus_invariance", lambda: check_torus_invariance(h, rng)),
        ("gradient_consistency", lambda: check_gradient(h, rng)),
        ("rk4_order", check_rk4_order),
        ("laplacian_spectrum", lambda: check_spectrum(h)),
        ("d3_oracle", lambda: check_d3(rng)),
        ("frequency_shift", lambda: check_frequency_shift(h, rng)),
        ("pinning_locality", lambda: check_locality(h, rng)),
    ]
    results = []
    for name, check in checks:
        try:
            result = check()
        except HypersyncError as e:
            result = CheckResult(name=name, passed=False,
                                 residual=float("nan"), tolerance=0.0, detail=str(e))
        level = "info" if result.passed else "error"
        getattr(logger, level)(
            f"{result.name}: {'PASS' if result.passed else 'FAIL'} "
            f"residual={result.residual:.3g} tol={result.tolerance:.1g} {result.detail}"
        )
        results.append(result)
    return ValidationReport(passed=all(r.passed for r in results), checks=results)
