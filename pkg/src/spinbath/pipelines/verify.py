"""
Self-verification battery.

Every check compares two independent routes to the same quantity (engine
against enumeration, sampled against exact, closed form against propagation)
at desk scale and reports the observed error next to its tolerance. All
random inputs come from fixed streams, so two runs give identical reports.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import pandas as pd

from spinbath.channel import (
    avg_photon_bruteforce,
    haar_twirl_reference,
    markovian_fidelity_closed,
    markovian_rate,
    photon_statistics,
    propagate,
    rb_decay,
    rb_output,
    trajectory_sum_fidelity,
    twirl_coeffs,
    xi_fidelity_closed,
)
from spinbath.core.logging import get_logger
from spinbath.montecarlo import (
    SimConfig,
    clifford_1q_table,
    estimate_decay,
    fuchs_van_de_graaff_violation,
    haar_unitary,
    mixed_fidelity_series,
    sample_sequence,
    witness_histogram,
    witness_series,
    xi_exact_average,
)
from spinbath.physics import SpinBosonModel, pure_state, thermal_env_state
from spinbath.utils.reproducibility import make_stream

logger = get_logger(__name__)

VERIFY_SEED = 1729
GAUSSIAN_RATE = (1.0 + 2.0 * math.exp(-0.32)) / 3.0  # (1 + 2 exp(-(2 g t)^2 / 2)) / 3 at g=4, t=0.1


@dataclass
class CheckResult:
    name: str
    observed: float
    criterion: str
    passed: bool
    note: str = ""


@dataclass
class VerifyReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {"check": c.name, "criterion": c.criterion, "observed": c.observed,
             "passed": c.passed, "note": c.note}
            for c in self.checks
        ])


def reference_model(cutoff: int = 10, omega: float = 10.0) -> SpinBosonModel:
    return SpinBosonModel.with_scalar_coupling(g=4.0, omega=omega, cutoff=cutoff, dt=0.1)


def _ground(model: SpinBosonModel) -> np.ndarray:
    return thermal_env_state(model.env, math.inf).matrix


def _random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return pure_state(psi)


def _random_operator(d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def _engine_curve(model, depths, markovian=False) -> np.ndarray:
    rho_s = pure_state([1.0] + [0.0] * (model.d - 1))
    return np.array([
        rb_output(state, rho_s)
        for _, state in propagate(model, _ground(model), depths, markovian=markovian)
    ])


def _at_most(name: str, observed: float, tol: float, note: str = "") -> CheckResult:
    return CheckResult(name, float(observed), f"<= {tol:g}", bool(observed <= tol), note)


def check_twirl_coefficients() -> CheckResult:
    rng = make_stream(VERIFY_SEED, 0)
    err = 0.0
    for d in (2, 4):
        for delta in (True, False):
            c = twirl_coeffs(delta, d)
            err = max(err, abs(c.total - (1.0 if delta else 0.0) / d))
    rho = _random_density(2, rng)
    projectors = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    for p in range(2):
        for q in range(2):
            c = twirl_coeffs(p == q, 2)
            expected = c.c_id * np.trace(rho) * np.eye(2) / 2 + c.c_keep * rho
            got = haar_twirl_reference(projectors[p], projectors[q], rho, 2)
            err = max(err, float(np.abs(got - expected).max()))
    return _at_most("twirl coefficients vs Haar formula", err, 1e-12)


def check_clifford_two_design() -> CheckResult:
    rng = make_stream(VERIFY_SEED, 1)
    table = clifford_1q_table()
    err = 0.0
    for _ in range(3):
        A, B, rho = _random_operator(2, rng), _random_operator(2, rng), _random_density(2, rng)
        avg = np.mean([U.conj().T @ A @ U @ rho @ U.conj().T @ B @ U for U in table], axis=0)
        err = max(err, float(np.abs(avg - haar_twirl_reference(A, B, rho, 2)).max()))
    return _at_most("Clifford average equals Haar twirl", err, 1e-12, f"{len(table)} elements")


def check_trajectory_oracle() -> CheckResult:
    model = reference_model(cutoff=8)
    depths = list(range(1, 7))
    engine = _engine_curve(model, depths)
    oracle = np.array([trajectory_sum_fidelity(model, _ground(model), k) for k in depths])
    return _at_most("engine vs trajectory sum (k<=6)", np.abs(engine - oracle).max(), 1e-9)


def check_markovian_exact() -> CheckResult:
    model = reference_model()
    depths = list(range(0, 101))
    engine = _engine_curve(model, depths, markovian=True)
    closed = np.array([markovian_fidelity_closed(model, _ground(model), k, exact=True) for k in depths])
    return _at_most("Markovian engine vs exact rate (k<=100)", np.abs(engine - closed).max(), 1e-10)


def check_markovian_commuting() -> CheckResult:
    model = reference_model(omega=0.0)
    depths = list(range(0, 101))
    engine = _engine_curve(model, depths, markovian=True)
    closed = np.array([markovian_fidelity_closed(model, _ground(model), k) for k in depths])
    return _at_most("Markovian engine vs cos-formula at omega=0", np.abs(engine - closed).max(), 1e-10)


def check_markovian_rate() -> CheckResult:
    model = reference_model()
    rate = markovian_rate(model, _ground(model))
    return _at_most("Markovian rate vs Gaussian oracle", abs(rate - GAUSSIAN_RATE), 1e-5, f"rate={rate:.6f}")


def report_markovian_gap() -> CheckResult:
    model = reference_model()
    depths = list(range(0, 101))
    engine = _engine_curve(model, depths, markovian=True)
    formula = np.array([markovian_fidelity_closed(model, _ground(model), k) for k in depths])
    exact = markovian_rate(model, _ground(model), exact=True)
    return CheckResult(
        "Markovian cos-formula gap at omega=10", float(np.abs(engine - formula).max()),
        "report", True, f"exact rate={exact:.6f}",
    )


def check_xi_commuting() -> CheckResult:
    model = reference_model(omega=0.0)
    err = max(
        abs(xi_fidelity_closed(model, _ground(model), k) - xi_exact_average(model, _ground(model), k))
        for k in range(0, 11)
    )
    return _at_most("XI closed form vs enumeration at omega=0", err, 1e-9)


def report_xi_gap() -> CheckResult:
    model = reference_model()
    gap = max(
        abs(xi_fidelity_closed(model, _ground(model), k) - xi_exact_average(model, _ground(model), k))
        for k in range(0, 11)
    )
    return CheckResult("XI closed-form gap at omega=10", float(gap), "report", True)


def check_photon_oracle() -> CheckResult:
    model = reference_model()
    depths = list(range(0, 7))
    efficient = photon_statistics(model, _ground(model), depths).mean
    brute = np.array([avg_photon_bruteforce(model, _ground(model), k) for k in depths])
    return _at_most("photon number: engine vs diagonal trajectories", np.abs(efficient - brute).max(), 1e-9)


def check_photon_plateau() -> CheckResult:
    model = reference_model(cutoff=10)
    stats = photon_statistics(model, _ground(model), list(range(50, 101)))
    plateau = float(stats.mean.mean())
    rel = abs(plateau - 4.5) / 4.5
    return _at_most("photon plateau near 4.5 at N=10", rel, 0.15, f"plateau={plateau:.3f}")


def check_monte_carlo() -> CheckResult:
    model = reference_model()
    depths = [1, 2, 5, 10]
    exact = rb_decay(model, None, _ground(model), depths).values
    sampled = estimate_decay(
        model, None, _ground(model),
        SimConfig(samples=400, depths=depths, seed=VERIFY_SEED, gateset="clifford1q"),
    )
    z = np.abs(sampled.values - exact) / sampled.stderr
    return _at_most("Monte-Carlo vs averaged engine (max |z|)", z.max(), 4.0, "400 Clifford samples")


def check_haar_moments() -> CheckResult:
    rng = make_stream(VERIFY_SEED, 2)
    n = 20000
    A, B, rho = _random_operator(2, rng), _random_operator(2, rng), _random_density(2, rng)
    samples = np.empty((n, 2, 2), dtype=complex)
    for i in range(n):
        U = haar_unitary(2, rng)
        Ud = U.conj().T
        samples[i] = Ud @ A @ U @ rho @ Ud @ B @ U
    ref = haar_twirl_reference(A, B, rho, 2)
    z = 0.0
    for part in (np.real, np.imag):
        values = part(samples)
        se = values.std(axis=0, ddof=1) / np.sqrt(n)
        dev = np.abs(values.mean(axis=0) - part(ref))
        z = max(z, float(np.max(np.where(se > 0, dev / np.where(se > 0, se, 1.0), 0.0))))
    return _at_most("Haar second moment (max |z|)", z, 4.5, f"{n} samples")


def check_witness_markovian() -> CheckResult:
    model = reference_model()
    frame = witness_histogram(model, _ground(model), 20, list(range(1, 21)), seed=VERIFY_SEED, markovian=True)
    return _at_most("Markovian witness increments", float(frame["deltaD"].max()), 1e-10)


def check_witness_backflow() -> CheckResult:
    model = reference_model()
    frame = witness_histogram(model, _ground(model), 50, list(range(1, 31)), seed=VERIFY_SEED)
    fraction = float((frame["deltaD"] > 1e-10).mean())
    return CheckResult("non-Markovian backflow fraction", fraction, "> 0", fraction > 0)


def check_fuchs_van_de_graaff() -> CheckResult:
    model = reference_model()
    seq = sample_sequence("clifford1q", 2, 20, make_stream(VERIFY_SEED, 3))
    F = mixed_fidelity_series(model, _ground(model), seq)
    D = witness_series(model, _ground(model), seq).D
    return _at_most("Fuchs-van de Graaff bounds", max(fuchs_van_de_graaff_violation(F, D), 0.0), 1e-9)


def check_trace_ledger() -> CheckResult:
    model = SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=4, dt=0.1, n_qubits=2)
    drift = max(
        abs(state.total_trace - 1.0)
        for _, state in propagate(model, _ground(model), list(range(1, 31)))
    )
    return _at_most("trace ledger, two qubits", drift, 1e-10)


CHECKS: List[Callable[[], CheckResult]] = [
    check_twirl_coefficients,
    check_clifford_two_design,
    check_trajectory_oracle,
    check_markovian_exact,
    check_markovian_commuting,
    check_markovian_rate,
    report_markovian_gap,
    check_xi_commuting,
    report_xi_gap,
    check_photon_oracle,
    check_photon_plateau,
    check_monte_carlo,
    check_haar_moments,
    check_witness_markovian,
    check_witness_backflow,
    check_fuchs_van_de_graaff,
    check_trace_ledger,
]


def run_verify(checks: Optional[List[Callable[[], CheckResult]]] = None) -> VerifyReport:
    """Run every check; an exception inside a check counts as a failure."""
    report = VerifyReport()
    for check in checks or CHECKS:
        try:
            result = check()
        except Exception as exc:
            logger.error(f"{check.__name__} raised {type(exc).__name__}: {exc}")
            result = CheckResult(check.__name__, float("nan"), "no error", False, str(exc))
        logger.info(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.observed:.3e}")
        report.checks.append(result)
    return report
