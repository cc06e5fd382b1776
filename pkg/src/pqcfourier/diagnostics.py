"""Barren-plateau diagnostics.

Parameter-shift gradients and their variance over uniform draws, the
two-copy Haar moment in closed form, ensemble second moments and the
trace-norm expressibility built from them, and the check of the Parseval
sum against its 2-design value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _stats

from . import sim
from ._parallel import map_ordered
from .circuits import CircuitTemplate, Model
from .errors import ConfigurationError, UnsupportedGeneratorError
from .fourier import SumSquareStats, design_value, sample_flat_params, sample_rng
from .sim import DataVariable, PauliRotation, Statevector

MAX_MOMENT_QUBITS = 5
SHIFT = np.pi / 2

GRADVAR_FIELDS = ["n", "L", "i", "variance", "n_samples", "seed"]
EXPRESSIBILITY_FIELDS = ["n", "L", "M", "epsilon2", "seed"]
DESIGN_FIELDS = ["n", "L", "type", "mean", "variance", "theory", "epsilon2", "satisfied"]


# ----------------------------------------------------------------------
# gradients
# ----------------------------------------------------------------------
def _base_angles(model: Model, params: dict) -> list:
    var = model.fourier_var
    override = {var: model.data.get(var.name, 0.0)} if isinstance(var, DataVariable) else {}
    return model.template.angles(params, model.data, override)


def parameter_shift_grad(model: Model, theta, i: int) -> float:
    """``d f / d theta_i`` by the two-term shift rule.

    ``theta`` is the flat parameter vector of the model's template. A
    parameter shared by several rotations gets one shift pair per
    occurrence, which keeps the rule exact.
    """
    template = model.template
    slot = template.param_slots()[i]
    positions = template.slot_gates(slot)
    if any(not isinstance(template.gates[k], PauliRotation) for k in positions):
        raise UnsupportedGeneratorError(f"{slot} is not carried by a Pauli rotation")
    if not positions:
        return 0.0
    base = _base_angles(model, template.unflatten(theta))
    m = len(positions)
    shifts = np.zeros((len(base), 2 * m))
    for j, k in enumerate(positions):
        shifts[k, 2 * j] = SHIFT
        shifts[k, 2 * j + 1] = -SHIFT
    angles = [None if a is None else a + shifts[k] for k, a in enumerate(base)]
    amps = np.zeros((2 * m, 2**model.n), dtype=complex)
    amps[:, 0] = 1.0
    amps = sim.evolve_batch(amps, template.gates, angles, model.n)
    values = sim.measure_batch(amps, model.observable, model.n)
    return float(0.5 * np.sum(values[0::2] - values[1::2]))


@dataclass(frozen=True)
class GradientVarianceEntry:
    n: int
    L: object
    i: int
    variance: float
    n_samples: int
    seed: int

    def row(self) -> dict:
        return {k: getattr(self, k) for k in GRADVAR_FIELDS}


@dataclass(frozen=True, eq=False)
class GradientVarianceReport:
    """Variance entries with ``variance ~ b**(-n)`` fitted by least squares
    of ``log(variance)`` against ``n log 2``."""

    entries: list
    b: float
    r2: float
    residuals: np.ndarray = field(repr=False)


def gradient_variance(model: Model, i: int, n_samples: int, seed: int, workers: int = 1,
                      L=None) -> GradientVarianceEntry:
    """Unbiased variance of the shift-rule gradient over uniform ``[0, 2 pi)`` draws."""
    if n_samples < 30:
        raise ConfigurationError("gradient variance needs at least 30 samples")
    grads = map_ordered(
        lambda s: parameter_shift_grad(model, sample_flat_params(model, seed, s), i),
        range(n_samples), workers,
    )
    return GradientVarianceEntry(model.n, L, i, float(np.var(grads, ddof=1)), n_samples, seed)


def fit_decay_base(entries) -> GradientVarianceReport:
    entries = list(entries)
    n = np.array([e.n for e in entries], dtype=float)
    var = np.array([e.variance for e in entries], dtype=float)
    if len(entries) < 2 or len(set(n)) < 2:
        raise ConfigurationError("fitting a decay base needs at least two qubit counts")
    if np.any(var <= 0):
        raise ConfigurationError("cannot fit a decay base to zero variances")
    x, y = n * np.log(2), np.log(var)
    fit = _stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    return GradientVarianceReport(entries, float(2.0 ** (-fit.slope)), float(fit.rvalue**2), residuals)


# ----------------------------------------------------------------------
# second moments
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SecondMomentMatrix:
    """Averaged two-copy state; row index ``a * d + b`` labels ``|a>|b>``."""

    d: int
    matrix: np.ndarray = field(repr=False)


def _check_moment_qubits(n: int) -> None:
    if n > MAX_MOMENT_QUBITS:
        raise ConfigurationError(f"expressibility cap n <= {MAX_MOMENT_QUBITS}, got n = {n}")


def swap_operator(d: int) -> np.ndarray:
    S = np.zeros((d * d, d * d))
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    S[(a * d + b).ravel(), (b * d + a).ravel()] = 1.0
    return S


def haar_second_moment(state: Statevector) -> SecondMomentMatrix:
    """Haar twirl of ``|psi><psi|`` on two copies: ``(I + S) / (d (d + 1))``."""
    _check_moment_qubits(state.n)
    if abs(state.norm() - 1) > 1e-10:
        raise ConfigurationError("haar_second_moment needs a normalized pure state")
    d = 2**state.n
    matrix = (np.eye(d * d) + swap_operator(d)) / (d * (d + 1))
    return SecondMomentMatrix(d, matrix.astype(complex))


def _draw_angles(template: CircuitTemplate, M: int, seed: int, low: float, high: float):
    n_free = template.n_params + len(template.data_vars)
    draws = np.array([sample_rng(seed, s).uniform(low, high, n_free) for s in range(M)])
    draws = draws.reshape(M, n_free)
    params = template.unflatten(np.zeros(template.n_params))
    start = 0
    for name, dim in template.blocks:
        params[name] = draws[:, start:start + dim].T  # params[name][index] -> (M,)
        start += dim
    data = {v: draws[:, start + j] for j, v in enumerate(template.data_vars)}
    override = {DataVariable(v): a for v, a in data.items()}
    return template.angles(params, {}, override)


def ensemble_second_moment(template: CircuitTemplate, state: Statevector, M: int, seed: int,
                           domain: str = "centered") -> SecondMomentMatrix:
    """Average of ``(U|psi>)^{(x)2} (<psi|U^+)^{(x)2}`` over ``M`` draws of
    every parameter and data slot of ``template``.

    ``domain="centered"`` draws from ``[-pi, pi)``, ``"positive"`` from
    ``[0, 2 pi)``; both cover one full period.
    """
    _check_moment_qubits(template.n)
    if state.n != template.n:
        raise ConfigurationError(f"state has {state.n} qubits, template {template.n}")
    if M < 100:
        raise ConfigurationError("ensemble second moment needs M >= 100 draws")
    low = {"centered": -np.pi, "positive": 0.0}[domain]
    angles = _draw_angles(template, M, seed, low, low + 2 * np.pi)
    amps = np.repeat(state.amplitudes[None, :], M, axis=0)
    amps = sim.evolve_batch(amps, template.gates, angles, template.n)
    d = 2**template.n
    pairs = (amps[:, :, None] * amps[:, None, :]).reshape(M, d * d)
    matrix = pairs.T @ pairs.conj() / M
    return SecondMomentMatrix(d, matrix)


def trace_norm(a: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def expressibility2(template: CircuitTemplate, state: Statevector, M: int, seed: int,
                    domain: str = "centered") -> float:
    """Trace-norm distance between the Haar and ensemble second moments."""
    haar = haar_second_moment(state)
    ens = ensemble_second_moment(template, state, M, seed, domain)
    diff = haar.matrix - ens.matrix
    return trace_norm((diff + diff.conj().T) / 2)


# ----------------------------------------------------------------------
# 2-design check
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class DesignBoundReport:
    n: int
    L: object
    output_type: str
    sum_sq: float
    variance: float
    n_samples: int
    theory: float
    epsilon2: float | None
    satisfied: bool

    def row(self) -> dict:
        return {"n": self.n, "L": self.L, "type": self.output_type, "mean": self.sum_sq,
                "variance": self.variance, "theory": self.theory,
                "epsilon2": self.epsilon2, "satisfied": self.satisfied}


def design_bound_check(model: Model, stats: SumSquareStats, output_type: str | None = None,
                       epsilon2: float | None = None, L=None) -> DesignBoundReport:
    """Compare the mean Parseval sum with its 2-design value.

    ``satisfied`` means ``|mean - theory| <= epsilon2 + 3 * stderr``; with no
    ``epsilon2`` the equality itself is tested (``epsilon2 = 0``).
    """
    output_type = output_type or model.output_type
    theory = design_value(model.n, output_type)
    slack = (epsilon2 or 0.0) + 3 * stats.stderr
    satisfied = bool(abs(stats.mean - theory) <= slack)
    return DesignBoundReport(model.n, L, output_type, stats.mean, stats.variance,
                             stats.n_samples, theory, epsilon2, satisfied)
