"""Exact Fourier coefficients of circuit outputs and Parseval statistics.

With rotations ``exp(-i t P / 2)`` the output of a model is a trigonometric
polynomial of degree ``R`` in its Fourier variable, where ``R`` counts the
rotations carrying that variable. Sampling on ``N >= 2R + 1`` equispaced
points therefore recovers the coefficients of

    f(x) = sum_k c_k exp(-i k x)

exactly, and the discrete mean of ``|f|^2`` on that grid equals the
continuous one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import sim
from ._parallel import map_ordered
from .circuits import Model
from .errors import ConfigurationError
from .sim import Parameter

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Coefficients ``c_k`` for ``k = -R..R``; ``coeffs[k + R]`` is ``c_k``."""

    R: int
    coeffs: np.ndarray = field(repr=False)
    N: int
    var: str = "x"
    fixed_snapshot: str = ""

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.R, self.R + 1)

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.R:
            return 0j
        return complex(self.coeffs[k + self.R])

    def abs2(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def __call__(self, x) -> np.ndarray:
        """Evaluate the series at ``x`` (real part; outputs are real)."""
        x = np.asarray(x, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(x, self.frequencies))
        return (phases @ self.coeffs).real

    def rows(self) -> list[dict]:
        return [
            {"k": int(k), "re": float(c.real), "im": float(c.imag), "abs2": float(abs(c) ** 2)}
            for k, c in zip(self.frequencies, self.coeffs)
        ]

    def to_csv(self, path) -> None:
        write_csv(path, self.rows(), ["k", "re", "im", "abs2"])


@dataclass(frozen=True, eq=False)
class SumSquareStats:
    mean: float
    variance: float
    n_samples: int
    per_sample: np.ndarray | None = field(default=None, repr=False)

    @property
    def stderr(self) -> float:
        return float(np.sqrt(self.variance / self.n_samples))

    @classmethod
    def from_values(cls, values) -> "SumSquareStats":
        values = np.asarray(values, dtype=float)
        if values.shape[0] < 2:
            raise ConfigurationError("need at least 2 samples for a variance")
        return cls(float(values.mean()), float(values.var(ddof=1)), int(values.shape[0]), values)


def design_value(n: int, output_type: str = "expectation") -> float:
    """Sum of squared coefficients when the analysed block is a 2-design:
    ``1/(2^n+1)`` for a Pauli expectation, ``1/(2^(n-1) (2^n+1))`` for a
    basis-state probability."""
    d = 2**n
    if output_type == "expectation":
        return 1.0 / (d + 1)
    if output_type == "probability":
        return 2.0 / (d * (d + 1))
    raise ConfigurationError(f"unknown output type {output_type!r}")


def grid_points(N: int) -> np.ndarray:
    return TWO_PI * np.arange(N) / N


def _check_grid(N: int, R: int) -> None:
    if N < 2 * R + 1:
        raise ConfigurationError(
            f"grid of {N} points aliases a degree-{R} spectrum; need N >= {2 * R + 1}"
        )


def evaluate_on_grid(model: Model, N: int | None = None) -> np.ndarray:
    """Model output at ``x_j = 2 pi j / N`` with all other slots fixed."""
    R = model.R
    N = 2 * R + 1 if N is None else int(N)
    _check_grid(N, R)
    return model.evaluate_batch(grid_points(N))


def extract_coefficients(samples, R: int, var: str = "x", snapshot: str = "") -> FourierSpectrum:
    """Direct DFT ``c_k = (1/N) sum_j f_j exp(+i k 2 pi j / N)``, ``|k| <= R``."""
    samples = np.asarray(samples)
    N = samples.shape[0]
    _check_grid(N, R)
    k = np.arange(-R, R + 1)
    kernel = np.exp(1j * TWO_PI * np.outer(k, np.arange(N)) / N)
    return FourierSpectrum(R, kernel @ samples / N, N, var, snapshot)


def parseval_sum(spectrum: FourierSpectrum) -> float:
    return float(np.sum(spectrum.abs2()))


def _var_name(var) -> str:
    if isinstance(var, Parameter):
        return f"{var.block}[{var.index}]"
    return var.name


def model_spectrum(model: Model, N: int | None = None) -> FourierSpectrum:
    """Spectrum of ``model`` in its Fourier variable."""
    samples = evaluate_on_grid(model, N)
    return extract_coefficients(samples, model.R, _var_name(model.fourier_var), model.snapshot())


# ----------------------------------------------------------------------
# two-variable extraction
# ----------------------------------------------------------------------
def evaluate_on_grid_2d(model: Model, second_var, N1: int, N2: int) -> np.ndarray:
    """Output on the tensor grid of the model's Fourier variable (axis 0)
    and ``second_var`` (axis 1)."""
    second = model.template.slot_gates(second_var)
    if not second:
        raise ConfigurationError(f"{second_var} appears in no rotation gate")
    R1, R2 = model.R, len(second)
    _check_grid(N1, R1)
    _check_grid(N2, R2)
    x1, x2 = np.meshgrid(grid_points(N1), grid_points(N2), indexing="ij")
    angles = model.template.angles(
        model.params, model.data,
        {model.fourier_var: x1.reshape(-1), second_var: x2.reshape(-1)},
    )
    amps = np.zeros((N1 * N2, 2**model.n), dtype=complex)
    amps[:, 0] = 1.0
    amps = sim.evolve_batch(amps, model.template.gates, angles, model.n)
    return sim.measure_batch(amps, model.observable, model.n).reshape(N1, N2)


def extract_coefficients_2d(samples, R1: int, R2: int) -> np.ndarray:
    """``c[k1 + R1, k2 + R2]`` for ``f = sum c exp(-i (k1 x1 + k2 x2))``."""
    samples = np.asarray(samples)
    N1, N2 = samples.shape
    _check_grid(N1, R1)
    _check_grid(N2, R2)
    k1 = np.exp(1j * TWO_PI * np.outer(np.arange(-R1, R1 + 1), np.arange(N1)) / N1)
    k2 = np.exp(1j * TWO_PI * np.outer(np.arange(-R2, R2 + 1), np.arange(N2)) / N2)
    return k1 @ samples @ k2.T / (N1 * N2)


# ----------------------------------------------------------------------
# sampled statistics
# ----------------------------------------------------------------------
def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent substream for sample ``index``; the same draws come out
    whatever order or thread the samples are computed in."""
    return np.random.default_rng([int(seed), int(index)])


def sample_flat_params(model: Model, seed: int, index: int, low: float = 0.0,
                       high: float = TWO_PI) -> np.ndarray:
    return sample_rng(seed, index).uniform(low, high, model.template.n_params)


def _split_prefix(model: Model) -> int:
    """Index of the first gate that depends on a sampled parameter."""
    for k, gate in enumerate(model.template.gates):
        slot = getattr(gate, "slot", None)
        if isinstance(slot, Parameter) and slot != model.fourier_var:
            return k
    return len(model.template.gates)


def sample_spectra(model: Model, n_samples: int, seed: int, workers: int = 1,
                   N: int | None = None) -> list[FourierSpectrum]:
    """Spectra of ``model`` with every parameter redrawn uniformly from
    ``[0, 2 pi)`` per sample (the Fourier variable itself excepted)."""
    R = model.R
    N = 2 * R + 1 if N is None else int(N)
    _check_grid(N, R)
    xs = grid_points(N)
    template, n = model.template, model.n
    cut = _split_prefix(model)

    # gates before the first sampled parameter are shared by every sample
    head = template.gates[:cut]
    head_angles = template.angles(model.params, model.data, {model.fourier_var: xs})[:cut]
    prefix = np.zeros((N, 2**n), dtype=complex)
    prefix[:, 0] = 1.0
    prefix = sim.evolve_batch(prefix, head, head_angles, n)
    tail = template.gates[cut:]

    def one(s):
        params = template.unflatten(sample_flat_params(model, seed, s))
        angles = template.angles(params, model.data, {model.fourier_var: xs})[cut:]
        amps = sim.evolve_batch(prefix, tail, angles, n)
        values = sim.measure_batch(amps, model.observable, n)
        return extract_coefficients(values, R, _var_name(model.fourier_var),
                                    model.with_params(params).snapshot())

    return map_ordered(one, range(n_samples), workers)


def sum_sq_statistics(model: Model, n_samples: int, seed: int, workers: int = 1) -> SumSquareStats:
    """Mean and unbiased variance of ``sum_k |c_k|^2`` over uniform parameter draws."""
    if n_samples < 2:
        raise ConfigurationError("n_samples must be at least 2")
    spectra = sample_spectra(model, n_samples, seed, workers)
    return SumSquareStats.from_values([parseval_sum(s) for s in spectra])


# ----------------------------------------------------------------------
# export
# ----------------------------------------------------------------------
STATS_FIELDS = ["n", "L", "n_samples", "mean", "variance", "theory"]


def stats_row(n: int, L, stats: SumSquareStats, output_type: str = "expectation") -> dict:
    return {"n": n, "L": L, "n_samples": stats.n_samples, "mean": stats.mean,
            "variance": stats.variance, "theory": design_value(n, output_type)}


def write_csv(path, rows, fieldnames) -> None:
    """Write ``rows`` (dicts) to ``path`` or an open text stream."""
    if hasattr(path, "write"):
        _write_rows(path, rows, fieldnames)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, rows, fieldnames)


def _write_rows(fh, rows, fieldnames):
    writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in fieldnames})


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value
