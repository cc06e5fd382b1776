"""Dense statevector simulation of n-qubit circuits.

Amplitudes are indexed so that qubit 0 is the least significant bit of the
basis index. Every kernel works on a batch of states of shape ``(B, 2**n)``;
the single-state API in this module is a thin wrapper around the batched
kernels, which the Fourier and diagnostics code drive directly.

Rotations follow the ``exp(-i * angle * P / 2)`` convention, so each
rotation contributes integer frequencies with period ``2*pi`` and the
two-term parameter-shift rule with shifts of ``pi/2`` is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BindingError, ConfigurationError, StructuralError

MAX_QUBITS = 12


# ----------------------------------------------------------------------
# slots
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Parameter:
    """Trainable angle ``index`` of the parameter block ``block``."""

    block: str
    index: int


@dataclass(frozen=True)
class DataVariable:
    """Scalar input fed to every gate carrying this slot."""

    name: str


@dataclass(frozen=True)
class Constant:
    angle: float


Slot = Union[Parameter, DataVariable, Constant]


def as_slot(value) -> Slot:
    """Coerce floats to :class:`Constant` and strings to :class:`DataVariable`."""
    if isinstance(value, (Parameter, DataVariable, Constant)):
        return value
    if isinstance(value, str):
        return DataVariable(value)
    return Constant(float(value))


# ----------------------------------------------------------------------
# gates
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PauliRotation:
    """``exp(-i * angle * P / 2)`` for a Pauli string ``P`` on ``qubits``.

    ``paulis[k]`` is the Pauli letter acting on ``qubits[k]``.
    """

    paulis: str
    qubits: tuple
    slot: Slot

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        paulis = self.paulis.upper()
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "paulis", paulis)
        object.__setattr__(self, "slot", as_slot(self.slot))
        if len(paulis) != len(qubits) or not qubits:
            raise StructuralError(
                f"Pauli string {paulis!r} does not match qubits {qubits}"
            )
        if set(paulis) - set("XYZ"):
            raise StructuralError(f"rotation generator must use X, Y, Z only: {paulis!r}")
        if len(set(qubits)) != len(qubits):
            raise StructuralError(f"repeated qubit in {qubits}")


@dataclass(frozen=True)
class Hadamard:
    qubit: int

    @property
    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise StructuralError("CNOT control and target must differ")

    @property
    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True, eq=False)
class FixedUnitary:
    """Parameter-free one- or two-qubit unitary.

    For two qubits the first listed qubit is the most significant bit of
    the local 4x4 matrix index.
    """

    matrix: np.ndarray = field(repr=False)
    qubits: tuple

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        matrix = np.array(self.matrix, dtype=complex)
        dim = 2 ** len(qubits)
        if len(qubits) not in (1, 2) or matrix.shape != (dim, dim):
            raise StructuralError(
                f"FixedUnitary needs a 2x2 or 4x4 matrix matching its qubits, "
                f"got {matrix.shape} on {qubits}"
            )
        if len(set(qubits)) != len(qubits):
            raise StructuralError(f"repeated qubit in {qubits}")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(dim), atol=1e-10):
            raise StructuralError("FixedUnitary matrix is not unitary")
        matrix.setflags(write=False)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "matrix", matrix)


Gate = Union[PauliRotation, Hadamard, CNOT, FixedUnitary]

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rx(qubit: int, slot) -> PauliRotation:
    return PauliRotation("X", (qubit,), slot)


def ry(qubit: int, slot) -> PauliRotation:
    return PauliRotation("Y", (qubit,), slot)


def rz(qubit: int, slot) -> PauliRotation:
    return PauliRotation("Z", (qubit,), slot)


def inverse(gate: Gate) -> Gate:
    """Inverse of a gate whose slot, if any, is a constant."""
    if isinstance(gate, PauliRotation):
        if not isinstance(gate.slot, Constant):
            raise BindingError(f"cannot invert unresolved slot {gate.slot}")
        return PauliRotation(gate.paulis, gate.qubits, Constant(-gate.slot.angle))
    if isinstance(gate, FixedUnitary):
        return FixedUnitary(gate.matrix.conj().T, gate.qubits)
    return gate


# ----------------------------------------------------------------------
# states and observables
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Statevector:
    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n:
            raise StructuralError(
                f"{self.n} qubits need {2**self.n} amplitudes, got {amps.shape[0]}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Paulis; ``paulis[q]`` acts on qubit ``q``."""

    paulis: str

    def __post_init__(self):
        paulis = self.paulis.upper()
        if not paulis or set(paulis) - set("IXYZ"):
            raise StructuralError(f"invalid Pauli string {self.paulis!r}")
        object.__setattr__(self, "paulis", paulis)

    @property
    def n(self) -> int:
        return len(self.paulis)


@dataclass(frozen=True)
class Projector:
    """``|b><b|`` where ``bits[q]`` is the value of qubit ``q``."""

    bits: str

    def __post_init__(self):
        if not self.bits or set(self.bits) - set("01"):
            raise StructuralError(f"invalid bitstring {self.bits!r}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return sum(1 << q for q, b in enumerate(self.bits) if b == "1")


Observable = Union[PauliString, Projector]


def z_string(n: int) -> PauliString:
    return PauliString("Z" * n)


# ----------------------------------------------------------------------
# batched kernels
# ----------------------------------------------------------------------
def check_qubits(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(
            f"qubit count must satisfy 1 <= n <= {MAX_QUBITS}, got {n}"
        )


@lru_cache(maxsize=None)
def _pauli_action(n: int, paulis: str, qubits: tuple):
    # (P psi)[i] = phase[i] * psi[perm[i]]
    idx = np.arange(2**n)
    xmask = 0
    for p, q in zip(paulis, qubits):
        if p in "XY":
            xmask |= 1 << q
    perm = idx ^ xmask
    phase = np.ones(2**n, dtype=complex)
    for p, q in zip(paulis, qubits):
        bit = (perm >> q) & 1
        if p == "Z":
            phase *= 1 - 2 * bit
        elif p == "Y":
            phase *= 1j * (1 - 2 * bit)
    perm.setflags(write=False)
    phase.setflags(write=False)
    return perm, phase


@lru_cache(maxsize=None)
def _cnot_perm(n: int, control: int, target: int):
    idx = np.arange(2**n)
    perm = idx ^ (((idx >> control) & 1) << target)
    perm.setflags(write=False)
    return perm


def _check_gate(gate: Gate, n: int) -> None:
    if any(not 0 <= q < n for q in gate.qubits):
        raise StructuralError(f"{gate} acts outside a {n}-qubit register")


def _apply_matrix(amps: np.ndarray, matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    batch = amps.shape[0]
    psi = amps.reshape((batch,) + (2,) * n)
    axes = [n - q for q in qubits]  # axis 0 is the batch
    k = len(qubits)
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(batch, -1)


def apply_batch(amps: np.ndarray, gate: Gate, n: int, angle=None) -> np.ndarray:
    """Apply ``gate`` to every row of ``amps``.

    ``angle`` is required for rotations and may be a scalar or one angle
    per batch row.
    """
    _check_gate(gate, n)
    if isinstance(gate, PauliRotation):
        if angle is None:
            raise BindingError(f"no angle supplied for slot {gate.slot}")
        perm, phase = _pauli_action(n, gate.paulis, gate.qubits)
        half = np.asarray(angle, dtype=float) / 2
        c, s = np.cos(half), np.sin(half)
        if half.ndim:
            c, s = c[:, None], s[:, None]
        return c * amps - 1j * s * (phase * amps[:, perm])
    if isinstance(gate, CNOT):
        return amps[:, _cnot_perm(n, gate.control, gate.target)]
    if isinstance(gate, Hadamard):
        return _apply_matrix(amps, _HADAMARD, gate.qubits, n)
    if isinstance(gate, FixedUnitary):
        return _apply_matrix(amps, gate.matrix, gate.qubits, n)
    raise StructuralError(f"unknown gate {gate!r}")


def evolve_batch(amps: np.ndarray, gates: Sequence[Gate], angles: Sequence, n: int) -> np.ndarray:
    """Apply ``gates`` in order; ``angles[k]`` is the angle for ``gates[k]``
    (ignored for parameter-free gates)."""
    for gate, angle in zip(gates, angles):
        amps = apply_batch(amps, gate, n, angle)
    return amps


def measure_batch(amps: np.ndarray, obs: Observable, n: int) -> np.ndarray:
    """Exact expectation (Pauli string) or probability (projector) per row."""
    if obs.n != n:
        raise StructuralError(f"observable on {obs.n} qubits, register has {n}")
    if isinstance(obs, Projector):
        return np.abs(amps[:, obs.index]) ** 2
    active = [(p, q) for q, p in enumerate(obs.paulis) if p != "I"]
    if not active:
        # Tr[rho I] = 1 exactly for normalized states
        return np.ones(amps.shape[0])
    paulis, qubits = zip(*active)
    perm, phase = _pauli_action(n, "".join(paulis), tuple(qubits))
    value = np.sum(amps.conj() * phase * amps[:, perm], axis=1)
    assert np.all(np.abs(value.imag) < 1e-10), "Pauli expectation has imaginary part"
    return value.real


# ----------------------------------------------------------------------
# single-state API
# ----------------------------------------------------------------------
def zero_state(n: int) -> Statevector:
    check_qubits(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return Statevector(n, amps)


def _constant_angle(gate: Gate):
    if not isinstance(gate, PauliRotation):
        return None
    if not isinstance(gate.slot, Constant):
        raise BindingError(f"slot {gate.slot} is not bound to an angle")
    return gate.slot.angle


def apply_gate(state: Statevector, gate: Gate, angle: float | None = None) -> Statevector:
    """Return ``gate |state>``; ``angle`` overrides the gate's constant slot."""
    if angle is None:
        angle = _constant_angle(gate)
    out = apply_batch(state.amplitudes[None, :], gate, state.n, angle)
    return Statevector(state.n, out[0])


def expectation(state: Statevector, obs: PauliString) -> float:
    if not isinstance(obs, PauliString):
        raise StructuralError("expectation needs a PauliString observable")
    return float(measure_batch(state.amplitudes[None, :], obs, state.n)[0])


def probability(state: Statevector, obs: Projector) -> float:
    if not isinstance(obs, Projector):
        raise StructuralError("probability needs a Projector observable")
    return float(measure_batch(state.amplitudes[None, :], obs, state.n)[0])


def measure(state: Statevector, obs: Observable) -> float:
    return float(measure_batch(state.amplitudes[None, :], obs, state.n)[0])


def run(circuit, n: int, initial: Statevector | None = None) -> Statevector:
    """Simulate a bound circuit (or any iterable of bound gates) from
    ``|0...0>`` or from ``initial``."""
    gates: Iterable[Gate] = getattr(circuit, "gates", circuit)
    gates = list(gates)
    state = zero_state(n) if initial is None else initial
    if state.n != n:
        raise StructuralError(f"initial state has {state.n} qubits, expected {n}")
    angles = [_constant_angle(g) for g in gates]
    amps = evolve_batch(state.amplitudes[None, :], gates, angles, n)
    return Statevector(n, amps[0])
