"""Circuit templates with symbolic slots and the partitioned :class:`Model`.

A template is an ordered gate list whose rotation angles are symbolic
:class:`~pqcfourier.sim.Parameter` or :class:`~pqcfourier.sim.DataVariable`
slots. Parameters are grouped into named blocks; a block is one ansatz
factor ``U_l(theta_l)`` of a multi-block circuit. Binding every slot yields a
:class:`BoundCircuit` that :func:`pqcfourier.sim.run` can execute.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import sim
from .errors import BindingError, StructuralError
from .sim import (
    CNOT,
    Constant,
    DataVariable,
    FixedUnitary,
    Hadamard,
    Observable,
    Parameter,
    PauliRotation,
    Projector,
)

ENTANGLERS = ("chain", "ring")


@dataclass(frozen=True)
class BoundCircuit:
    """Executable circuit: every rotation slot is a :class:`Constant`."""

    n: int
    gates: tuple

    def angles(self) -> list:
        return [g.slot.angle if isinstance(g, PauliRotation) else None for g in self.gates]


@dataclass(frozen=True)
class CircuitTemplate:
    n: int
    gates: tuple
    blocks: tuple = ()  # ((name, dim), ...)
    data_vars: tuple = ()

    def __post_init__(self):
        sim.check_qubits(self.n)
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "blocks", tuple((str(b), int(d)) for b, d in self.blocks))
        object.__setattr__(self, "data_vars", tuple(self.data_vars))
        names = [b for b, _ in self.blocks]
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate block names in {names}")
        if len(set(self.data_vars)) != len(self.data_vars):
            raise StructuralError(f"duplicate data variables in {self.data_vars}")
        dims = dict(self.blocks)
        for gate in self.gates:
            if any(not 0 <= q < self.n for q in gate.qubits):
                raise StructuralError(f"{gate} acts outside a {self.n}-qubit register")
            slot = getattr(gate, "slot", None)
            if isinstance(slot, Parameter):
                if slot.block not in dims:
                    raise StructuralError(f"unknown parameter block {slot.block!r}")
                if not 0 <= slot.index < dims[slot.block]:
                    raise StructuralError(
                        f"index {slot.index} outside block {slot.block!r} of size {dims[slot.block]}"
                    )
            elif isinstance(slot, DataVariable) and slot.name not in self.data_vars:
                raise StructuralError(f"undeclared data variable {slot.name!r}")

    @property
    def n_params(self) -> int:
        return sum(d for _, d in self.blocks)

    def param_slots(self) -> list[Parameter]:
        """All parameter slots in flat order (block order, then index)."""
        return [Parameter(b, i) for b, d in self.blocks for i in range(d)]

    def slot_gates(self, slot) -> list[int]:
        """Positions of the rotation gates carrying ``slot``."""
        return [
            k for k, g in enumerate(self.gates)
            if isinstance(g, PauliRotation) and g.slot == slot
        ]

    def then(self, other: "CircuitTemplate") -> "CircuitTemplate":
        """This template followed by ``other`` on the same register."""
        if other.n != self.n:
            raise StructuralError(f"cannot compose {self.n}- and {other.n}-qubit templates")
        data_vars = self.data_vars + tuple(v for v in other.data_vars if v not in self.data_vars)
        return CircuitTemplate(self.n, self.gates + other.gates, self.blocks + other.blocks, data_vars)

    # -- binding -------------------------------------------------------
    def normalize_params(self, params=None, *, default_zero: bool = False) -> dict:
        """Return ``{block: float array}`` covering every block.

        ``params`` may be a mapping by block name or a sequence of
        per-block vectors in block order.
        """
        if params is None:
            params = {}
        if not isinstance(params, Mapping):
            params = list(params)
            if len(params) != len(self.blocks):
                raise BindingError(
                    f"expected {len(self.blocks)} parameter blocks "
                    f"{[b for b, _ in self.blocks]}, got {len(params)}"
                )
            params = {b: v for (b, _), v in zip(self.blocks, params)}
        out = {}
        for name, dim in self.blocks:
            if name not in params:
                if not default_zero:
                    raise BindingError(f"missing parameter block {name!r}")
                out[name] = np.zeros(dim)
                continue
            vec = np.array(params[name], dtype=float).reshape(-1)
            if vec.shape[0] != dim:
                raise BindingError(
                    f"block {name!r} has dimension {dim}, got a vector of length {vec.shape[0]}"
                )
            out[name] = vec
        extra = set(params) - set(dict(self.blocks))
        if extra:
            raise BindingError(f"unknown parameter blocks {sorted(extra)}")
        return out

    def flatten(self, params) -> np.ndarray:
        params = self.normalize_params(params)
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([params[b] for b, _ in self.blocks])

    def unflatten(self, flat) -> dict:
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.shape[0] != self.n_params:
            raise BindingError(f"expected {self.n_params} parameters, got {flat.shape[0]}")
        out, start = {}, 0
        for name, dim in self.blocks:
            out[name] = flat[start:start + dim]
            start += dim
        return out

    def angles(self, params, data, override=None) -> list:
        """Per-gate angles; ``override`` maps slots to scalars or arrays and
        takes precedence over ``params``/``data``."""
        override = override or {}
        data = data or {}
        angles = []
        for gate in self.gates:
            if not isinstance(gate, PauliRotation):
                angles.append(None)
                continue
            slot = gate.slot
            if slot in override:
                angles.append(override[slot])
            elif isinstance(slot, Constant):
                angles.append(slot.angle)
            elif isinstance(slot, Parameter):
                angles.append(params[slot.block][slot.index])
            else:
                if slot.name not in data:
                    raise BindingError(f"missing data variable {slot.name!r}")
                angles.append(float(data[slot.name]))
        return angles

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "gates": [_gate_to_dict(g) for g in self.gates],
            "blocks": [{"name": b, "dim": d} for b, d in self.blocks],
            "data_vars": list(self.data_vars),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, obj: dict) -> "CircuitTemplate":
        try:
            gates = [_gate_from_dict(g) for g in obj["gates"]]
            blocks = [(b["name"], b["dim"]) for b in obj.get("blocks", [])]
            return cls(int(obj["n"]), gates, blocks, tuple(obj.get("data_vars", [])))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed circuit template: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "CircuitTemplate":
        return cls.from_dict(json.loads(text))


def _slot_to_dict(slot):
    if isinstance(slot, Parameter):
        return {"type": "parameter", "block": slot.block, "index": slot.index}
    if isinstance(slot, DataVariable):
        return {"type": "data", "name": slot.name}
    return {"type": "constant", "angle": slot.angle}


def _slot_from_dict(obj):
    kind = obj["type"]
    if kind == "parameter":
        return Parameter(obj["block"], int(obj["index"]))
    if kind == "data":
        return DataVariable(obj["name"])
    if kind == "constant":
        return Constant(float(obj["angle"]))
    raise StructuralError(f"unknown slot type {kind!r}")


def _gate_to_dict(gate) -> dict:
    if isinstance(gate, PauliRotation):
        return {"kind": "pauli_rotation", "qubits": list(gate.qubits),
                "pauli": gate.paulis, "slot": _slot_to_dict(gate.slot)}
    if isinstance(gate, Hadamard):
        return {"kind": "hadamard", "qubits": [gate.qubit], "slot": None}
    if isinstance(gate, CNOT):
        return {"kind": "cnot", "qubits": [gate.control, gate.target], "slot": None}
    m = gate.matrix
    return {"kind": "unitary", "qubits": list(gate.qubits), "slot": None,
            "matrix": [[[z.real, z.imag] for z in row] for row in m]}


def _gate_from_dict(obj):
    kind, qubits = obj["kind"], obj["qubits"]
    if kind == "pauli_rotation":
        return PauliRotation(obj["pauli"], tuple(qubits), _slot_from_dict(obj["slot"]))
    if kind == "hadamard":
        return Hadamard(qubits[0])
    if kind == "cnot":
        return CNOT(qubits[0], qubits[1])
    if kind == "unitary":
        m = np.array(obj["matrix"], dtype=float)
        return FixedUnitary(m[..., 0] + 1j * m[..., 1], tuple(qubits))
    raise StructuralError(f"unknown gate kind {kind!r}")


def bind(template: CircuitTemplate, params=None, data=None) -> BoundCircuit:
    """Resolve every slot of ``template``; gate order is preserved."""
    params = template.normalize_params(params)
    data = dict(data or {})
    missing = [v for v in template.data_vars if v not in data]
    if missing:
        raise BindingError(f"missing data variables {missing}")
    angles = template.angles(params, data)
    gates = tuple(
        PauliRotation(g.paulis, g.qubits, Constant(float(a))) if isinstance(g, PauliRotation) else g
        for g, a in zip(template.gates, angles)
    )
    return BoundCircuit(template.n, gates)


# ----------------------------------------------------------------------
# hardware-efficient families
# ----------------------------------------------------------------------
def _check_layout(n: int, L: int, axis: str, entangler: str) -> str:
    axes = axis.upper()
    if not axes or set(axes) - set("XYZ"):
        raise StructuralError(f"axis must be drawn from X, Y, Z, got {axis!r}")
    if entangler not in ENTANGLERS:
        raise StructuralError(f"entangler must be one of {ENTANGLERS}, got {entangler!r}")
    if n < 2 and entangler == "ring":
        raise StructuralError("ring entangler needs at least 2 qubits")
    if L < 1:
        raise StructuralError(f"need at least one layer, got {L}")
    return axes


def entangler_pairs(n: int, entangler: str) -> list[tuple[int, int]]:
    pairs = [(q, q + 1) for q in range(n - 1)]
    if entangler == "ring":
        pairs.append((n - 1, 0))
    return pairs


def _layers(n, L, axes, entangler, slot_for):
    gates = []
    for layer in range(L):
        for k, a in enumerate(axes):
            for q in range(n):
                gates.append(PauliRotation(a, (q,), slot_for(layer, k * n + q)))
        gates.extend(CNOT(c, t) for c, t in entangler_pairs(n, entangler))
    return gates


def hea(n: int, L: int, axis: str = "Y", entangler: str = "chain", prefix: str = "theta") -> CircuitTemplate:
    """Hardware-efficient ansatz.

    Each layer is one rotation per qubit about ``axis`` followed by a CNOT
    chain ``(0,1), (1,2), ...`` (``ring`` closes it with ``(n-1, 0)``).
    Layer ``l`` owns the parameter block ``f"{prefix}{l}"`` of dimension
    ``n``. A multi-letter ``axis`` such as ``"XY"`` applies one rotation
    per letter and qubit, giving blocks of dimension ``n * len(axis)``.
    """
    axes = _check_layout(n, L, axis, entangler)
    gates = _layers(n, L, axes, entangler, lambda l, i: Parameter(f"{prefix}{l}", i))
    blocks = [(f"{prefix}{l}", n * len(axes)) for l in range(L)]
    return CircuitTemplate(n, gates, blocks)


def hee(n: int, L: int, axis: str = "Y", entangler: str = "chain", var: str = "x") -> CircuitTemplate:
    """Hardware-efficient embedding: the :func:`hea` layout with every
    rotation angle replaced by the single data variable ``var``."""
    axes = _check_layout(n, L, axis, entangler)
    gates = _layers(n, L, axes, entangler, lambda l, i: DataVariable(var))
    return CircuitTemplate(n, gates, (), (var,))


# ----------------------------------------------------------------------
# models
# ----------------------------------------------------------------------
def _as_var(var):
    if isinstance(var, (Parameter, DataVariable)):
        return var
    if isinstance(var, str):
        return DataVariable(var)
    block, index = var
    return Parameter(block, int(index))


@dataclass(frozen=True, eq=False)
class Model:
    """A template, an observable, one designated Fourier variable and fixed
    values for every other slot.

    Parameters absent from ``params`` default to zero. Splitting the gate
    list at the gates carrying ``fourier_var`` gives the prefix state and
    the conjugated suffix observable of a single-block Fourier analysis.
    """

    template: CircuitTemplate
    observable: Observable
    fourier_var: object
    params: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        var = _as_var(self.fourier_var)
        object.__setattr__(self, "fourier_var", var)
        if self.observable.n != self.template.n:
            raise StructuralError(
                f"observable acts on {self.observable.n} qubits, template has {self.template.n}"
            )
        params = self.template.normalize_params(self.params, default_zero=True)
        for v in params.values():
            v.setflags(write=False)
        data = {k: float(v) for k, v in dict(self.data).items()}
        if isinstance(var, DataVariable):
            data.pop(var.name, None)
        missing = [
            v for v in self.template.data_vars
            if v not in data and not (isinstance(var, DataVariable) and v == var.name)
        ]
        if missing:
            raise BindingError(f"missing data variables {missing}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "data", data)
        if not self.template.slot_gates(var):
            raise StructuralError(f"Fourier variable {var} appears in no rotation gate")

    @property
    def n(self) -> int:
        return self.template.n

    @property
    def output_type(self) -> str:
        return "probability" if isinstance(self.observable, Projector) else "expectation"

    @property
    def R(self) -> int:
        return data_gate_count(self)

    def with_params(self, params) -> "Model":
        if not isinstance(params, Mapping):
            params = self.template.unflatten(params)
        merged = {**self.params, **params}
        return replace(self, params=merged)

    def flat_params(self) -> np.ndarray:
        return self.template.flatten(self.params)

    def _fixed_value(self):
        var = self.fourier_var
        if isinstance(var, Parameter):
            return self.params[var.block][var.index]
        return 0.0

    def evaluate_batch(self, values) -> np.ndarray:
        """Model output with the Fourier variable set to each of ``values``."""
        values = np.asarray(values, dtype=float).reshape(-1)
        angles = self.template.angles(self.params, self.data, {self.fourier_var: values})
        amps = np.zeros((values.shape[0], 2**self.n), dtype=complex)
        amps[:, 0] = 1.0
        amps = sim.evolve_batch(amps, self.template.gates, angles, self.n)
        return sim.measure_batch(amps, self.observable, self.n)

    def evaluate(self, value: float | None = None) -> float:
        """Model output at ``value`` of the Fourier variable (a data
        variable defaults to 0, a parameter to its fixed value)."""
        if value is None:
            value = self._fixed_value()
        return float(self.evaluate_batch([value])[0])

    def bound(self, value: float | None = None) -> BoundCircuit:
        if value is None:
            value = self._fixed_value()
        var = self.fourier_var
        if isinstance(var, DataVariable):
            return bind(self.template, self.params, {**self.data, var.name: value})
        params = {k: v.copy() for k, v in self.params.items()}
        params[var.block][var.index] = value
        return bind(self.template, params, self.data)

    def snapshot(self) -> str:
        """Digest of the fixed bindings (exact float bit patterns)."""
        h = hashlib.sha256()
        for name in sorted(self.params):
            h.update(name.encode())
            h.update(np.ascontiguousarray(self.params[name], dtype=float).tobytes())
        for name in sorted(self.data):
            h.update(name.encode())
            h.update(float(self.data[name]).hex().encode())
        return h.hexdigest()[:16]


def data_gate_count(model: Model) -> int:
    """Number of rotations carrying the Fourier variable; the spectrum in
    that variable lies in the integers ``-R..R``."""
    return len(model.template.slot_gates(model.fourier_var))


def observable_for(n: int, output_type: str = "expectation") -> Observable:
    if output_type == "expectation":
        return sim.z_string(n)
    if output_type == "probability":
        return Projector("0" * n)
    raise StructuralError(f"output type must be expectation or probability, got {output_type!r}")


def qnn(n: int, L_embed: int, axis: str = "Y", entangler: str = "chain",
        output_type: str = "expectation") -> Model:
    """Embedding ``hee(n, L_embed)`` followed by one trainable HEA layer,
    measured with ``Z^n`` (or ``|0^n><0^n|`` for the probability type)."""
    template = hee(n, L_embed, axis, entangler).then(hea(n, 1, axis, entangler))
    return Model(template, observable_for(n, output_type), DataVariable("x"))


def expectation_model(template: CircuitTemplate, observable: Observable | None = None,
                      fourier_var=None) -> Model:
    """Wrap a template as a Model; the Fourier variable defaults to the
    first parameter (or data variable) so gradient code can use it."""
    if observable is None:
        observable = sim.z_string(template.n)
    if fourier_var is None:
        if template.blocks:
            fourier_var = template.param_slots()[0]
        elif template.data_vars:
            fourier_var = DataVariable(template.data_vars[0])
        else:
            raise StructuralError("template has no variable slots")
    return Model(template, observable, fourier_var)


__all__: Sequence[str] = [
    "BoundCircuit", "CircuitTemplate", "Model", "bind", "data_gate_count",
    "entangler_pairs", "expectation_model", "hea", "hee", "observable_for", "qnn",
]
