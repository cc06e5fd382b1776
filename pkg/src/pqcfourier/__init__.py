"""Statevector simulation and Fourier-spectrum diagnostics for
parameterized quantum circuits."""

from .errors import BindingError, ConfigurationError, StructuralError, UnsupportedGeneratorError
from .sim import (
    CNOT,
    Constant,
    DataVariable,
    FixedUnitary,
    Hadamard,
    Parameter,
    PauliRotation,
    PauliString,
    Projector,
    Statevector,
    apply_gate,
    expectation,
    probability,
    run,
    rx,
    ry,
    rz,
    z_string,
    zero_state,
)
from .circuits import BoundCircuit, CircuitTemplate, Model, bind, data_gate_count, hea, hee, qnn
from .fourier import (
    FourierSpectrum,
    SumSquareStats,
    design_value,
    evaluate_on_grid,
    extract_coefficients,
    model_spectrum,
    parseval_sum,
    sum_sq_statistics,
)
from .diagnostics import (
    design_bound_check,
    ensemble_second_moment,
    expressibility2,
    fit_decay_base,
    gradient_variance,
    haar_second_moment,
    parameter_shift_grad,
)

__version__ = "0.1.0"
