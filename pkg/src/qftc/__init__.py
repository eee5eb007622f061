"""Fourier transform with outputs encoded in the computational basis, simulated densely."""

from .circulant import (CirculantSpec, EvolutionConfig, apply_circulant, circulant_spectrum,
                        digit_phase_layer, evolve_circulant)
from .errors import BudgetError, DomainError, ImpossibleOutcomeError, QftcError
from .fixedpoint import FixedPointCode, FixedPointFormat, encode_fixed
from .kernels import BACKEND
from .oracle import InputVector, prepare_oracle, real_reduction
from .program import CircuitProgram
from .qftc import QftcConfig, QftcResult, qftc_run, qftc_tally
from .statevector import GateTally, RegisterLayout, StateVector

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BudgetError", "CircuitProgram", "CirculantSpec", "DomainError", "EvolutionConfig",
    "FixedPointCode", "FixedPointFormat", "GateTally", "ImpossibleOutcomeError", "InputVector",
    "QftcConfig", "QftcError", "QftcResult", "RegisterLayout", "StateVector", "apply_circulant",
    "circulant_spectrum", "digit_phase_layer", "encode_fixed", "evolve_circulant",
    "prepare_oracle", "qftc_run", "qftc_tally", "real_reduction",
]
