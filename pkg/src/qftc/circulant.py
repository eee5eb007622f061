"""Circulant operators: post-selected application and Hamiltonian evolution.

A circulant ``C[a, b] = c[(b - a) mod N]`` is diagonal in the Fourier basis,
``C = QFT diag(Lambda) QFT^dagger`` with ``Lambda_k = sqrt(N) F_k`` and
``F = QFT c``.  Applying ``C`` loads ``c`` into an ancilla register, kicks
``exp(2 pi i j k / N)`` onto it, and keeps the all-zero ancilla outcome.
Evolving under ``C`` encodes each ``F_k`` as a fixed-point code with the
basis-encoded transform and turns its digits into phases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import gates
from .circuits import phase_network_ops, qft_ops
from .errors import DomainError, ImpossibleOutcomeError
from .oracle import InputVector, oracle_block
from .program import CircuitProgram, program
from .qftc import QftcConfig, block_distributions, exact_outputs
from .reference import circulant_matrix, dft_reference
from .statevector import POSTSELECT_MIN_PROB, RegisterLayout, StateVector, postselect

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CirculantSpec:
    """First row ``c`` of a circulant matrix (unit norm)."""

    c: InputVector

    @property
    def n(self) -> int:
        return self.c.n

    @property
    def L(self) -> int:
        return self.c.L

    @property
    def hermitian(self) -> bool:
        v = self.c.components
        return bool(np.allclose(v, np.conj(v[(-np.arange(self.n)) % self.n]),
                                atol=HERMITIAN_TOL, rtol=0))

    def matrix(self) -> np.ndarray:
        return circulant_matrix(self.c.components)

    @classmethod
    def from_values(cls, values) -> CirculantSpec:
        return cls(InputVector.normalized(values))

    @classmethod
    def from_dict(cls, doc: dict, tol: float = 1e-8) -> CirculantSpec:
        return cls(InputVector.from_dict(doc, tol, real_key="c_real", imag_key="c_imag"))

    @classmethod
    def from_json(cls, path) -> CirculantSpec:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        v = self.c.components
        return {"n": self.n, "c_real": v.real.tolist(), "c_imag": v.imag.tolist()}


@dataclass(frozen=True)
class SpectrumResult:
    F: np.ndarray
    Lambda: np.ndarray
    hermitian: bool

    def reconstruct(self) -> np.ndarray:
        n = len(self.F)
        k = np.arange(n)
        f = np.exp(2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)
        return f @ np.diag(self.Lambda) @ f.conj().T


def circulant_spectrum(spec: CirculantSpec) -> SpectrumResult:
    F = dft_reference(spec.c.components)
    return SpectrumResult(F, math.sqrt(spec.n) * F, spec.hermitian)


# --- post-selected application ----------------------------------------------------

def circulant_program(spec: CirculantSpec) -> CircuitProgram:
    """QFT^dagger on ``s``, load ``c`` into ``anc``, phase kickback, H on ``anc``.

    Post-selecting ``anc = 0`` and applying the QFT to ``s`` completes the map.
    """
    L = spec.L
    layout = RegisterLayout.sequential([("s", L), ("anc", L)])
    s, a = layout.qubits("s"), layout.qubits("anc")
    ops = qft_ops(s, inverse=True)
    ops.append(oracle_block(spec.c, a))
    ops += phase_network_ops(s, a, None)
    ops += [gates.h(q) for q in a]
    return program(ops, layout, "circulant")


def apply_circulant(s: InputVector, spec: CirculantSpec) -> tuple[StateVector, float]:
    """Normalized ``C|s>`` and the probability of the post-selected outcome."""
    if s.n != spec.n:
        raise DomainError("state and circulant dimensions differ")
    L = spec.L
    prog = circulant_program(spec)
    psi = np.zeros(2 ** (2 * L), dtype=complex)
    psi[:: 2**L] = s.components  # anc = 0
    state = prog.execute(StateVector(2 * L, psi))
    kept, prob = postselect(state, prog.layout, "anc", 0)
    reduced = kept.amplitudes[:: 2**L]
    out = program(qft_ops(range(L)), RegisterLayout.sequential([("s", L)]))
    return out.execute(StateVector(L, reduced)), prob


def success_probability(s: InputVector, spec: CirculantSpec) -> float:
    """``sum_k |frak_s_k F_k|^2`` computed from the classical transforms."""
    frak = np.conj(dft_reference(np.conj(s.components)))  # QFT^dagger s
    F = circulant_spectrum(spec).F
    p = float(np.sum(np.abs(frak * F) ** 2))
    if p < POSTSELECT_MIN_PROB:
        raise ImpossibleOutcomeError(f"C|s> vanishes (success probability {p:.3g})")
    return p


# --- Hamiltonian evolution -----------------------------------------------------------

@dataclass(frozen=True)
class EvolutionConfig:
    """Evolution time ``t`` and error target ``delta`` for an ``N``-dimensional circulant.

    ``epsilon_F = sqrt(delta) / (sqrt(N) t)`` is the accuracy needed on each
    Fourier coefficient; ``p0`` is the digit count achieving it unless given.
    """

    N: int
    t: float
    delta: float = 0.1
    p0: int | None = None
    p_est: int | None = None

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise DomainError("delta must lie in (0, 1)")
        if self.p0 is None:
            eps = self.epsilon_F
            p0 = 1 if eps >= 1 else max(1, math.ceil(math.log2(1 / eps)))
            object.__setattr__(self, "p0", p0)

    @property
    def epsilon_F(self) -> float:
        if self.t == 0:
            return math.inf
        return math.sqrt(self.delta) / (math.sqrt(self.N) * abs(self.t))

    @classmethod
    def for_digits(cls, N: int, t: float, p0: int) -> EvolutionConfig:
        """Config whose ``epsilon_F`` is exactly ``2**-p0`` (``delta = N t^2 eps^2``)."""
        eps = 2.0**-p0
        return cls(N, t, N * t * t * eps * eps, p0)

    def qftc_config(self) -> QftcConfig:
        return QftcConfig(int(math.log2(self.N)), self.p0, self.delta, self.p_est)


def digit_phase_layer(L: int, t: float, p0: int) -> CircuitProgram:
    """Phase ``exp(-i sqrt(N) t v)`` for the complemental code ``v`` in ``value``."""
    layout = RegisterLayout.sequential([("value", p0 + 1)])
    q = layout.qubits("value")
    scale = math.sqrt(2**L) * t
    ops = [gates.phase(scale, q[0])]
    ops += [gates.phase(-scale * 2.0**-p, q[p]) for p in range(1, p0 + 1)]
    return program(ops, layout, "digit-phase")


def digit_phases(L: int, t: float, p0: int) -> np.ndarray:
    """Diagonal of ``digit_phase_layer`` indexed by code."""
    prog = digit_phase_layer(L, t, p0)
    d = np.ones(2 ** (p0 + 1), dtype=complex)
    for op in prog.ops:
        bit = p0 - op.targets[0]
        on = (np.arange(len(d)) >> bit) & 1
        d *= np.where(on == 1, op.matrix[1, 1], 1)
    return d


@dataclass
class EvolutionResult:
    state: StateVector  # output with all ancillas clean; not renormalized
    fidelity: float  # |<exact | output>|
    config: EvolutionConfig
    clean_amplitudes: np.ndarray  # m_k per Fourier index

    @property
    def norm(self) -> float:
        return self.state.norm


def evolve_circulant(s: InputVector, spec: CirculantSpec,
                     config: EvolutionConfig) -> EvolutionResult:
    """``exp(-i C t)|s>`` through basis-encoded Fourier coefficients.

    For every Fourier index ``k`` the encoder leaves a distribution
    ``P_k(code)``; the phase layer and the uncompute return amplitude
    ``m_k = sum_code P_k(code) exp(-i sqrt(N) t value(code))`` to the clean
    ancilla subspace.  The returned state is that component.
    """
    if not spec.hermitian:
        raise DomainError("evolution requires a Hermitian circulant")
    if s.n != spec.n or config.N != spec.n:
        raise DomainError("state, circulant and config dimensions differ")
    L = spec.L
    frak = np.conj(dft_reference(np.conj(s.components)))
    if config.t == 0:
        m = np.ones(spec.n, dtype=complex)
    else:
        qc = config.qftc_config()
        exact_outputs(spec.c, qc)  # range gate on every F_k
        phases = digit_phases(L, config.t, config.p0)
        m = np.array([np.dot(cond, phases) for cond, _ in block_distributions(spec.c, qc)])
    lam = circulant_spectrum(spec).Lambda.real
    fid = abs(np.sum(np.abs(frak) ** 2 * np.exp(1j * lam * config.t) * m))
    k = np.arange(spec.n)
    qft = np.exp(2j * np.pi * np.outer(k, k) / spec.n) / math.sqrt(spec.n)
    return EvolutionResult(StateVector(L, qft @ (frak * m)), float(fid), config, m)

