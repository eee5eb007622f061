"""Standard circuit builders: Fourier transforms, phase networks, swap test,
reflections, Grover operator and amplitude estimation.

The ``*_ops`` helpers act on explicit qubit lists so callers can place them
anywhere inside a larger layout; the public builders wrap them in programs
with their own layouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gates
from .fixedpoint import FixedPointCode, FixedPointFormat
from .program import CircuitProgram, program
from .statevector import GateOp, GateTally, RegisterLayout, StateVector

NEG_I = -np.eye(2, dtype=complex)


# --- Fourier transform ---------------------------------------------------------

def qft_ops(qubits: Sequence[int], inverse: bool = False, swaps: bool = True) -> list:
    """QFT with ``F[k, j] = exp(2 pi i j k / N) / sqrt(N)`` on ``qubits`` (MSB first)."""
    qs = list(qubits)
    n = len(qs)
    ops = []
    for i in range(n):
        ops.append(gates.h(qs[i]))
        for m in range(i + 1, n):
            ops.append(gates.r(m - i + 1, qs[i], ((qs[m], 1),)))
    if swaps:
        for i in range(n // 2):
            ops.append(gates.swap(qs[i], qs[n - 1 - i]))
    if inverse:
        ops = [op.inverse() for op in reversed(ops)]
    return ops


def qft_circuit(L: int, inverse: bool = False) -> CircuitProgram:
    if L < 1:
        raise ValueError("L must be at least 1")
    layout = RegisterLayout.sequential([("x", L)])
    return program(qft_ops(range(L), inverse), layout, "QFT†" if inverse else "QFT")


def qft_tally(L: int, controls: int = 0) -> GateTally:
    """Analytic tally of ``qft_ops`` with ``controls`` extra control qubits on every gate."""
    from .statevector import gate_cost
    n_h = L
    n_r = L * (L - 1) // 2
    n_s = L // 2
    swap_cost = 3 if controls == 0 else gate_cost(2 + controls)
    return GateTally(n_h * gate_cost(1 + controls) + n_r * gate_cost(2 + controls)
                     + n_s * swap_cost, 0, 0)


# --- phase network ---------------------------------------------------------------

def phase_network_ops(k_qubits: Sequence[int], j_qubits: Sequence[int], anc: int | None,
                      k_value: int | None = None) -> list:
    """``|k>|j>|1> -> exp(2 pi i j k / N)|k>|j>|1>``.

    Digit ``k_a`` (weight ``2**(L-a)``) and ``j_c`` contribute
    ``exp(2 pi i 2**(L-a-c))``, trivial unless ``a + c > L`` where it is
    ``R_{a+c-L}``.  With ``k_value`` given, the k digits are classical and
    only gates for set digits are emitted (the register is not touched).
    """
    L = len(j_qubits)
    if k_value is None and len(k_qubits) != L:
        raise ValueError("k and j registers must have equal width")
    ops = []
    for a in range(1, L + 1):
        for c in range(1, L + 1):
            if a + c <= L:
                continue
            controls = [] if anc is None else [(anc, 1)]
            if k_value is None:
                controls.append((k_qubits[a - 1], 1))
            elif not (k_value >> (L - a)) & 1:
                continue
            ops.append(gates.r(a + c - L, j_qubits[c - 1], tuple(controls)))
    return ops


def controlled_phase_network(L: int) -> CircuitProgram:
    layout = RegisterLayout.sequential([("k", L), ("j", L), ("ancilla", 1)])
    ops = phase_network_ops(layout.qubits("k"), layout.qubits("j"), layout.qubits("ancilla")[0])
    return program(ops, layout, "phase-network")


# --- phi+- preparation and swap test ---------------------------------------------

def phi_pm_ops(j_qubits: Sequence[int], b: int, sign: int) -> list:
    ops = [gates.h(q) for q in j_qubits] + [gates.h(b)]
    if sign < 0:
        ops.append(gates.z(b))
    return ops


def prepare_phi_pm(L: int, sign: int) -> CircuitProgram:
    layout = RegisterLayout.sequential([("j", L), ("ancilla", 1)])
    return program(phi_pm_ops(layout.qubits("j"), layout.qubits("ancilla")[0], sign), layout,
                   "phi+" if sign > 0 else "phi-")


def swap_test_ops(anc: int, reg_a: Sequence[int], reg_b: Sequence[int]) -> list:
    if len(reg_a) != len(reg_b):
        raise ValueError("swap test registers must have equal width")
    ops = [gates.h(anc)]
    ops += [gates.swap(a, b, ((anc, 1),)) for a, b in zip(reg_a, reg_b)]
    ops.append(gates.h(anc))
    return ops


def swap_test(layout: RegisterLayout, anc: str, reg_a: str, reg_b: str) -> CircuitProgram:
    return program(swap_test_ops(layout.qubits(anc)[0], layout.qubits(reg_a),
                                 layout.qubits(reg_b)), layout, "swap-test")


# --- reflections and the Grover operator -----------------------------------------

def reflect_zero_ops(qubits: Sequence[int], controls=()) -> list:
    """``I - 2|0><0|`` on ``qubits``."""
    qs = list(qubits)
    # zero-polarity controls stand in for X-conjugation on all but the target
    cz = gates.z(qs[-1], tuple((q, 0) for q in qs[:-1]) + tuple(controls))
    return [gates.x(qs[-1]), cz, gates.x(qs[-1])]


def flag_reflection_ops(flag: int, good_value: int = 0) -> list:
    """``I - 2 P_good`` where good states have the flag qubit equal to ``good_value``."""
    if good_value == 0:
        return [gates.x(flag), gates.z(flag), gates.x(flag)]
    return [gates.z(flag)]


@dataclass(frozen=True)
class GroverOperator:
    """``Q = -A S0 A^dagger S_chi`` for a preparation ``A`` on the work registers."""

    preparation: CircuitProgram
    flagged_register: str
    work_registers: tuple[str, ...]
    good_value: int = 0

    @property
    def layout(self) -> RegisterLayout:
        return self.preparation.layout

    def work_qubits(self) -> list[int]:
        return [q for r in self.work_registers for q in self.layout.qubits(r)]

    def program(self) -> CircuitProgram:
        flag = self.layout.qubits(self.flagged_register)[0]
        work = self.work_qubits()
        ops = flag_reflection_ops(flag, self.good_value)
        ops += list(self.preparation.inverse().ops)
        ops += reflect_zero_ops(work)
        ops += list(self.preparation.ops)
        ops.append(GateOp(NEG_I, (work[0],), (), "-I"))
        return program(ops, self.layout, "Q")


def grover_q(prep: CircuitProgram, flagged_register: str = "swap",
             work_registers: Sequence[str] | None = None, good_value: int = 0) -> GroverOperator:
    layout = prep.layout
    if flagged_register not in layout:
        raise ValueError(f"preparation layout lacks register {flagged_register!r}")
    if work_registers is None:
        work_registers = tuple(layout.names())
    for r in work_registers:
        if r not in layout:
            raise ValueError(f"preparation layout lacks register {r!r}")
    return GroverOperator(prep, flagged_register, tuple(work_registers), good_value)


def restricted_rotation(q: GroverOperator, target: StateVector | None = None,
                        leak_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrix of Q on ``span{psi0, psi1}`` of the prepared state.

    Returns ``(R, psi0, psi1)`` where ``psi0``/``psi1`` are the normalized
    good/bad components of ``A|0>``.  Raises if Q leaks out of the plane.
    """
    layout = q.layout
    n = layout.num_qubits
    if target is None:
        target = q.preparation.execute(StateVector.zero(n))
    psi = target.amplitudes
    flag = layout.qubits(q.flagged_register)[0]
    bit = (np.arange(2**n) >> (n - 1 - flag)) & 1
    good = np.where(bit == q.good_value, psi, 0)
    bad = psi - good
    basis = []
    for v in (good, bad):
        nv = np.linalg.norm(v)
        basis.append(v / nv if nv > 1e-12 else None)
    qprog = q.program()
    R = np.zeros((2, 2), dtype=complex)
    for col, v in enumerate(basis):
        if v is None:
            R[col, col] = 1.0
            continue
        w = qprog.run_array(np.array(v))
        for row, u in enumerate(basis):
            if u is not None:
                R[row, col] = np.vdot(u, w)
        leak = np.linalg.norm(w - sum(R[r, col] * basis[r] for r in range(2) if basis[r] is not None))
        if leak > leak_tol:
            raise RuntimeError(f"Grover operator leaks out of its rotation plane ({leak:.2e})")
    zero = np.zeros(2**n, dtype=complex)
    return R, basis[0] if basis[0] is not None else zero, basis[1] if basis[1] is not None else zero


# --- amplitude estimation ------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeEstimate:
    p_est: int
    raw: FixedPointCode
    probability: float = 1.0

    @property
    def theta(self) -> float:
        return math.pi * self.raw.value

    @property
    def folded(self) -> float:
        """Branch-independent estimate ``min(raw, 1 - raw)`` of ``theta/pi``."""
        m = self.raw.code
        return min(m, 2**self.p_est - m) / 2**self.p_est

    @property
    def sin_squared(self) -> float:
        return math.sin(math.pi * self.raw.value) ** 2

    @classmethod
    def from_outcome(cls, m: int, p_est: int, probability: float = 1.0) -> AmplitudeEstimate:
        return cls(p_est, FixedPointCode(FixedPointFormat.plain(p_est), m), probability)


def estimation_ladder_ops(est_qubits: Sequence[int], q_ops: Sequence, repeat: bool = True) -> list:
    """Hadamards, then est qubit ``i`` (MSB first) controls ``Q**(2**(p-1-i))``."""
    p = len(est_qubits)
    ops = [gates.h(e) for e in est_qubits]
    for i, e in enumerate(est_qubits):
        power = 2 ** (p - 1 - i)
        ctrl = [op.controlled(e, 1) for op in q_ops]
        ops += ctrl * power
    ops += qft_ops(est_qubits, inverse=True)
    return ops


def amplitude_estimation(q: GroverOperator, p_est: int,
                         target: StateVector | None = None) -> tuple[StateVector, RegisterLayout]:
    """Gate-level amplitude estimation: returns the joint state over ``est`` + work registers."""
    if p_est < 1:
        raise ValueError("p_est must be at least 1")
    inner = q.layout
    layout = RegisterLayout.sequential([("est", p_est)] + [(r[0], r[2]) for r in inner.registers])
    qmap = list(range(p_est, p_est + inner.num_qubits))
    q_ops = [op.remap(qmap) for op in q.program().ops]
    prep = q.preparation.remap(qmap, layout)
    if target is None:
        psi0 = prep.execute(StateVector.zero(layout.num_qubits))
    else:
        psi0 = StateVector(layout.num_qubits, np.kron(np.eye(2**p_est)[0], target.amplitudes))
    prog = program(estimation_ladder_ops(layout.qubits("est"), q_ops), layout, "AE")
    return prog.execute(psi0), layout


def register_marginal(state: StateVector, layout: RegisterLayout, name: str) -> np.ndarray:
    n = layout.num_qubits
    qs = layout.qubits(name)
    tensor = state.probabilities().reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in qs)
    marg = tensor.sum(axis=others) if others else tensor
    return marg.reshape(-1)


def estimate_distribution(R: np.ndarray, v0: np.ndarray, p_est: int) -> np.ndarray:
    """Joint amplitudes over (estimation outcome, plane coordinate).

    Applies the controlled-``R**(2**r)`` ladder to ``uniform (x) v0`` in the
    two-dimensional rotation plane, then the inverse QFT (an FFT).
    Returns an array of shape ``(2**p_est, 2)``.
    """
    dim = 2**p_est
    amp = np.tile(np.asarray(v0, dtype=complex), (dim, 1)) / math.sqrt(dim)
    m = np.arange(dim)
    power = R.copy()
    for i in range(p_est - 1, -1, -1):
        on = ((m >> (p_est - 1 - i)) & 1).astype(bool)
        amp[on] = amp[on] @ power.T
        power = power @ power
    return np.fft.fft(amp, axis=0) / math.sqrt(dim)
