"""Fourier transform with outputs encoded in the computational basis.

Produces ``N**-0.5 sum_k |k>|y_k>`` where ``y_k`` is the ``k``-th discrete
Fourier coefficient of a real-spectrum input, written as a complemental
fixed-point code with ``p0`` fraction digits.

Pipeline per branch ``s`` in ``{+, -}`` and index ``k``:

* prepare ``|phi_k>`` (oracle on one half of an ancilla-split register plus
  a ``k``-controlled phase network) and ``|phi^s>``, then swap-test them; the
  swap qubit reads 0 with probability ``sin^2 theta = (1 + P_s) / 2`` where
  ``P_s = |<phi^s|phi_k>|**2``;
* amplitude-estimate ``theta / pi`` into a ``p_est``-qubit register;
* compute ``P_s = 2 sin^2(pi theta/pi) - 1`` from the estimate; the
  difference ``P_+ - P_-`` equals ``y_k``;
* subtract, round to ``p0`` digits, and uncompute every ancilla.

Two engines run the same circuit.  ``full`` simulates the monolithic dense
state (only tiny sizes fit).  ``block_diagonal`` exploits that every
operation after the initial Hadamards on ``k`` is diagonal in ``k``: each
block is simulated on its own registers and, inside amplitude estimation,
the Grover operator is reduced to its exact 2x2 action on the rotation
plane.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import gates
from .arithmetic import (SineGateConfig, fourier_adder_tally, mul_add_tally, trig_emulate,
                         trig_tally)
from .circuits import (AmplitudeEstimate, GroverOperator, estimate_distribution, phase_network_ops,
                       phi_pm_ops, qft_ops, qft_tally, reflect_zero_ops, flag_reflection_ops,
                       restricted_rotation, swap_test_ops, NEG_I)
from .errors import BudgetError, DomainError
from .fixedpoint import FixedPointFormat
from .oracle import InputVector, oracle_block
from .program import BasisFunctionOp, Block, CircuitProgram, program
from .reference import dft_reference
from .statevector import GateOp, GateTally, RegisterLayout, StateVector, gate_cost

DEFAULT_MAX_QUBITS = 24
IMAG_TOL = 1e-9


def max_qubits_budget() -> int:
    return int(os.environ.get("QFTC_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def default_p_est(p0: int, delta: float) -> int:
    """Estimation width: ``p0`` digits, a margin for the slope of the
    ``theta -> y`` map, and the usual success-probability padding."""
    return p0 + 5 + math.ceil(math.log2(2 + 1 / (2 * delta)))


@dataclass(frozen=True)
class QftcConfig:
    L: int
    p0: int
    delta: float = 0.1
    p_est: int | None = None
    mode: str = "block_diagonal"
    max_qubits: int | None = None

    def __post_init__(self):
        if self.L < 1:
            raise DomainError("L must be at least 1")
        if self.p0 < 1:
            raise DomainError("p0 must be at least 1")
        if not 0 < self.delta < 1:
            raise DomainError("delta must lie in (0, 1)")
        if self.mode not in ("full", "block_diagonal"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.p_est is None:
            object.__setattr__(self, "p_est", default_p_est(self.p0, self.delta))
        if self.p_est < self.p0 + 2:
            raise DomainError("p_est must be at least p0 + 2")

    @property
    def N(self) -> int:
        return 2**self.L

    @property
    def epsilon(self) -> float:
        return 2.0**-self.p0

    @property
    def sine_digits(self) -> int:
        """Digits of the folded estimate fed to the sine gate."""
        return min(self.p_est, self.p0 + 8)

    @property
    def overlap_digits(self) -> int:
        """Fraction digits kept for each estimated overlap."""
        return self.p0 + 4

    @property
    def y_format(self) -> FixedPointFormat:
        return FixedPointFormat.signed(self.p0)

    def full_mode_qubits(self) -> int:
        return self.L + 2 * (2 * self.L + 3 + self.p_est) + self.p0 + 1

    def as_dict(self) -> dict:
        return {"L": self.L, "N": self.N, "p0": self.p0, "epsilon": self.epsilon,
                "delta": self.delta, "p_est": self.p_est, "mode": self.mode,
                "sine_digits": self.sine_digits, "overlap_digits": self.overlap_digits}


# --- classical post-processing of the estimation registers ------------------------

@lru_cache(maxsize=None)
def overlap_table(p_est: int, n_s: int, p_w: int) -> np.ndarray:
    """``2 sin^2(pi a) - 1`` for every estimation outcome, as scaled integers.

    The outcome ``M`` is folded to ``min(M, 2**p_est - M)`` (both eigen-
    branches decode alike), its top ``n_s`` digits go through the sine
    gate, the sine code is squared exactly, and ``2 s^2 - 1`` is obtained
    by flipping the leading digit of the square.  The result keeps
    ``p_w`` fraction digits (truncated).
    """
    cfg = SineGateConfig.for_digits(n_s)
    sines = np.array([trig_emulate(v, cfg) for v in range(2**n_s)], dtype=np.int64)
    m = np.arange(2**p_est, dtype=np.int64)
    folded = np.minimum(m, 2**p_est - m)  # in [0, 2**(p_est-1)]
    top = np.minimum(folded >> (p_est - n_s), 2**n_s - 1)
    s = sines[top]
    sq = s * s  # 2 n_s fraction digits
    alpha = sq * 2 - (1 << (2 * n_s))  # 2 s^2 - 1 with 2 n_s fraction digits
    return alpha >> (2 * n_s - p_w)


def round_difference(diff: np.ndarray, from_frac: int, to_frac: int) -> np.ndarray:
    """Nearest integer at ``to_frac`` digits, ties toward minus infinity."""
    s = from_frac - to_frac
    if s <= 0:
        return diff << -s
    return (diff + (1 << (s - 1)) - 1) >> s


def y_code(m_plus, m_minus, config: QftcConfig):
    """Output-register code written for estimation outcomes ``(M+, M-)``."""
    tab = overlap_table(config.p_est, config.sine_digits, config.overlap_digits)
    d = tab[np.asarray(m_plus)] - tab[np.asarray(m_minus)]
    y = round_difference(d, config.overlap_digits, config.p0)
    return y % (1 << (config.p0 + 1))


# --- circuit construction ------------------------------------------------------

WORK_REGS = ("swap", "j", "b", "j2", "b2")


def work_layout(L: int, prefix: str = "") -> list[tuple[str, int]]:
    return [(prefix + "swap", 1), (prefix + "j", L), (prefix + "b", 1), (prefix + "j2", L),
            (prefix + "b2", 1)]


def preparation_ops(x: InputVector, sign: int, layout: RegisterLayout, prefix: str = "",
                    k_qubits=None, k_value: int | None = None) -> list:
    """Steps 2-5 on one branch: ``|0> -> |psi_k^sign>``.

    Either ``k_qubits`` (quantum control) or ``k_value`` (classical block)
    selects the phase-network controls.
    """
    sw = layout.qubits(prefix + "swap")[0]
    j = layout.qubits(prefix + "j")
    b = layout.qubits(prefix + "b")[0]
    j2 = layout.qubits(prefix + "j2")
    b2 = layout.qubits(prefix + "b2")[0]
    ops = [gates.h(b), oracle_block(x, j, (b, 1))]
    ops += [gates.h(q, ((b, 0),)) for q in j]
    ops += phase_network_ops(k_qubits if k_qubits is not None else [], j, b, k_value)
    ops += phi_pm_ops(j2, b2, sign)
    ops += swap_test_ops(sw, j + [b], j2 + [b2])
    return ops


def grover_ops(prep: list, layout: RegisterLayout, prefix: str = "") -> list:
    """``Q = -A S0 A^dagger S_chi`` with good states flagged by swap qubit 0."""
    flag = layout.qubits(prefix + "swap")[0]
    work = [q for r in WORK_REGS for q in layout.qubits(prefix + r)]
    ops = flag_reflection_ops(flag, 0)
    ops += [op.inverse() for op in reversed(prep)]
    ops += reflect_zero_ops(work)
    ops += list(prep)
    ops.append(GateOp(NEG_I, (work[0],), (), "-I"))
    return ops


def build_preparation(config: QftcConfig, x: InputVector, sign: int,
                      include_k_superposition: bool = True) -> CircuitProgram:
    """Global form of the preparation: registers ``k`` plus one branch's work registers."""
    if x.L != config.L:
        raise DomainError("input dimension does not match config.L")
    layout = RegisterLayout.sequential([("k", config.L)] + work_layout(config.L))
    ops = [gates.h(q) for q in layout.qubits("k")] if include_k_superposition else []
    ops += preparation_ops(x, sign, layout, k_qubits=layout.qubits("k"))
    return program(ops, layout, "A+" if sign > 0 else "A-")


def block_preparation(x: InputVector, sign: int, k: int) -> CircuitProgram:
    """Preparation for one classical ``k`` on the work registers only."""
    layout = RegisterLayout.sequential(work_layout(x.L))
    return program(preparation_ops(x, sign, layout, k_value=k), layout, f"A{'+' if sign > 0 else '-'}_{k}")


def block_grover(x: InputVector, sign: int, k: int) -> GroverOperator:
    prep = block_preparation(x, sign, k)
    return GroverOperator(prep, "swap", WORK_REGS, 0)


# --- resource tallies ------------------------------------------------------------

def _tally_of(ops) -> GateTally:
    t = GateTally()
    for op in ops:
        t.add(op.tally)
    return t


def _controlled_tally(ops) -> GateTally:
    t = GateTally()
    for op in ops:
        if isinstance(op, Block) and op.kind:
            t.add(op.tally)
        elif isinstance(op, Block):
            t.add(_controlled_tally(op.ops))
        else:
            t.add(GateTally(gate_cost(len(op.qubits) + 1), 0, 0))
    return t


def arithmetic_tally(config: QftcConfig) -> GateTally:
    """Gate-level cost of the output arithmetic and of uncomputing its scratch.

    Per branch: fold the estimate (controlled negation), copy the top digits,
    sine gate, squaring multiply-adder, constant flip; then the rounded
    subtraction into the output.  Scratch registers are uncomputed, which
    doubles everything except the subtraction.
    """
    p, n_s, p_w = config.p_est, config.sine_digits, config.overlap_digits
    fold = GateTally(2 * p * gate_cost(2), 0, 0) + qft_tally(p, controls=1) * 2
    copy = GateTally(n_s * gate_cost(2) + 1, 0, 0)
    box = fold + copy + trig_tally(SineGateConfig.for_digits(n_s)) + mul_add_tally(
        n_s, n_s, 2 * n_s + 1, square=True)
    sub = (qft_tally(p_w + 2) * 2 + fourier_adder_tally(p_w + 1, p_w + 2, 0)) * 2
    return box * 4 + sub


def branch_tally(config: QftcConfig, sign: int = 1,
                 x: InputVector | None = None) -> tuple[GateTally, GateTally]:
    """(preparation tally, controlled-Grover tally) for one branch of the global circuit."""
    if x is None:
        x = InputVector(np.eye(config.N)[0])
    layout = RegisterLayout.sequential([("k", config.L)] + work_layout(config.L))
    prep = preparation_ops(x, sign, layout, k_qubits=layout.qubits("k"))
    q = grover_ops(prep, layout)
    return _tally_of(prep), _controlled_tally(q)


def qftc_tally(config: QftcConfig) -> GateTally:
    """Resource count of the whole global circuit, from its construction rules.

    No state is simulated, so large ``L`` is cheap.
    """
    p = config.p_est
    total = GateTally(config.L * gate_cost(1), 0, 0) + arithmetic_tally(config)
    for sign in (1, -1):
        prep, cq = branch_tally(config, sign)
        forward = prep + GateTally(p * gate_cost(1), 0, 0) + cq * (2**p - 1) + qft_tally(p)
        total = total + forward + forward.inverse()
    return total


# --- results -------------------------------------------------------------------

@dataclass
class KResult:
    k: int
    y_exact: float
    y_hat: float
    prob_mass: float  # conditional probability of the dominant code given k
    distribution: np.ndarray  # conditional distribution over y codes
    estimates: dict = field(default_factory=dict)  # sign -> dominant AmplitudeEstimate

    @property
    def abs_error(self) -> float:
        return abs(self.y_hat - self.y_exact)


@dataclass
class QftcResult:
    config: QftcConfig
    per_k: list[KResult]
    fidelity: float
    tally: GateTally
    ancilla_clean_population: float = float("nan")

    def joint_distribution(self) -> np.ndarray:
        """``P(k, code)`` from measuring the output registers; sums to 1."""
        return np.array([r.distribution for r in self.per_k]) / len(self.per_k)

    @property
    def max_abs_error(self) -> float:
        return max(r.abs_error for r in self.per_k)

    def accurate(self) -> bool:
        return all(r.abs_error <= self.config.epsilon + 1e-12 for r in self.per_k)

    def passed(self) -> bool:
        return self.accurate() and self.fidelity >= 1 - self.config.delta

    def rows(self) -> list[dict]:
        return [{"k": r.k, "y_exact": r.y_exact, "y_hat": r.y_hat, "abs_error": r.abs_error,
                 "prob_mass": r.prob_mass} for r in self.per_k]


def admissible_codes(y: float, config: QftcConfig) -> np.ndarray:
    fmt = config.y_format
    vals = np.array([fmt.decode(c) for c in range(2 ** fmt.width)])
    return np.abs(vals - y) <= config.epsilon + 1e-12


def admissible_fidelity(cond: np.ndarray, y_exact, config: QftcConfig) -> float:
    """``(1/N) sum_k sqrt(P(y-code within eps of y_k | k))``.

    This is the largest overlap between the produced state and any ideal
    state ``N**-0.5 sum_k |k>|y~_k>|junk_k>`` with ``y~_k`` an admissible
    code; it is exact for a computational-basis output whatever the
    ancillas hold.
    """
    n = len(cond)
    total = 0.0
    for k in range(n):
        total += math.sqrt(max(0.0, float(cond[k][admissible_codes(y_exact[k], config)].sum())))
    return total / n


def exact_outputs(x: InputVector, config: QftcConfig) -> np.ndarray:
    """Brute-force transform; rejects inputs the output format cannot hold."""
    y = dft_reference(x.components)
    if np.max(np.abs(y.imag)) > IMAG_TOL:
        raise DomainError("transform is not real; apply real_reduction first")
    y = y.real
    limit = 1 - 2.0 ** (-config.p0 - 1)
    for k, v in enumerate(y):
        if abs(v) >= limit:
            raise DomainError(f"unrepresentable y_{k} = {v:.6g} (|y| must be below {limit})")
    return y


def decode_results(final: StateVector, config: QftcConfig, y_exact=None) -> QftcResult:
    """Read a state over the ``(k, y)`` registers.

    Conditional distributions come from the normalized state; ``y_hat`` is
    the most probable code per ``k``.  Without ``y_exact`` the dominant
    codes themselves serve as the reference.
    """
    w = config.p0 + 1
    if final.num_qubits != config.L + w:
        raise ValueError("state does not match the (k, y) register layout")
    probs = final.probabilities()
    probs = probs / probs.sum()
    table = probs.reshape(config.N, 2**w)
    cond = table / np.maximum(table.sum(axis=1, keepdims=True), 1e-300)
    fmt = config.y_format
    rows = []
    for k in range(config.N):
        code = int(np.argmax(cond[k]))
        ye = fmt.decode(code) if y_exact is None else float(y_exact[k])
        rows.append(KResult(k, ye, fmt.decode(code), float(cond[k, code]), cond[k]))
    ys = [r.y_exact for r in rows]
    # joint probabilities fold the k-weights back in
    n = config.N
    fid = sum(math.sqrt(float(table[k][admissible_codes(ys[k], config)].sum())) for k in range(n)) / math.sqrt(n)
    return QftcResult(config, rows, fid, qftc_tally(config))


# --- block-diagonal engine -----------------------------------------------------------

def branch_estimate(x: InputVector, sign: int, k: int, p_est: int) -> np.ndarray:
    """Distribution of the estimation register for one ``(k, sign)`` block."""
    q = block_grover(x, sign, k)
    psi = q.preparation.execute(StateVector.zero(q.layout.num_qubits))
    R, good, bad = restricted_rotation(q, psi)
    v0 = np.array([np.vdot(good, psi.amplitudes), np.vdot(bad, psi.amplitudes)])
    amp = estimate_distribution(R, v0, p_est)
    return (np.abs(amp) ** 2).sum(axis=1)


def code_distribution(p_plus: np.ndarray, p_minus: np.ndarray, config: QftcConfig,
                      prune: float = 1e-22) -> np.ndarray:
    """Conditional distribution of the output code for one ``k``."""
    tab = overlap_table(config.p_est, config.sine_digits, config.overlap_digits)

    def compress(p):
        keep = p > prune
        vals, inv = np.unique(tab[keep], return_inverse=True)
        return vals, np.bincount(inv, weights=p[keep])

    va, wa = compress(p_plus)
    vb, wb = compress(p_minus)
    d = va[:, None] - vb[None, :]
    y = round_difference(d, config.overlap_digits, config.p0) % (1 << (config.p0 + 1))
    return np.bincount(y.ravel(), weights=np.outer(wa, wb).ravel(), minlength=2 ** (config.p0 + 1))


def block_distributions(x: InputVector, config: QftcConfig):
    """Yield ``(code distribution, {sign: estimate distribution})`` for each ``k``."""
    for k in range(config.N):
        dists = {s: branch_estimate(x, s, k, config.p_est) for s in (1, -1)}
        yield code_distribution(dists[1], dists[-1], config), dists


def run_block_diagonal(x: InputVector, config: QftcConfig) -> tuple[StateVector, QftcResult]:
    """Simulate each ``k`` block separately and assemble the ``(k, y)`` state.

    The returned state is the component with every ancilla back in ``|0>``
    (amplitude ``P_k(code) / sqrt(N)``), which is what remains of the output
    after the uncompute step; it is not renormalized.
    """
    if x.L != config.L:
        raise DomainError("input dimension does not match config.L")
    y = exact_outputs(x, config)
    n, w = config.N, config.p0 + 1
    amps = np.zeros(n * 2**w)
    rows, conds = [], []
    for k, (cond, dists) in enumerate(block_distributions(x, config)):
        conds.append(cond)
        amps[k * 2**w:(k + 1) * 2**w] = cond / math.sqrt(n)
        code = int(np.argmax(cond))
        est = {s: AmplitudeEstimate.from_outcome(int(np.argmax(d)), config.p_est, float(d.max()))
               for s, d in dists.items()}
        rows.append(KResult(k, float(y[k]), config.y_format.decode(code), float(cond[code]), cond, est))
    fid = admissible_fidelity(conds, y, config)
    clean = float(sum((c**2).sum() for c in conds) / n)
    result = QftcResult(config, rows, fid, qftc_tally(config), clean)
    return StateVector(config.L + w, amps), result


# --- monolithic dense engine ---------------------------------------------------------

def full_layout(config: QftcConfig) -> RegisterLayout:
    regs = [("k", config.L)]
    for pre in ("p_", "m_"):
        regs += work_layout(config.L, pre) + [(pre + "e", config.p_est)]
    regs.append(("y", config.p0 + 1))
    return RegisterLayout.sequential(regs)


def _grover_matrix(x: InputVector, sign: int, config: QftcConfig) -> np.ndarray:
    """Dense matrix of the branch Grover operator on ``k`` plus work registers."""
    layout = RegisterLayout.sequential([("k", config.L)] + work_layout(config.L))
    prep = preparation_ops(x, sign, layout, k_qubits=layout.qubits("k"))
    return program(grover_ops(prep, layout), layout, "Q").unitary()


def build_full_program(x: InputVector, config: QftcConfig) -> CircuitProgram:
    """The monolithic circuit.

    Controlled powers of Q enter as dense matrices compiled from the
    gate-level Q program (repeated squaring of its exact unitary); their
    tally is the gate-level tally of the repeated controlled Q.
    """
    layout = full_layout(config)
    kq = layout.qubits("k")
    ops = [gates.h(q) for q in kq]
    per_branch = []
    for pre, sign in (("p_", 1), ("m_", -1)):
        prep = preparation_ops(x, sign, layout, pre, k_qubits=kq)
        qmat = _grover_matrix(x, sign, config)
        _, cq = branch_tally(config, sign)
        targets = tuple(kq + [q for r in WORK_REGS for q in layout.qubits(pre + r)])
        est = layout.qubits(pre + "e")
        ae = [gates.h(e) for e in est]
        power = qmat
        for i in range(config.p_est - 1, -1, -1):
            reps = 2 ** (config.p_est - 1 - i)
            ae.append(GateOp(power, targets, ((est[i], 1),), f"Q^{reps}",
                             tally_override=cq * reps, atol=1e-9))
            power = power @ power
        ae += qft_ops(est, inverse=True)
        branch = prep + ae
        per_branch.append(branch)
        ops += branch
    f = BasisFunctionOp((tuple(layout.qubits("p_e")), tuple(layout.qubits("m_e"))),
                        tuple(layout.qubits("y")), _y_add_table(config), "y+=f",
                        (), arithmetic_tally(config))
    ops.append(f)
    for branch in per_branch:
        ops += [op.inverse() for op in reversed(branch)]
    return program(ops, layout, "qftc-full")


def _y_add_table(config: QftcConfig) -> np.ndarray:
    size = 2**config.p_est
    mp, mm = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    f = y_code(mp, mm, config)
    w = 1 << (config.p0 + 1)
    return (np.arange(w)[None, None, :] + f[:, :, None]) % w


def run_full(x: InputVector, config: QftcConfig) -> tuple[StateVector, QftcResult]:
    y = exact_outputs(x, config)
    nq = config.full_mode_qubits()
    budget = config.max_qubits if config.max_qubits is not None else max_qubits_budget()
    if nq > budget:
        raise BudgetError(f"full mode needs {nq} qubits, budget is {budget}; "
                          "use mode=block_diagonal")
    prog = build_full_program(x, config)
    psi = np.zeros(2**nq, dtype=complex)
    psi[0] = 1.0
    psi = prog.run_array(psi)
    layout = prog.layout
    w = config.p0 + 1
    # component with all branch registers back in |0>
    k_shift = nq - config.L
    idx = (np.arange(config.N)[:, None] << k_shift) | np.arange(2**w)[None, :]
    restricted = psi[idx.ravel()]
    probs = (np.abs(psi) ** 2).reshape(config.N, -1)
    # conditional output distribution: marginalize over the branch registers
    y_vals = np.arange(2**nq).reshape(config.N, -1) & ((1 << w) - 1)
    conds = []
    for k in range(config.N):
        cond = np.bincount(y_vals[k], weights=probs[k], minlength=2**w) * config.N
        conds.append(cond)
    del psi, probs, y_vals
    rows = []
    for k, cond in enumerate(conds):
        code = int(np.argmax(cond))
        rows.append(KResult(k, float(y[k]), config.y_format.decode(code), float(cond[code]), cond))
    fid = admissible_fidelity(conds, y, config)
    clean = float(np.sum(np.abs(restricted) ** 2))
    result = QftcResult(config, rows, fid, prog.tally, clean)
    return StateVector(config.L + w, restricted), result


def qftc_run(x: InputVector, config: QftcConfig) -> tuple[StateVector, QftcResult]:
    if config.mode == "full":
        return run_full(x, config)
    return run_block_diagonal(x, config)


# --- helper states ---------------------------------------------------------------

@dataclass(frozen=True)
class PhiState:
    kind: str  # "phi_k", "phi+" or "phi-"
    k: int | None
    vector: StateVector


def phi_k_state(x: InputVector, k: int) -> PhiState:
    """``|phi_k>`` on ``(j, b)`` from the oracle, the split Hadamards and the phase network."""
    layout = RegisterLayout.sequential([("j", x.L), ("b", 1)])
    j, b = layout.qubits("j"), layout.qubits("b")[0]
    ops = [gates.h(b), oracle_block(x, j, (b, 1))] + [gates.h(q, ((b, 0),)) for q in j]
    ops += phase_network_ops([], j, b, k)
    vec = program(ops, layout).execute(StateVector.zero(x.L + 1))
    return PhiState("phi_k", k, vec)


def phi_pm_state(L: int, sign: int) -> PhiState:
    layout = RegisterLayout.sequential([("j", L), ("b", 1)])
    vec = program(phi_pm_ops(layout.qubits("j"), layout.qubits("b")[0], sign), layout).execute(
        StateVector.zero(L + 1))
    return PhiState("phi+" if sign > 0 else "phi-", None, vec)
