"""Fixed-point quantum arithmetic.

Every operation comes in two execution fidelities: a gate-level circuit
(Fourier-basis adders built from controlled phase rotations) and a semantic
basis permutation with identical integer behaviour.  Registers hold
integers MSB first; fixed-point meaning is attached by the caller through
the fraction-digit counts.

Integer model of the Fourier adder: if register ``c`` (``w`` qubits) holds
``QFT|C>``, then qubit ``q`` carries the phase ``2 pi C / 2**(q+1)``.
Adding ``2**e`` to ``C`` therefore rotates qubit ``q`` by
``R_{q+1-e}`` whenever ``e <= q``; larger exponents vanish modulo
``2**w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gates
from .circuits import qft_ops, qft_tally
from .errors import DomainError
from .fixedpoint import FixedPointFormat
from .program import BasisFunctionOp, CircuitProgram, program
from .statevector import GateTally, RegisterLayout, gate_cost


# --- Fourier-basis adder -----------------------------------------------------

def fourier_adder_ops(b_qubits: Sequence[int], c_qubits: Sequence[int], sign: int, shift: int,
                      controls: Sequence[tuple[int, int]] = ()) -> list:
    """Add ``sign * B * 2**shift`` to the Fourier-encoded register ``c``."""
    if shift < 0:
        raise ValueError("negative shift would drop addend digits below the register resolution")
    nb, w = len(b_qubits), len(c_qubits)
    ops = []
    for t, bq in enumerate(b_qubits):
        e = nb - 1 - t + shift
        ctl = {bq: 1}
        ctl.update(dict(controls))
        for q in range(e, w):
            ops.append(gates.r(q + 1 - e, c_qubits[q], tuple(ctl.items()), sign=sign))
    return ops


def _adder_pairs(nb: int, w: int, shift: int) -> int:
    return sum(max(0, w - (nb - 1 - t + shift)) for t in range(nb))


def fourier_adder_tally(nb: int, w: int, shift: int, n_controls: int = 0) -> GateTally:
    return GateTally(_adder_pairs(nb, w, shift) * gate_cost(2 + n_controls), 0, 0)


def _plain_layout(*regs) -> RegisterLayout:
    return RegisterLayout.sequential(list(regs))


def _shift_for(n: int, p: int, l: int) -> int:
    shift = p - n - l
    if shift < 0:
        raise ValueError(f"b with {n} digits shifted by {l} does not fit {p} fraction digits")
    return shift


def _add_table(nb: int, w: int, sign: int, shift: int) -> np.ndarray:
    b = np.arange(2**nb)[:, None]
    c = np.arange(2**w)[None, :]
    return (c + sign * (b << shift)) % (1 << w)


def qft_adder(l: int, n: int, p: int, sign: int = 1) -> CircuitProgram:
    """Fourier-basis adder ``|b>|phi(c)> -> |b>|phi(c + sign 2**-l b)>``.

    ``b`` is plain with ``n`` fraction digits, ``c`` complemental with ``p``.
    """
    layout = _plain_layout(("b", n), ("c", p + 1))
    shift = _shift_for(n, p, l)
    ops = fourier_adder_ops(layout.qubits("b"), layout.qubits("c"), sign, shift)
    return program(ops, layout, "adder+" if sign > 0 else "adder-")


def quantum_adder(l: int, n: int, p: int, sign: int = 1, gate_level: bool = True) -> CircuitProgram:
    """``|b>|c> -> |b>|c + sign 2**-l b>`` (mod 2 on the complemental ring)."""
    layout = _plain_layout(("b", n), ("c", p + 1))
    shift = _shift_for(n, p, l)
    b, c = layout.qubits("b"), layout.qubits("c")
    tally = qft_tally(p + 1) * 2 + fourier_adder_tally(n, p + 1, shift)
    if gate_level:
        ops = qft_ops(c) + fourier_adder_ops(b, c, sign, shift) + qft_ops(c, inverse=True)
    else:
        ops = [BasisFunctionOp((tuple(b),), tuple(c), _add_table(n, p + 1, sign, shift),
                               "add", (), tally)]
    return program(ops, layout, "quantum-adder")


# --- multiply-adder ------------------------------------------------------------

def mul_add_ops(a_qubits: Sequence[int], b_qubits: Sequence[int], c_qubits: Sequence[int],
                sign: int, extra_shift: int = 0, controls=()) -> list:
    """Fourier-basis part: add ``sign * A * B * 2**extra_shift`` to Fourier-encoded ``c``.

    Each digit of ``a`` controls one shifted Fourier adder of ``b``.  When
    ``a`` and ``b`` share a qubit (squaring) the duplicate control merges.
    """
    m = len(a_qubits)
    ops = []
    for t, aq in enumerate(a_qubits):
        shift = m - 1 - t + extra_shift
        for op in fourier_adder_ops(b_qubits, c_qubits, sign, shift, ((aq, 1),) + tuple(controls)):
            ops.append(op)
    return ops


def mul_add_tally(m: int, n: int, w: int, extra_shift: int = 0, square: bool = False) -> GateTally:
    """Tally of ``QFT, mul_add_ops, QFT^dagger`` on a ``w``-qubit accumulator.

    With ``square`` the a- and b-registers are the same qubits; gates whose
    two controls coincide then have one control fewer.
    """
    total = 0
    for t in range(m):
        total += _adder_pairs(n, w, m - 1 - t + extra_shift) * gate_cost(3)
    if square:
        for t in range(m):
            shared = max(0, w - (2 * (m - 1 - t) + extra_shift))
            total -= shared * (gate_cost(3) - gate_cost(2))
    return GateTally(total, 0, 0) + qft_tally(w) * 2


def _mul_table(m: int, n: int, w: int, sign: int, extra: int) -> np.ndarray:
    a = np.arange(2**m)[:, None, None]
    b = np.arange(2**n)[None, :, None]
    c = np.arange(2**w)[None, None, :]
    return (c + sign * ((a * b) << extra)) % (1 << w)


def multiply_adder(m: int, n: int, sign: int = 1, gate_level: bool = True) -> CircuitProgram:
    """``|a>|b>|c> -> |a>|b>|c + sign a b>`` with ``c`` complemental of ``m+n+1`` digits."""
    if m < 1 or n < 1:
        raise ValueError("digit widths must be positive")
    layout = _plain_layout(("a", m), ("b", n), ("c", m + n + 1))
    a, b, c = layout.qubits("a"), layout.qubits("b"), layout.qubits("c")
    tally = mul_add_tally(m, n, m + n + 1)
    if gate_level:
        ops = qft_ops(c) + mul_add_ops(a, b, c, sign) + qft_ops(c, inverse=True)
    else:
        ops = [BasisFunctionOp((tuple(a), tuple(b)), tuple(c),
                               _mul_table(m, n, m + n + 1, sign, 0), "mul-add", (), tally)]
    return program(ops, layout, "multiply-adder")


# --- three-register subtractor -------------------------------------------------

def subtractor_sigma_minus(width: int, gate_level: bool = True) -> CircuitProgram:
    """``|alpha>|beta>|0> -> |alpha>|beta>|alpha - beta>`` with a complemental output.

    Realized as two chained quantum adders: ``+alpha`` then ``-beta``.
    """
    layout = _plain_layout(("alpha", width), ("beta", width), ("out", width + 1))
    al, be, out = layout.qubits("alpha"), layout.qubits("beta"), layout.qubits("out")
    tally = (qft_tally(width + 1) * 2 + fourier_adder_tally(width, width + 1, 0)) * 2
    if gate_level:
        ops = (qft_ops(out) + fourier_adder_ops(al, out, +1, 0) + qft_ops(out, inverse=True)
               + qft_ops(out) + fourier_adder_ops(be, out, -1, 0) + qft_ops(out, inverse=True))
    else:
        a = np.arange(2**width)[:, None, None]
        b = np.arange(2**width)[None, :, None]
        o = np.arange(2 ** (width + 1))[None, None, :]
        table = (o + a - b) % (1 << (width + 1))
        ops = [BasisFunctionOp((tuple(al), tuple(be)), tuple(out), table, "sigma-", (), tally)]
    return program(ops, layout, "sigma-")


# --- sine and cosine gates -------------------------------------------------------

CONST_INT_DIGITS = 3
ACC_INT_DIGITS = 4


@dataclass(frozen=True)
class SineGateConfig:
    """Taylor-series gate parameters: ``t_terms + 1`` terms, working precision ``p_prime``."""

    n: int
    t_terms: int
    p_prime: int
    kind: str = "sin"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind not in ("sin", "cos"):
            raise ValueError("kind must be 'sin' or 'cos'")
        if self.t_terms < 1 or self.p_prime < self.n + 1:
            raise ValueError("t_terms must be >= 1 and p_prime > n")
        # every Taylor coefficient must fit the constant register
        if max(abs(c) for c in self.coefficients()) >= 2**CONST_INT_DIGITS:
            raise ValueError("coefficient overflow")

    @classmethod
    def for_digits(cls, n: int, kind: str = "sin") -> SineGateConfig:
        t = n
        return cls(n, t, n + math.ceil(math.log2(n)) + 2 * t, kind)

    def coefficients(self) -> list[float]:
        """Unsigned Taylor coefficients of ``sin(pi x)`` or ``cos(pi x)``."""
        off = 1 if self.kind == "sin" else 0
        return [math.pi ** (2 * j + off) / math.factorial(2 * j + off) for j in range(self.t_terms + 1)]

    @property
    def out_width(self) -> int:
        return self.n if self.kind == "sin" else self.n + 1

    @property
    def out_format(self) -> FixedPointFormat:
        return FixedPointFormat.plain(self.n) if self.kind == "sin" else FixedPointFormat.signed(self.n)

    def constant_ints(self) -> list[int]:
        return [round(c * 2**self.p_prime) for c in self.coefficients()]

    def power_plan(self) -> list[tuple[str, int]]:
        """(register, fraction digits of operand) for each Taylor power, lowest first.

        Register ``"x"`` is the input, ``"sq"`` the square, ``"pw<j>"`` the
        product registers; ``None`` marks the constant term of the cosine.
        """
        n, pp = self.n, self.p_prime
        sq_frac = min(2 * n, pp)
        plan = []
        if self.kind == "sin":
            plan.append(("x", n))
            prev = n
            first = 1
        else:
            plan.append((None, 0))
            plan.append(("sq", sq_frac))
            prev = sq_frac
            first = 2
        for j in range(first, self.t_terms + 1):
            full = prev + sq_frac
            plan.append((f"pw{j}", min(full, pp)))
            prev = min(full, pp)
        return plan

    def register_widths(self) -> list[tuple[str, int]]:
        n, pp = self.n, self.p_prime
        sq_frac = min(2 * n, pp)
        regs = [("x", n), ("out", self.out_width), ("sq", 1 + 2 * n)]
        prev = n if self.kind == "sin" else sq_frac
        for name, frac in self.power_plan():
            if name and name.startswith("pw"):
                regs.append((name, 1 + prev + sq_frac))
                prev = frac
        regs += [("konst", CONST_INT_DIGITS + pp), ("acc", ACC_INT_DIGITS + 2 * pp),
                 ("or_flag", 1), ("sat_flag", 1)]
        return regs

    def ancilla_widths(self) -> dict[str, int]:
        return {name: w for name, w in self.register_widths() if name not in ("x", "out")}


def _operand(layout: RegisterLayout, name: str, frac: int) -> list[int]:
    qs = layout.qubits(name)
    if name == "x":
        return qs
    return qs[1:1 + frac]  # skip the sign digit, keep the top ``frac`` fraction digits


def _load_const(layout: RegisterLayout, value: int) -> list:
    qs = layout.qubits("konst")
    w = len(qs)
    return [gates.x(q) for i, q in enumerate(qs) if (value >> (w - 1 - i)) & 1]


def _acc_preload(config: SineGateConfig) -> int:
    pp2 = 2 * config.p_prime
    v = 1 << (pp2 - config.n - 1)  # half an output ulp, so truncation rounds
    if config.kind == "cos":
        v += 1 << pp2
    return v


def trig_gate(config: SineGateConfig, gate_level: bool = True) -> CircuitProgram:
    """``|x>|0>|0...> -> |x>|f(pi x)>|garbage>`` for ``f`` the sine or cosine.

    Gate-level form: square ``x``, build successive powers by multiply-adders
    (operands truncated to ``p_prime`` fraction digits by wiring), load each
    Taylor constant with X gates, accumulate ``+-K_j * power_j`` smallest
    power first, then round/saturate into the output register.
    """
    regs = config.register_widths()
    layout = RegisterLayout.sequential(regs)
    meta = {"config": config, "ancilla_widths": config.ancilla_widths(),
            "t_terms": config.t_terms, "p_prime": config.p_prime}
    if not gate_level:
        table = trig_table(config)
        x, out = layout.qubits("x"), layout.qubits("out")
        ow = config.out_width
        full = np.arange(2**ow)[None, :] ^ table[:, None]
        op = BasisFunctionOp((tuple(x),), tuple(out), full, config.kind, (), trig_tally(config))
        return CircuitProgram((op,), layout, f"{config.kind}-gate", meta)
    return CircuitProgram(tuple(_trig_ops(config, layout)), layout, f"{config.kind}-gate", meta)


def _trig_ops(config: SineGateConfig, layout: RegisterLayout) -> list:
    n, pp = config.n, config.p_prime
    sq_frac = min(2 * n, pp)
    ops = []
    x = layout.qubits("x")
    sq = layout.qubits("sq")
    ops += qft_ops(sq) + mul_add_ops(x, x, sq, +1) + qft_ops(sq, inverse=True)
    q_operand = _operand(layout, "sq", sq_frac)
    plan = config.power_plan()
    prev_name, prev_frac = plan[0] if config.kind == "sin" else plan[1]
    for name, frac in plan:
        if name is None or not name.startswith("pw"):
            continue
        c = layout.qubits(name)
        ops += qft_ops(c)
        ops += mul_add_ops(_operand(layout, prev_name, prev_frac), q_operand, c, +1)
        ops += qft_ops(c, inverse=True)
        prev_name, prev_frac = name, frac
    acc = layout.qubits("acc")
    pre = _acc_preload(config)
    ops += [gates.x(q) for i, q in enumerate(acc) if (pre >> (len(acc) - 1 - i)) & 1]
    konst = layout.qubits("konst")
    for j, ((name, frac), kval) in enumerate(zip(plan, config.constant_ints())):
        if name is None:
            continue  # constant term already preloaded
        sign = 1 if j % 2 == 0 else -1
        load = _load_const(layout, kval)
        ops += load + qft_ops(acc)
        ops += mul_add_ops(konst, _operand(layout, name, frac), acc, sign, pp - frac)
        ops += qft_ops(acc, inverse=True) + load
    ops += _output_ops(config, layout)
    return ops


def _output_ops(config: SineGateConfig, layout: RegisterLayout) -> list:
    acc = layout.qubits("acc")
    sign, ints = acc[0], acc[1:ACC_INT_DIGITS]
    frac = acc[ACC_INT_DIGITS:ACC_INT_DIGITS + config.n]
    orf, sat = layout.qubits("or_flag")[0], layout.qubits("sat_flag")[0]
    out = layout.qubits("out")
    ops = [gates.x(orf), gates.x(orf, tuple((q, 0) for q in ints)),
           gates.x(sat, ((orf, 1), (sign, 0)))]
    out_frac = out if config.kind == "sin" else out[1:]
    for o, f in zip(out_frac, frac):
        ops.append(gates.x(o, ((f, 1),)))
        ops.append(gates.x(o, ((f, 0), (sat, 1))))
    if config.kind == "cos":
        ops.append(gates.x(out[0], ((sign, 1),)))
    return ops


def trig_emulate(x_int: int, config: SineGateConfig) -> int:
    """Integer-exact mirror of the gate-level circuit; returns the output code."""
    n, pp = config.n, config.p_prime
    sq_frac = min(2 * n, pp)
    sq = x_int * x_int  # 2n fraction digits, exact
    q = sq >> (2 * n - sq_frac)
    powers = {"x": (x_int, n), "sq": (q, sq_frac)}
    plan = config.power_plan()
    prev = powers["x"] if config.kind == "sin" else powers["sq"]
    for name, frac in plan:
        if name is None or not name.startswith("pw"):
            continue
        full_val, full_frac = prev[0] * q, prev[1] + sq_frac
        powers[name] = (full_val >> (full_frac - frac), frac)
        prev = powers[name]
    acc_w = ACC_INT_DIGITS + 2 * pp
    acc = _acc_preload(config)
    bound = 1 << (acc_w - 1)
    for j, ((name, frac), kval) in enumerate(zip(plan, config.constant_ints())):
        if name is None:
            continue
        val, vfrac = powers[name]
        term = (kval * val) << (pp - vfrac)
        acc += term if j % 2 == 0 else -term
        if not -bound <= acc < bound:
            raise DomainError("accumulator overflow in the Taylor gate")
    code = acc % (1 << acc_w)
    sign = code >> (acc_w - 1)
    ints = (code >> (2 * pp)) & ((1 << (ACC_INT_DIGITS - 1)) - 1)
    frac_bits = (code >> (2 * pp - n)) & ((1 << n) - 1)
    sat = int(ints != 0 and sign == 0)
    out_frac = (1 << n) - 1 if sat else frac_bits
    if config.kind == "cos":
        return (sign << n) | out_frac
    return out_frac


def trig_table(config: SineGateConfig) -> np.ndarray:
    return np.array([trig_emulate(x, config) for x in range(2**config.n)], dtype=np.int64)


def sine_gate(config: SineGateConfig, gate_level: bool = True) -> CircuitProgram:
    if config.kind != "sin":
        raise ValueError("sine_gate needs a sine configuration")
    return trig_gate(config, gate_level)


def cosine_gate(config: SineGateConfig, gate_level: bool = True) -> CircuitProgram:
    if config.kind != "cos":
        raise ValueError("cosine_gate needs a cosine configuration")
    return trig_gate(config, gate_level)


def trig_tally(config: SineGateConfig) -> GateTally:
    """Analytic gate tally of the gate-level trig circuit."""
    n, pp = config.n, config.p_prime
    sq_frac = min(2 * n, pp)
    total = mul_add_tally(n, n, 1 + 2 * n, square=True)
    plan = config.power_plan()
    prev_frac = n if config.kind == "sin" else sq_frac
    # the cosine's first product is q * q, a squaring
    square = config.kind == "cos"
    for name, frac in plan:
        if name is None or not name.startswith("pw"):
            continue
        total = total + mul_add_tally(prev_frac, sq_frac, 1 + prev_frac + sq_frac, square=square)
        prev_frac, square = frac, False
    acc_w = ACC_INT_DIGITS + 2 * pp
    pre = _acc_preload(config)
    one = gate_cost(1)
    count = bin(pre).count("1") * one
    kw = CONST_INT_DIGITS + pp
    for (name, frac), kval in zip(plan, config.constant_ints()):
        if name is None:
            continue
        count += 2 * bin(kval).count("1") * one
        total = total + mul_add_tally(kw, frac, acc_w, pp - frac)
    # saturation logic and output copy
    count += one + gate_cost(1 + ACC_INT_DIGITS - 1) + gate_cost(3)
    count += n * (gate_cost(2) + gate_cost(3))
    if config.kind == "cos":
        count += gate_cost(2)
    return total + GateTally(count, 0, 0)


def exact_trig(x: float, kind: str) -> float:
    return math.sin(math.pi * x) if kind == "sin" else math.cos(math.pi * x)
