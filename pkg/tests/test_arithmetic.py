import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qftc.arithmetic import (SineGateConfig, cosine_gate, multiply_adder, mul_add_tally, qft_adder,
                             quantum_adder, sine_gate, subtractor_sigma_minus, trig_emulate,
                             trig_gate, trig_tally)
from qftc.circuits import qft_ops
from qftc.errors import DomainError, NotProductStateError
from qftc.fixedpoint import FixedPointCode, FixedPointFormat, encode_fixed
from qftc.product import run_product
from qftc.program import program
from qftc.reference import fixed_point_oracle
from qftc.scaling import loglog_slope
from qftc.statevector import StateVector
from qftc.verify import SWEEP_LIMIT, verify_arithmetic

from conftest import random_state

S3 = FixedPointFormat.signed(3)


# --- fixed-point codes ---------------------------------------------------------

def test_encode_examples():
    assert encode_fixed(0.75, FixedPointFormat.plain(2)).text() == ".11"
    code = encode_fixed(-0.25, S3)
    assert code.text() == "1.110" and code.code == 0b1110
    with pytest.raises(DomainError):
        encode_fixed(-1.0, S3)
    with pytest.raises(DomainError):
        encode_fixed(1.0, FixedPointFormat.plain(3))


def test_encode_rounding_overflow_rejected():
    # rounds up to +1, which has no code
    with pytest.raises(DomainError):
        encode_fixed(0.97, S3)


def test_ties_toward_minus_infinity():
    assert encode_fixed(0.0625, S3).value == 0.0
    assert encode_fixed(-0.0625, S3).value == -0.125


@settings(max_examples=200, deadline=None)
@given(x=st.floats(-0.9375, 0.9375, allow_nan=False), p=st.integers(1, 12))
def test_encode_decode_roundtrip(x, p):
    fmt = FixedPointFormat.signed(p)
    try:
        code = encode_fixed(x, fmt)
    except DomainError:
        assert x + 2.0 ** (-p - 1) > 1 - 2.0**-p
        return
    assert abs(code.value - x) <= 2.0**-p
    assert FixedPointCode.parse(code.text(), fmt) == code


def test_wide_format_decode():
    fmt = FixedPointFormat(3, 2, True)
    assert fmt.decode(0b11111) == -0.25
    assert fmt.decode(0b01111) == 3.75


# --- classical mirror ------------------------------------------------------------

def test_oracle_examples():
    p2 = FixedPointFormat.plain(2)
    s2 = FixedPointFormat.signed(2)
    add = fixed_point_oracle("add", (FixedPointCode(p2, 1), encode_fixed(0.5, s2)), s2)
    assert add.value == 0.75
    sub = fixed_point_oracle("sub", (encode_fixed(0.25, p2), encode_fixed(0.75, p2)), s2)
    assert sub.value == -0.5 and sub.text() == "1.10"
    s4 = FixedPointFormat.signed(4)
    ma = fixed_point_oracle("mul_add", (encode_fixed(0.75, p2), encode_fixed(0.75, p2),
                                        FixedPointCode(s4, 0)), s4)
    assert ma.value == 0.5625


# --- adders ------------------------------------------------------------------------

def _run(prog, **regs):
    return run_product(prog, regs)


def test_adder_examples():
    # b = 0.5 (plain, 1 digit), c = 0.75 -> 1.25 wraps to -0.75
    prog = quantum_adder(0, 1, 2, +1)
    out = _run(prog, b=1, c=encode_fixed(0.75, FixedPointFormat.signed(2)).code)
    assert FixedPointFormat.signed(2).decode(out["c"]) == -0.75
    out = _run(prog, b=0, c=3)
    assert out["c"] == 3


def test_qft_adder_on_fourier_register():
    """The bare Fourier adder acts on QFT-encoded c."""
    prog = qft_adder(0, 2, 3, +1)
    c = prog.layout.qubits("c")
    full = program(qft_ops(c) + list(prog.ops) + qft_ops(c, inverse=True), prog.layout)
    assert _run(full, b=0b11, c=0b0001)["c"] == (0b0001 + (0b11 << 1)) % 16


def test_adder_group_law():
    for b in range(8):
        for c in range(16):
            up = _run(quantum_adder(0, 3, 3, +1), b=b, c=c)["c"]
            assert _run(quantum_adder(0, 3, 3, -1), b=b, c=up)["c"] == c


def test_multiply_adder_examples():
    fmt = FixedPointFormat.signed(2)
    prog = multiply_adder(1, 1, +1)
    s2 = FixedPointFormat.signed(2)
    assert s2.decode(_run(prog, a=1, b=1, c=0)["c"]) == 0.25
    prog = multiply_adder(1, 1, -1)
    start = encode_fixed(0.75, fmt).code
    assert s2.decode(_run(prog, a=1, b=1, c=start)["c"]) == 0.5
    # 0.875 needs three digits: use m = n = 2 (c has 4 fraction digits)
    s4 = FixedPointFormat.signed(4)
    out = _run(multiply_adder(2, 2, -1), a=0b10, b=0b10, c=encode_fixed(0.875, s4).code)
    assert s4.decode(out["c"]) == 0.625


def test_sigma_minus_examples():
    prog = subtractor_sigma_minus(2)
    s2 = FixedPointFormat.signed(2)
    assert _run(prog, alpha=0b10, beta=0b10)["out"] == 0
    assert s2.decode(_run(prog, alpha=0b11, beta=0b01)["out"]) == 0.5
    out = _run(prog, alpha=0b01, beta=0b11)["out"]
    assert s2.decode(out) == -0.5 and format(out, "03b") == "110"


@pytest.mark.parametrize("op,m,n", [("add", 3, 3), ("mul_add", 2, 2), ("sub", 3, 3),
                                    ("add", 2, 1), ("mul_add", 1, 3)])
def test_exhaustive_sweep_zero_mismatches(op, m, n):
    rep = verify_arithmetic(op, m, n, "both")
    assert rep.ok, rep.mismatches[:5]


def test_sweep_budget_guard():
    from qftc.errors import BudgetError
    with pytest.raises(BudgetError):
        verify_arithmetic("add", 10, 10)
    assert SWEEP_LIMIT == 2**16


def _dense_pair(gate, sem, rng, n_random=20):
    """Compare gate-level and semantic unitaries on basis and random states."""
    n = gate.num_qubits
    ug, us = gate.unitary(), sem.unitary()
    assert np.allclose(ug, us, atol=1e-9)
    for _ in range(n_random):
        psi = StateVector(n, random_state(rng, n))
        assert np.allclose(gate.execute(psi).amplitudes, sem.execute(psi).amplitudes, atol=1e-9)
    assert np.allclose(gate.inverse().unitary() @ ug, np.eye(2**n), atol=1e-9)


@pytest.mark.parametrize("sign", [1, -1])
def test_gate_semantic_equivalence_dense(sign, rng):
    _dense_pair(quantum_adder(0, 3, 3, sign), quantum_adder(0, 3, 3, sign, False), rng)
    _dense_pair(multiply_adder(2, 2, sign), multiply_adder(2, 2, sign, False), rng, 5)


def test_sigma_dense_equivalence(rng):
    _dense_pair(subtractor_sigma_minus(3), subtractor_sigma_minus(3, False), rng, 5)


def test_superposition_linearity(rng):
    """Arithmetic on sum_i a_i |x_i>|0> equals sum_i a_i |x_i>|f(x_i)>."""
    prog = multiply_adder(2, 2, +1)
    n = prog.num_qubits
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    amps /= np.linalg.norm(amps)
    psi = np.zeros(2**n, complex)
    want = np.zeros(2**n, complex)
    for ab in range(16):
        a, b = ab >> 2, ab & 3
        psi[ab << 5] = amps[ab]
        want[(ab << 5) | ((a * b) % 32)] = amps[ab]
    out = prog.execute(StateVector(n, psi)).amplitudes
    assert np.allclose(out, want, atol=1e-9)


def test_tallies_match_construction():
    for m, n in [(1, 1), (2, 2), (2, 3), (3, 2)]:
        assert multiply_adder(m, n).tally == mul_add_tally(m, n, m + n + 1)
        assert multiply_adder(m, n, gate_level=False).tally == multiply_adder(m, n).tally
    assert quantum_adder(0, 3, 3).tally == quantum_adder(0, 3, 3, gate_level=False).tally


def test_multiply_adder_tally_trend():
    """At m = n the count grows like m n (m + n): log-log slope 3 once past small sizes."""
    sizes = [8, 12, 16, 24, 32]
    counts = [mul_add_tally(m, m, 2 * m + 1).one_two_qubit_count for m in sizes]
    assert abs(loglog_slope(sizes, counts) - 3) <= 0.3


# --- sine and cosine ---------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
@pytest.mark.parametrize("kind", ["sin", "cos"])
def test_trig_error_bound(n, kind):
    cfg = SineGateConfig.for_digits(n, kind)
    fmt = cfg.out_format
    f = math.sin if kind == "sin" else math.cos
    errs = [abs(fmt.decode(trig_emulate(x, cfg)) - f(math.pi * x / 2**n)) for x in range(2**n)]
    assert max(errs) <= 2.0**-n + 1e-15


def test_trig_examples():
    n = 4
    s = SineGateConfig.for_digits(n, "sin")
    c = SineGateConfig.for_digits(n, "cos")
    assert trig_emulate(0, s) == 0
    assert trig_emulate(8, s) == 2**n - 1  # saturated at 0.1111
    assert abs(s.out_format.decode(trig_emulate(4, s)) - math.sqrt(0.5)) <= 2**-n
    assert trig_emulate(0, c) == 2**n - 1
    assert trig_emulate(8, c) == 0
    third = round(2**n / 3)
    assert abs(c.out_format.decode(trig_emulate(third, c)) - math.cos(math.pi * third / 2**n)) <= 2**-n
    assert abs(math.cos(math.pi * third / 2**n) - 0.5) < 0.1


def test_trig_config_parameters():
    cfg = SineGateConfig.for_digits(5)
    assert cfg.t_terms == 5 and cfg.p_prime == 5 + 3 + 10
    with pytest.raises(ValueError):
        SineGateConfig(3, 0, 10)
    meta = trig_gate(cfg, gate_level=False).metadata
    assert meta["ancilla_widths"] == cfg.ancilla_widths()


@pytest.mark.parametrize("kind", ["sin", "cos"])
def test_trig_gate_level_n3_all_inputs(kind):
    cfg = SineGateConfig.for_digits(3, kind)
    prog = sine_gate(cfg) if kind == "sin" else cosine_gate(cfg)
    sem = trig_gate(cfg, gate_level=False)
    for x in range(8):
        g = run_product(prog, {"x": x})
        s = run_product(sem, {"x": x})
        assert g["out"] == s["out"] == trig_emulate(x, cfg)
        assert g["x"] == x


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("kind", ["sin", "cos"])
def test_trig_tally_matches_construction(n, kind):
    cfg = SineGateConfig.for_digits(n, kind)
    assert trig_gate(cfg).tally == trig_tally(cfg)


def test_product_backend_refuses_superposition():
    prog = quantum_adder(0, 1, 1)
    from qftc import gates
    from qftc.program import CircuitProgram
    bad = CircuitProgram((gates.h(0),) + prog.ops, prog.layout)
    with pytest.raises(NotProductStateError):
        run_product(bad, {})
