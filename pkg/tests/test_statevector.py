import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qftc import gates, kernels
from qftc import _fallback
from qftc.errors import ImpossibleOutcomeError
from qftc.program import basis_function_op, program
from qftc.statevector import (GateOp, GateTally, RegisterLayout, StateVector, apply_basis_function,
                              apply_gate, gate_cost, overlap, postselect)

from conftest import random_state

SQ = 1 / math.sqrt(2)


def test_hadamard_on_zero():
    out = apply_gate(StateVector.zero(1), gates.h(0))
    assert np.allclose(out.amplitudes, [SQ, SQ], atol=1e-15)


def test_cnot_truth_table():
    out = apply_gate(StateVector.basis(2, 0b10), gates.cnot(0, 1))
    assert np.allclose(out.amplitudes, np.eye(4)[0b11])


def test_r2_on_one_gives_i():
    out = apply_gate(StateVector.basis(1, 1), gates.r(2, 0))
    assert np.allclose(out.amplitudes, [0, 1j])


def test_bit_order_msb_first():
    out = apply_gate(StateVector.zero(3), gates.x(0))
    assert out.amplitudes[0b100] == 1


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        GateOp(np.array([[1, 1], [0, 1]]), (0,))


def test_out_of_range_qubit():
    with pytest.raises(IndexError):
        apply_gate(StateVector.zero(2), gates.h(3))


def test_tally_additive_and_costs():
    t = GateTally()
    apply_gate(StateVector.zero(3), gates.h(0), t)
    apply_gate(StateVector.zero(3), gates.x(2, ((0, 1), (1, 1))), t)
    assert t.one_two_qubit_count == gate_cost(1) + gate_cost(3) == 1 + 5
    a, b = GateTally(3, 1, 0), GateTally(4, 0, 2)
    assert (a + b) == GateTally(7, 1, 2)
    with pytest.raises(ValueError):
        GateTally(-1)


def test_layout_disjoint():
    with pytest.raises(ValueError):
        RegisterLayout((("a", 0, 2), ("b", 1, 2)), 3)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
def test_random_circuit_preserves_norm(seed, n):
    rng = np.random.default_rng(seed)
    ops = []
    for _ in range(int(rng.integers(1, 200))):
        q = int(rng.integers(n))
        kind = rng.integers(4)
        if kind == 0:
            ops.append(gates.h(q))
        elif kind == 1:
            ops.append(gates.ry(float(rng.uniform(0, 6.3)), q))
        elif n > 1:
            c = int((q + 1 + rng.integers(n - 1)) % n)
            ops.append(gates.r(int(rng.integers(1, 5)), q, ((c, int(rng.integers(2))),)))
    layout = RegisterLayout.sequential([("r", n)])
    out = program(ops, layout).execute(StateVector(n, random_state(rng, n)))
    assert abs(out.norm - 1) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_compiled_and_numpy_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    psi = random_state(rng, n)
    q = int(rng.integers(n))
    others = [i for i in range(n) if i != q]
    n_ctrl = int(rng.integers(0, min(3, len(others) - 1) + 1))
    picked = rng.choice(others, size=n_ctrl, replace=False)
    controls = tuple((int(c), int(rng.integers(2))) for c in picked)
    others = [i for i in others if i not in {c for c, _ in controls}]
    u = gates.ry(float(rng.uniform(0, 6)), q).matrix @ gates.phase_mat(float(rng.uniform(0, 6)))
    a, b = psi.copy(), psi.copy()
    kernels.apply_matrix(a, n, u, (q,), controls)
    _fallback.apply_matrix(b, n, u, (q,), controls)
    assert np.allclose(a, b, atol=1e-13)
    t2 = int(others[0])
    a2, b2 = psi.copy(), psi.copy()
    kernels.apply_matrix(a2, n, gates.SWAP_MAT, (q, t2), ())
    _fallback.apply_matrix(b2, n, gates.SWAP_MAT, (q, t2), ())
    assert np.allclose(a2, b2)


def test_kernel_matches_kron_reference(rng):
    n = 4
    psi = random_state(rng, n)
    u = gates.ry(0.7, 0).matrix
    out = psi.copy()
    kernels.apply_matrix(out, n, u, (2,), ())
    full = np.kron(np.kron(np.eye(4), u), np.eye(2))
    assert np.allclose(out, full @ psi)


def test_basis_function_identity_and_xor():
    layout = RegisterLayout.sequential([("a", 1), ("c", 1)])
    s = StateVector.basis(2, 0b10)
    assert np.allclose(apply_basis_function(s, layout, ["a"], "c", lambda a, c: c).amplitudes,
                       s.amplitudes)
    out = apply_basis_function(s, layout, ["a"], "c", lambda a, c: c ^ a)
    assert np.allclose(out.amplitudes, np.eye(4)[0b11])


def test_basis_function_rejects_non_injective():
    layout = RegisterLayout.sequential([("a", 2), ("c", 2)])
    with pytest.raises(ValueError):
        apply_basis_function(StateVector.zero(4), layout, ["a"], "c", lambda a, c: c & 1)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_basis_function_permutes_probabilities(seed):
    rng = np.random.default_rng(seed)
    layout = RegisterLayout.sequential([("a", 3), ("c", 3)])
    psi = StateVector(6, random_state(rng, 6))
    out = apply_basis_function(psi, layout, ["a"], "c", lambda a, c: (c + 3 * a + 1) % 8)
    assert np.allclose(np.sort(out.probabilities()), np.sort(psi.probabilities()))


def test_control_linearity_block_diagonal(rng):
    """A gate controlled on r evolves each r-branch independently."""
    n = 4
    psi = random_state(rng, n)
    op = gates.ry(0.9, 3, ((0, 1),))
    out = apply_gate(StateVector(n, psi), op).amplitudes
    half = 2 ** (n - 1)
    assert np.allclose(out[:half], psi[:half])
    sub = apply_gate(StateVector(n - 1, psi[half:] / np.linalg.norm(psi[half:])),
                     gates.ry(0.9, 2)).amplitudes * np.linalg.norm(psi[half:])
    assert np.allclose(out[half:], sub)


def test_postselect_bell():
    bell = StateVector(2, np.array([SQ, 0, 0, SQ]))
    layout = RegisterLayout.sequential([("a", 1), ("b", 1)])
    kept, p = postselect(bell, layout, "a", 0)
    assert p == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(kept.amplitudes, [1, 0, 0, 0])


def test_postselect_impossible():
    layout = RegisterLayout.sequential([("a", 1)])
    with pytest.raises(ImpossibleOutcomeError):
        postselect(StateVector.basis(1, 1), layout, "a", 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), value=st.integers(0, 3))
def test_postselect_probability_is_projected_norm(seed, value):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, 4)
    layout = RegisterLayout.sequential([("a", 2), ("b", 2)])
    _, p = postselect(StateVector(4, psi), layout, "b", value)
    assert p == pytest.approx(np.sum(np.abs(psi[value::4]) ** 2), abs=1e-12)


def test_overlap_examples(rng):
    psi = StateVector(3, random_state(rng, 3))
    assert overlap(psi, psi) == pytest.approx(1)
    assert overlap(StateVector.basis(1, 0), StateVector.basis(1, 1)) == 0
    plus = apply_gate(StateVector.zero(1), gates.h(0))
    assert overlap(plus, StateVector.zero(1)) == pytest.approx(SQ)
    with pytest.raises(ValueError):
        overlap(StateVector.zero(1), StateVector.zero(2))


def test_program_inverse_and_tally(rng):
    layout = RegisterLayout.sequential([("r", 3)])
    p1 = program([gates.h(0), gates.r(2, 1, ((0, 1),))], layout)
    p2 = program([gates.swap(0, 2), gates.x(1, ((0, 1), (2, 0)))], layout)
    both = p1 + p2
    assert both.tally == p1.tally + p2.tally
    psi = StateVector(3, random_state(rng, 3))
    back = both.inverse().execute(both.execute(psi))
    assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-9)


def test_basis_function_op_inverse():
    layout = RegisterLayout.sequential([("a", 2), ("c", 3)])
    op = basis_function_op(layout, ["a"], "c", lambda a, c: (c + 5 * a) % 8)
    prog = program([op, op.inverse()], layout)
    assert np.allclose(prog.unitary(), np.eye(32))
