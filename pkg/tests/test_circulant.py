import math

import numpy as np
import pytest

from qftc.circulant import (CirculantSpec, EvolutionConfig, apply_circulant, circulant_program,
                            circulant_spectrum, digit_phase_layer, digit_phases, evolve_circulant,
                            success_probability)
from qftc.errors import DomainError, ImpossibleOutcomeError
from qftc.fixedpoint import FixedPointFormat
from qftc.oracle import InputVector
from qftc.reference import expm_circulant
from qftc.statevector import StateVector

from conftest import random_hermitian_c, random_state

SQ = 1 / math.sqrt(2)
HALF_RING = [0, SQ, 0, SQ]


def _random_spec(rng, N, hermitian=True):
    if hermitian:
        return CirculantSpec.from_values(random_hermitian_c(rng, N))
    return CirculantSpec(InputVector(random_state(rng, int(math.log2(N)))))


# --- spectrum ------------------------------------------------------------------------

def test_identity_spectrum():
    sp = circulant_spectrum(CirculantSpec.from_values([1, 0, 0, 0]))
    assert np.allclose(sp.Lambda, 1)


def test_ring_spectrum():
    spec = CirculantSpec.from_values(HALF_RING)
    sp = circulant_spectrum(spec)
    assert np.allclose(sp.Lambda, [math.sqrt(2), 0, -math.sqrt(2), 0], atol=1e-12)
    assert sp.hermitian
    assert np.allclose(np.sort(sp.Lambda.real), np.linalg.eigvalsh(spec.matrix()), atol=1e-12)


def test_shift_is_not_hermitian():
    assert not CirculantSpec.from_values([0, 1, 0, 0]).hermitian


@pytest.mark.parametrize("N", [2, 4, 8, 16])
def test_spectrum_reconstructs_matrix(N, rng):
    for herm in (True, False):
        spec = _random_spec(rng, N, herm)
        assert np.max(np.abs(circulant_spectrum(spec).reconstruct() - spec.matrix())) <= 1e-9


def test_hermitian_iff_real_spectrum(rng):
    for _ in range(100):
        N = int(rng.choice([2, 4, 8, 16]))
        sp = circulant_spectrum(_random_spec(rng, N))
        assert sp.hermitian and np.max(np.abs(sp.Lambda.imag)) <= 1e-10
    for _ in range(20):
        sp = circulant_spectrum(_random_spec(rng, 8, hermitian=False))
        assert not sp.hermitian and np.max(np.abs(sp.Lambda.imag)) > 1e-10


def test_spec_dict_roundtrip(rng):
    spec = _random_spec(rng, 4)
    back = CirculantSpec.from_dict(spec.to_dict())
    assert np.allclose(back.c.components, spec.c.components)


# --- post-selected operator ---------------------------------------------------------

def test_identity_apply_example(rng):
    s = InputVector(random_state(rng, 2))
    out, p = apply_circulant(s, CirculantSpec.from_values([1, 0, 0, 0]))
    assert p == pytest.approx(0.25, abs=1e-12)
    assert np.allclose(out.amplitudes, s.components, atol=1e-10)


def test_unitary_circulant_probability_one_over_n(rng):
    # a cyclic shift is unitary
    s = InputVector(random_state(rng, 3))
    _, p = apply_circulant(s, CirculantSpec.from_values(np.eye(8)[3]))
    assert p == pytest.approx(1 / 8, abs=1e-10)


def test_kernel_state_is_impossible():
    s = InputVector(np.exp(2j * np.pi * np.arange(4) / 4) / 2)
    spec = CirculantSpec.from_values(HALF_RING)
    with pytest.raises(ImpossibleOutcomeError):
        apply_circulant(s, spec)
    with pytest.raises(ImpossibleOutcomeError):
        success_probability(s, spec)


@pytest.mark.parametrize("N", [4, 8])
@pytest.mark.parametrize("herm", [True, False])
def test_apply_matches_dense_product(N, herm, rng):
    for _ in range(10):
        spec = _random_spec(rng, N, herm)
        s = InputVector(random_state(rng, int(math.log2(N))))
        out, p = apply_circulant(s, spec)
        dense = spec.matrix() @ s.components
        assert p == pytest.approx(success_probability(s, spec), abs=1e-10)
        # the unnormalized output is C s / sqrt(N)
        assert p == pytest.approx(np.linalg.norm(dense) ** 2 / N, abs=1e-10)
        assert np.allclose(out.amplitudes, dense / np.linalg.norm(dense), atol=1e-9)


def test_circulant_program_counts_one_oracle_call():
    assert circulant_program(CirculantSpec.from_values(HALF_RING)).tally.oracle_calls == 1


def test_apply_dimension_mismatch():
    with pytest.raises(DomainError):
        apply_circulant(InputVector([1, 0]), CirculantSpec.from_values(HALF_RING))


# --- digit phases ---------------------------------------------------------------------------

def test_digit_phase_examples():
    L, t, p0 = 2, 0.7, 3
    d = digit_phases(L, t, p0)
    assert d[0] == pytest.approx(1)
    assert d[0b1000] == pytest.approx(np.exp(2j * t))
    assert d[0b0100] == pytest.approx(np.exp(-1j * t))


@pytest.mark.parametrize("L,p0", [(1, 2), (2, 3), (3, 4)])
def test_digit_phases_exact_for_every_code(L, p0):
    t = 1.37
    fmt = FixedPointFormat.signed(p0)
    diag = np.diag(digit_phase_layer(L, t, p0).unitary())
    assert np.allclose(diag, digit_phases(L, t, p0))
    for code in range(2 ** (p0 + 1)):
        want = -math.sqrt(2**L) * t * fmt.decode(code)
        gap = (np.angle(diag[code]) - want + math.pi) % (2 * math.pi) - math.pi
        assert abs(gap) <= 1e-12


# --- evolution -----------------------------------------------------------------------------

def test_evolution_config():
    cfg = EvolutionConfig(4, 1.0, 0.1)
    assert cfg.epsilon_F == pytest.approx(math.sqrt(0.1) / 2)
    assert 2.0**-cfg.p0 <= cfg.epsilon_F
    fd = EvolutionConfig.for_digits(4, 1.0, 5)
    assert fd.epsilon_F == pytest.approx(2**-5)
    with pytest.raises(DomainError):
        EvolutionConfig(4, 1.0, 0.0)


def test_evolve_zero_time_is_identity(rng):
    s = InputVector(random_state(rng, 2))
    spec = _random_spec(rng, 4)
    res = evolve_circulant(s, spec, EvolutionConfig(4, 0.0))
    assert np.allclose(res.state.amplitudes, s.components, atol=1e-12)
    assert res.fidelity == pytest.approx(1)


def test_evolve_identity_circulant(rng):
    s = InputVector(random_state(rng, 2))
    res = evolve_circulant(s, CirculantSpec.from_values([1, 0, 0, 0]), EvolutionConfig(4, 1.0, 0.1))
    out = res.state.amplitudes / res.norm
    assert abs(np.vdot(out, s.components)) == pytest.approx(1, abs=1e-9)
    assert res.fidelity >= 0.9


def test_evolve_random_hermitian(rng):
    done = 0
    while done < 3:
        spec = _random_spec(rng, 4)
        s = InputVector(random_state(rng, 2))
        try:
            res = evolve_circulant(s, spec, EvolutionConfig(4, 1.0, 0.1))
        except DomainError:
            continue
        exact = expm_circulant(spec.c.components, 1.0) @ s.components
        assert res.fidelity == pytest.approx(abs(np.vdot(exact, res.state.amplitudes)), abs=1e-9)
        assert res.fidelity >= 0.8
        done += 1


def test_evolve_rejects_non_hermitian(rng):
    s = InputVector(random_state(rng, 2))
    with pytest.raises(DomainError):
        evolve_circulant(s, CirculantSpec.from_values([0, 1, 0, 0]), EvolutionConfig(4, 1.0))
