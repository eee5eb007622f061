"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL`` line (visible with
``pytest -v``) before asserting.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qftc import gates
from qftc.arithmetic import SineGateConfig, trig_emulate, trig_gate
from qftc.circuits import AmplitudeEstimate, amplitude_estimation, grover_q, register_marginal
from qftc.circulant import (CirculantSpec, EvolutionConfig, apply_circulant, circulant_spectrum,
                            evolve_circulant, success_probability)
from qftc.oracle import InputVector
from qftc.product import run_product
from qftc.program import program
from qftc.qftc import QftcConfig, run_block_diagonal, run_full
from qftc.reference import expm_circulant
from qftc.scaling import loglog_slope, tally_sweep
from qftc.statevector import RegisterLayout
from qftc.verify import verify_arithmetic

from conftest import random_hermitian_c, random_state, real_spectrum_input

TESTS = Path(__file__).parent


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, started):
        line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({detail}; {time.perf_counter() - started:.1f}s)"
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


@pytest.mark.slow
def test_criterion_1_qftc_correctness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    trials = failures = 0
    worst_err, worst_fid = 0.0, 1.0
    for N in (2, 4, 8):
        for p0 in (3, 4):
            cfg = QftcConfig(int(math.log2(N)), p0, 0.1)
            for _ in range(50):
                x, _ = real_spectrum_input(rng, N)
                _, res = run_block_diagonal(x, cfg)
                trials += 1
                worst_err = max(worst_err, res.max_abs_error / cfg.epsilon)
                worst_fid = min(worst_fid, res.fidelity)
                failures += not res.passed()
    ok = failures == 0
    assert report(1, ok, f"{trials - failures}/{trials} runs within eps and 1-delta; "
                         f"worst |err|/eps={worst_err:.3f}, worst fidelity={worst_fid:.4f}", t0)


@pytest.mark.slow
def test_criterion_2_mode_equivalence(report):
    t0 = time.perf_counter()
    # y = (0.7, -0.714): both components representable at p0 = 3
    y0, y1 = 0.7, -0.714
    x = InputVector.normalized([(y0 + y1) / math.sqrt(2), (y0 - y1) / math.sqrt(2)])
    cfg = QftcConfig(1, 3, 0.1, p_est=5, mode="full", max_qubits=25)
    sf, rf = run_full(x, cfg)
    sb, rb = run_block_diagonal(x, cfg)
    diff = float(np.linalg.norm(sf.amplitudes - sb.amplitudes))
    ok = diff < 1e-9 and abs(rf.fidelity - rb.fidelity) < 1e-9
    assert report(2, ok, f"{cfg.full_mode_qubits()} qubits, ||full - block|| = {diff:.2e}", t0)


def test_criterion_3_arithmetic_exhaustive(report):
    t0 = time.perf_counter()
    cases = [("add", 3, 3), ("mul_add", 2, 2), ("sub", 3, 3)]
    reps = [verify_arithmetic(op, m, n, "both") for op, m, n in cases]
    ok = all(r.ok for r in reps)
    detail = ", ".join(f"{r.op}({r.m},{r.n}) {r.cases} cases {len(r.mismatches)} mismatches" for r in reps)
    assert report(3, ok, detail, t0)


def test_criterion_4_trig_bounds(report):
    t0 = time.perf_counter()
    worst = {}
    ok = True
    for n in (3, 4, 5):
        for kind in ("sin", "cos"):
            rep = verify_arithmetic(kind, n, 0, "semantic")
            ok &= rep.ok and rep.max_trig_error <= 2.0**-n
            worst[(kind, n)] = rep.max_trig_error * 2**n
    for kind in ("sin", "cos"):
        cfg = SineGateConfig.for_digits(3, kind)
        prog = trig_gate(cfg)
        ok &= all(run_product(prog, {"x": x})["out"] == trig_emulate(x, cfg) for x in range(8))
        ok &= verify_arithmetic(kind, 3, 0, "gate").ok
    assert report(4, ok, f"max error * 2^n = {max(worst.values()):.3f}; gate level n=3 matches", t0)


def _flag_prep(theta):
    layout = RegisterLayout.sequential([("flag", 1)])
    return program([gates.ry(2 * theta, 0)], layout)


def _ae_marginal(theta, p_est):
    q = grover_q(_flag_prep(theta), "flag", good_value=1)
    state, layout = amplitude_estimation(q, p_est)
    return register_marginal(state, layout, "est")


def test_criterion_5_amplitude_estimation(report):
    t0 = time.perf_counter()
    p = 5
    exact_mass = 1.0
    for M in range(0, 2 ** (p - 1) + 1):
        marg = _ae_marginal(math.pi * M / 2**p, p)
        hit = sum(marg[m] for m in range(2**p)
                  if AmplitudeEstimate.from_outcome(m, p).folded == M / 2**p)
        exact_mass = min(exact_mass, hit)
    rng = np.random.default_rng(7)
    masses = []
    for theta in rng.uniform(0, math.pi / 2, size=200):
        marg = _ae_marginal(float(theta), p)
        masses.append(sum(marg[m] for m in range(2**p)
                          if abs(AmplitudeEstimate.from_outcome(m, p).folded - theta / math.pi) <= 2.0**-p))
    ok = exact_mass >= 1 - 1e-9 and min(masses) >= 0.81
    assert report(5, ok, f"exact-code mass >= {exact_mass:.12f}; generic success min {min(masses):.4f} "
                         f"mean {np.mean(masses):.4f} over 200 trials", t0)


def test_criterion_6_circulant_operator(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    worst_p, worst_amp = 0.0, 0.0
    for N in (4, 8):
        L = int(math.log2(N))
        for i in range(20):
            c = random_hermitian_c(rng, N) if i % 2 == 0 else random_state(rng, L)
            spec = CirculantSpec.from_values(c)
            s = InputVector(random_state(rng, L))
            out, prob = apply_circulant(s, spec)
            dense = spec.matrix() @ s.components
            worst_p = max(worst_p, abs(prob - success_probability(s, spec)))
            worst_amp = max(worst_amp, float(np.max(np.abs(out.amplitudes - dense / np.linalg.norm(dense)))))
    unitary_gap = 0.0
    for N in (4, 8):
        L = int(math.log2(N))
        for shift in range(N):
            s = InputVector(random_state(rng, L))
            _, prob = apply_circulant(s, CirculantSpec.from_values(np.eye(N)[shift]))
            unitary_gap = max(unitary_gap, abs(prob - 1 / N))
    ok = worst_p <= 1e-10 and unitary_gap <= 1e-10 and worst_amp <= 1e-9
    assert report(6, ok, f"|p - sum|sF|^2| <= {worst_p:.1e}, |p - 1/N| <= {unitary_gap:.1e}, "
                         f"output error <= {worst_amp:.1e}", t0)


def _hermitian_specs(rng, count, limit):
    specs = []
    while len(specs) < count:
        spec = CirculantSpec.from_values(random_hermitian_c(rng, 4))
        if np.max(np.abs(circulant_spectrum(spec).F)) < limit:
            specs.append(spec)
    return specs


@pytest.mark.slow
def test_criterion_7_circulant_hamiltonian(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(31)
    cfg = EvolutionConfig(4, 1.0, 0.1)
    fids = []
    for spec in _hermitian_specs(rng, 10, 1 - 2.0 ** (-cfg.p0 - 1)):
        s = InputVector(random_state(rng, 2))
        res = evolve_circulant(s, spec, cfg)
        exact = expm_circulant(spec.c.components, 1.0) @ s.components
        assert abs(abs(np.vdot(exact, res.state.amplitudes)) - res.fidelity) < 1e-9
        fids.append(res.fidelity)
    specs = _hermitian_specs(rng, 5, 0.9)
    states = [InputVector(random_state(rng, 2)) for _ in specs]
    p0s = [3, 4, 5, 6]
    deficits = []
    for p0 in p0s:
        c = EvolutionConfig.for_digits(4, 1.0, p0)
        deficits.append(np.mean([1 - evolve_circulant(s, sp, c).fidelity for s, sp in zip(states, specs)]))
    inv_eps = [2.0**p for p in p0s]
    slope = loglog_slope(inv_eps, deficits)
    ok = min(fids) >= 0.8 and abs(slope + 2) <= 0.5
    assert report(7, ok, f"min fidelity {min(fids):.4f} over 10 circulants; deficit slope vs 1/eps_F "
                         f"{slope:.3f} (deficits {', '.join(f'{d:.2e}' for d in deficits)})", t0)


def test_criterion_8_scaling_tallies(report):
    t0 = time.perf_counter()
    eps = tally_sweep("epsilon", range(2, 7))
    ok_eps = eps.passed()
    report("8b", ok_eps, f"oracle-call slope vs eps {eps.oracle_slope:.3f} (want -1 +/- 0.2)", t0)
    t1 = time.perf_counter()
    gl = tally_sweep("L", range(1, 7))
    no_arith = loglog_slope([r["x"] for r in gl.rows], [r["gates_without_arithmetic"] for r in gl.rows])
    ok_l = gl.passed()
    report("8a", ok_l, f"gate slope vs log N {gl.gate_slope:.3f} (want 2 +/- 0.2); "
                       f"without the L-independent arithmetic {no_arith:.3f}", t1)
    assert ok_eps and ok_l


PROPERTY_TESTS = [
    "test_statevector.py::test_random_circuit_preserves_norm",
    "test_statevector.py::test_basis_function_permutes_probabilities",
    "test_statevector.py::test_program_inverse_and_tally",
    "test_circuits.py::test_qft_then_inverse_is_identity",
    "test_arithmetic.py::test_gate_semantic_equivalence_dense",
    "test_arithmetic.py::test_adder_group_law",
    "test_oracle.py::test_controlled_oracle_then_inverse",
    "test_reference.py::test_dft_parseval_and_involution",
    "test_reference.py::test_overlap_difference_identity",
    "test_circulant.py::test_hermitian_iff_real_spectrum",
    "test_qftc.py::test_overlap_difference_identity",
]


def test_criterion_9_invariant_suites(report):
    t0 = time.perf_counter()
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
           *[str(TESTS / t) for t in PROPERTY_TESTS]]
    res = subprocess.run(cmd, capture_output=True, text=True, cwd=TESTS)
    summary = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr[-200:]
    ok = res.returncode == 0
    assert report(9, ok, f"property suites: {summary}", t0), res.stdout[-2000:]
