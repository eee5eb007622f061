"""Command-line driver.

Exit codes: 0 pass, 1 usage or I/O error, 2 domain rejection or budget
overflow, 3 tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .circulant import (EvolutionConfig, apply_circulant, circulant_spectrum, evolve_circulant,
                        success_probability)
from .errors import BudgetError, DomainError, ImpossibleOutcomeError
from .oracle import InputVector, real_reduction
from .qftc import QftcConfig, qftc_run
from .reference import expm_circulant
from .scaling import MIN_POINTS, parse_range, tally_sweep
from .verify import OPS, verify_arithmetic

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_TOLERANCE = 0, 1, 2, 3
APPLY_TOL = 1e-9
PROB_TOL = 1e-10


class UsageError(Exception):
    pass


def _out_dir(args) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _status(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_TOLERANCE


# --- qftc --------------------------------------------------------------------------

RESULT_COLUMNS = ["k", "y_exact", "y_hat", "abs_error", "prob_mass"]


def _run_part(x: InputVector, args, part: str, scale: float):
    cfg = QftcConfig(x.L, args.p0, args.delta, args.p_est, args.mode, args.max_qubits)
    _, res = qftc_run(x, cfg)
    rows, dist = [], []
    fmt = cfg.y_format
    for r in res.per_k:
        rows.append({"part": part, "k": r.k, "y_exact": scale * r.y_exact, "y_hat": scale * r.y_hat,
                     "abs_error": scale * r.abs_error, "prob_mass": r.prob_mass})
        for code, p in enumerate(r.distribution):
            if p > 0:
                dist.append({"part": part, "k": r.k, "code": code,
                             "digits": _digits(code, fmt.width), "value": scale * fmt.decode(code),
                             "prob": float(p) / cfg.N})
    return cfg, res, rows, dist


def _digits(code: int, width: int) -> str:
    s = format(code, f"0{width}b")
    return s[0] + "." + s[1:]


def cmd_qftc(args) -> int:
    x = io.load_input_vector(args.input)
    start = time.perf_counter()
    parts = [("real", x, 1.0)]
    if args.split_complex:
        x_re, x_im, (n_re, n_im) = real_reduction(x)
        parts = [(name, v, s) for name, v, s in (("real", x_re, n_re), ("imag", x_im, n_im))
                 if v is not None]
    rows, dist, fids, tallies, ok, cfg = [], [], {}, {}, True, None
    for name, v, scale in parts:
        cfg, res, r, d = _run_part(v, args, name, scale)
        rows += r
        dist += d
        fids[name] = res.fidelity
        tallies[name] = res.tally.as_dict()
        ok = ok and res.passed()
    out = _out_dir(args)
    cols = RESULT_COLUMNS if not args.split_complex else ["part"] + RESULT_COLUMNS
    f1 = io.write_csv(out / "qftc_result.csv", cols, rows)
    f2 = io.write_csv(out / "qftc_distribution.csv",
                      ["part", "k", "code", "digits", "value", "prob"], dist)
    io.write_manifest(out / "manifest.json", "qftc", cfg.as_dict(), [f1, f2], seed=args.seed,
                      tallies=tallies, wall_time=time.perf_counter() - start,
                      criteria={"accuracy_and_fidelity": ok}, extra={"fidelity": fids})
    for r in rows:
        print(f"k={r['k']} {r.get('part', '')} y={r['y_exact']:+.6f} y_hat={r['y_hat']:+.6f} "
              f"err={r['abs_error']:.3g} mass={r['prob_mass']:.4f}")
    print(f"fidelity={fids} {'PASS' if ok else 'FAIL'}")
    return _status(ok)


# --- arithmetic ----------------------------------------------------------------------

def cmd_arith_verify(args) -> int:
    n = args.n if args.n is not None else args.m
    rep = verify_arithmetic(args.op, args.m, n, args.arith_mode)
    out = _out_dir(args) if args.out else None
    outputs = []
    if rep.mismatches and out is not None:
        cols = sorted({k for m in rep.mismatches for k in m})
        outputs.append(io.write_csv(out / "mismatches.csv", cols,
                                    [{c: m.get(c, "") for c in cols} for m in rep.mismatches]))
    if out is not None:
        io.write_manifest(out / "manifest.json", "arith-verify",
                          {"op": args.op, "m": args.m, "n": n, "mode": args.arith_mode}, outputs,
                          criteria={"zero_mismatches": rep.ok},
                          extra={"cases": rep.cases, "mismatches": len(rep.mismatches)})
    extra = f" max_error={rep.max_trig_error:.4g}" if args.op in ("sin", "cos") else ""
    print(f"{args.op} m={args.m} n={n} mode={args.arith_mode}: {rep.cases} cases, "
          f"{len(rep.mismatches)} mismatches{extra}")
    return _status(rep.ok)


# --- circulant -----------------------------------------------------------------------

def cmd_circulant(args) -> int:
    spec = io.load_circulant_spec(args.spec)
    s = io.load_input_vector(args.state)
    out = _out_dir(args)
    start = time.perf_counter()
    if args.action == "apply":
        state, prob = apply_circulant(s, spec)
        dense = spec.matrix() @ s.components
        dense /= np.linalg.norm(dense)
        err = float(np.max(np.abs(state.amplitudes - dense)))
        p_formula = success_probability(s, spec)
        ok = err <= APPLY_TOL and abs(prob - p_formula) <= PROB_TOL
        amps = state.amplitudes
        summary = {"success_prob": prob, "success_prob_formula": p_formula, "max_abs_error": err}
        config = {"n": spec.n, "hermitian": spec.hermitian}
    else:
        cfg = EvolutionConfig(spec.n, args.time, args.delta, args.p0)
        res = evolve_circulant(s, spec, cfg)
        amps = res.state.amplitudes
        exact = expm_circulant(spec.c.components, args.time) @ s.components
        ok = res.fidelity >= 1 - 2 * args.delta
        summary = {"fidelity": res.fidelity, "norm": res.norm,
                   "exact_overlap": abs(np.vdot(exact, amps))}
        config = {"n": spec.n, "t": cfg.t, "delta": cfg.delta, "p0": cfg.p0,
                  "epsilon_F": cfg.epsilon_F}
    f1 = io.write_csv(out / f"circulant_{args.action}.csv", ["k", "amplitude_real", "amplitude_imag"],
                      [(k, float(a.real), float(a.imag)) for k, a in enumerate(amps)])
    io.write_manifest(out / "manifest.json", f"circulant {args.action}", config, [f1],
                      seed=args.seed, wall_time=time.perf_counter() - start,
                      criteria={"tolerance": ok}, extra={"summary": summary,
                                                        "spectrum": circulant_spectrum(spec).Lambda.real.tolist()})
    print(json.dumps(summary), "PASS" if ok else "FAIL")
    return _status(ok)


# --- bench ---------------------------------------------------------------------------

def cmd_bench(args) -> int:
    values = parse_range(args.range, integer=args.sweep != "delta")
    if len(values) < MIN_POINTS:
        raise UsageError(f"--range must give at least {MIN_POINTS} points")
    res = tally_sweep(args.sweep, values, p0=args.p0, delta=args.delta, L=args.L)
    out = _out_dir(args)
    cols = list(res.rows[0])
    f1 = io.write_csv(out / f"bench_{args.sweep}.csv", cols, res.rows)
    target, tol = res.expected
    ok = res.passed()
    io.write_manifest(out / "manifest.json", f"bench {args.sweep}",
                      {"sweep": args.sweep, "values": values, "p0": args.p0, "delta": args.delta,
                       "L": args.L}, [f1],
                      criteria={f"{res.metric}_slope": ok},
                      extra={"gate_slope": res.gate_slope, "oracle_slope": res.oracle_slope,
                             "expected_slope": target, "tolerance": tol})
    print(f"{args.sweep}: gate slope {res.gate_slope:.3f}, oracle-call slope {res.oracle_slope:.3f}; "
          f"{res.metric} expected {target}±{tol} -> {'PASS' if ok else 'FAIL'}")
    return _status(ok)


# --- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qftc", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("qftc", aliases=["run"], help="basis-encoded transform of an input vector")
    q.add_argument("--input", required=True)
    q.add_argument("--p0", type=int, default=3)
    q.add_argument("--delta", type=float, default=0.1)
    q.add_argument("--p-est", type=int, default=None)
    q.add_argument("--mode", choices=["block_diagonal", "full"], default="block_diagonal")
    q.add_argument("--max-qubits", type=int, default=None)
    q.add_argument("--split-complex", action="store_true",
                   help="run real and imaginary parts of a complex transform separately")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--out", default="qftc_out")
    q.set_defaults(func=cmd_qftc)

    a = sub.add_parser("arith-verify", help="exhaustive arithmetic check")
    a.add_argument("op", choices=OPS)
    a.add_argument("--m", type=int, required=True)
    a.add_argument("--n", type=int, default=None)
    a.add_argument("--mode", dest="arith_mode", choices=["gate", "semantic", "both"], default="both")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_arith_verify)

    c = sub.add_parser("circulant", help="circulant operator or Hamiltonian evolution")
    c.add_argument("action", choices=["apply", "evolve"])
    c.add_argument("--spec", required=True)
    c.add_argument("--state", required=True)
    c.add_argument("--time", type=float, default=1.0)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--p0", type=int, default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--out", default="circulant_out")
    c.set_defaults(func=cmd_circulant)

    b = sub.add_parser("bench", help="analytic resource sweeps with log-log slopes")
    b.add_argument("--sweep", choices=["L", "epsilon", "delta"], required=True)
    b.add_argument("--range", required=True, help="e.g. 1..6 or 0.1,0.05,0.025,0.0125")
    b.add_argument("--p0", type=int, default=3)
    b.add_argument("--delta", type=float, default=0.1)
    b.add_argument("--L", type=int, default=2)
    b.add_argument("--out", default="bench_out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (DomainError, BudgetError, ImpossibleOutcomeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
