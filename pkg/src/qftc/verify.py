"""Exhaustive input sweeps of the arithmetic circuits against the classical mirror."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .arithmetic import (SineGateConfig, multiply_adder, quantum_adder, subtractor_sigma_minus,
                         trig_emulate, trig_gate, exact_trig)
from .errors import BudgetError
from .fixedpoint import FixedPointCode, FixedPointFormat
from .product import run_product
from .reference import fixed_point_oracle

SWEEP_LIMIT = 2**16
OPS = ("add", "mul_add", "sub", "sin", "cos")


@dataclass
class SweepReport:
    op: str
    m: int
    n: int
    mode: str
    cases: int = 0
    mismatches: list[dict] = field(default_factory=list)
    max_trig_error: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _cases(op: str, m: int, n: int):
    """(program builder, input registers with widths, expected-output function)."""
    if op == "add":
        bf, cf = FixedPointFormat.plain(n), FixedPointFormat.signed(m)

        def expect(v, sign):
            return fixed_point_oracle("add", (FixedPointCode(bf, v["b"]), FixedPointCode(cf, v["c"])),
                                      cf, sign).code
        return (lambda sign, gl: quantum_adder(0, n, m, sign, gl)), {"b": n, "c": m + 1}, "c", expect
    if op == "mul_add":
        af, bf, cf = FixedPointFormat.plain(m), FixedPointFormat.plain(n), FixedPointFormat.signed(m + n)

        def expect(v, sign):
            ops = (FixedPointCode(af, v["a"]), FixedPointCode(bf, v["b"]), FixedPointCode(cf, v["c"]))
            return fixed_point_oracle("mul_add", ops, cf, sign).code
        return ((lambda sign, gl: multiply_adder(m, n, sign, gl)),
                {"a": m, "b": n, "c": m + n + 1}, "c", expect)
    if op == "sub":
        f, of = FixedPointFormat.plain(m), FixedPointFormat.signed(m)

        def expect(v, sign):
            return fixed_point_oracle("sub", (FixedPointCode(f, v["alpha"]),
                                              FixedPointCode(f, v["beta"])), of).code
        return ((lambda sign, gl: subtractor_sigma_minus(m, gl)),
                {"alpha": m, "beta": m}, "out", expect)
    if op in ("sin", "cos"):
        cfg = SineGateConfig.for_digits(m, op)

        def expect(v, sign):
            return trig_emulate(v["x"], cfg)
        return (lambda sign, gl: trig_gate(cfg, gl)), {"x": m}, "out", expect
    raise ValueError(f"unknown op {op!r}; expected one of {OPS}")


def sweep_size(op: str, m: int, n: int) -> int:
    _, regs, _, _ = _cases(op, m, n)
    return 2 ** sum(regs.values())


def verify_arithmetic(op: str, m: int, n: int, mode: str = "both") -> SweepReport:
    """Run every basis input through the circuit and compare with the classical mirror.

    ``mode`` is ``gate``, ``semantic`` or ``both``.  Gate-level circuits run
    on the product-state backend, which is exact for these basis inputs.
    Trig gates are also checked against the true function (bound ``2**-m``).
    """
    if mode not in ("gate", "semantic", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    build, regs, out_reg, expect = _cases(op, m, n)
    size = 2 ** sum(regs.values())
    if size > SWEEP_LIMIT:
        raise BudgetError(f"{size} inputs exceed the sweep limit of {SWEEP_LIMIT}; "
                          "reduce the digit widths")
    report = SweepReport(op, m, n, mode)
    levels = {"gate": [True], "semantic": [False], "both": [True, False]}[mode]
    signs = (1,) if op in ("sub", "sin", "cos") else (1, -1)
    names = list(regs)
    for sign in signs:
        progs = [(gl, build(sign, gl)) for gl in levels]
        for values in itertools.product(*(range(2**w) for w in regs.values())):
            v = dict(zip(names, values))
            want = expect(v, sign)
            for gl, prog in progs:
                got = run_product(prog, v)
                report.cases += 1
                bad = got[out_reg] != want or any(got[r] != v[r] for r in names if r != out_reg)
                if bad:
                    report.mismatches.append({"sign": sign, "level": "gate" if gl else "semantic",
                                              **v, "expected": want, "got": got[out_reg]})
            if op in ("sin", "cos"):
                fmt = (FixedPointFormat.plain(m) if op == "sin" else FixedPointFormat.signed(m))
                err = abs(fmt.decode(want) - exact_trig(v["x"] / 2**m, op))
                report.max_trig_error = max(report.max_trig_error, err)
    if op in ("sin", "cos") and report.max_trig_error > 2.0**-m + 1e-12:
        report.mismatches.append({"bound": 2.0**-m, "max_error": report.max_trig_error})
    return report
