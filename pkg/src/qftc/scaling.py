"""Resource sweeps: analytic tallies against ``log N``, ``epsilon`` and ``delta``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qftc import QftcConfig, arithmetic_tally, qftc_tally

SWEEPS = {
    # sweep -> (expected log-log slope, tolerance)
    "L": (2.0, 0.2),
    "epsilon": (-1.0, 0.2),
    "delta": (-1.0, 0.2),
}
MIN_POINTS = 4


@dataclass
class SweepResult:
    sweep: str
    rows: list[dict]
    gate_slope: float
    oracle_slope: float

    @property
    def metric(self) -> str:
        """Which count the sweep's expectation is about."""
        return "gates" if self.sweep == "L" else "oracle_calls"

    @property
    def slope(self) -> float:
        return self.gate_slope if self.sweep == "L" else self.oracle_slope

    @property
    def expected(self) -> tuple[float, float]:
        return SWEEPS[self.sweep]

    def passed(self) -> bool:
        target, tol = self.expected
        return abs(self.slope - target) <= tol


def parse_range(text: str, integer: bool = True) -> list:
    """``"1..6"``, ``"2:6"`` or a comma list; empty input yields ``[]``."""
    text = text.strip()
    if not text:
        return []
    for sep in ("..", ":"):
        if sep in text:
            lo, hi = text.split(sep)
            return list(range(int(lo), int(hi) + 1))
    conv = int if integer else float
    return [conv(v) for v in text.split(",") if v.strip()]


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def tally_sweep(sweep: str, values, p0: int = 3, delta: float = 0.1, L: int = 2) -> SweepResult:
    """Tally the circuit over ``values`` of one parameter, others fixed.

    ``L`` sweeps regress against ``log N = L`` (in bits); ``epsilon`` sweeps take
    ``p0`` values and regress against ``2**-p0``; ``delta`` sweeps take deltas.
    """
    if sweep not in SWEEPS:
        raise ValueError(f"unknown sweep {sweep!r}")
    values = list(values)
    if len(values) < MIN_POINTS:
        raise ValueError(f"a sweep needs at least {MIN_POINTS} points, got {len(values)}")
    rows = []
    for v in values:
        if sweep == "L":
            cfg = QftcConfig(int(v), p0, delta)
            x = float(v)
        elif sweep == "epsilon":
            cfg = QftcConfig(L, int(v), delta)
            x = cfg.epsilon
        else:
            cfg = QftcConfig(L, p0, float(v))
            x = float(v)
        t = qftc_tally(cfg)
        rows.append({"sweep": sweep, "value": v, "x": x, "L": cfg.L, "p0": cfg.p0,
                     "delta": cfg.delta, "p_est": cfg.p_est,
                     "gates": t.one_two_qubit_count,
                     "gates_without_arithmetic":
                         t.one_two_qubit_count - arithmetic_tally(cfg).one_two_qubit_count,
                     "oracle_calls": t.oracle_calls + t.inverse_oracle_calls})
    xs = [r["x"] for r in rows]
    if sweep == "L" and min(xs) <= 0:
        raise ValueError("L must be positive")
    g = loglog_slope(xs, [r["gates"] for r in rows])
    o = loglog_slope(xs, [r["oracle_calls"] for r in rows])
    return SweepResult(sweep, rows, g, o)

