"""Deliberately naive classical oracles that the quantum routines are checked against."""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .fixedpoint import FixedPointCode, FixedPointFormat


def dft_reference(x: Sequence[complex]) -> np.ndarray:
    """``y_k = N**-0.5 * sum_j exp(2 pi i j k / N) x_j`` by direct double loop."""
    x = [complex(v) for v in x]
    n = len(x)
    scale = 1 / math.sqrt(n)
    y = np.empty(n, dtype=complex)
    for k in range(n):
        acc = 0j
        for j in range(n):
            acc += cmath.exp(2j * math.pi * ((j * k) % n) / n) * x[j]
        y[k] = acc * scale
    return y


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary with entries ``exp(2 pi i j k / N) / sqrt(N)``."""
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / math.sqrt(n)


def expected_overlaps(y: float) -> tuple[float, float, float]:
    """Squared overlaps ``|<phi+|phi_k>|**2``, ``|<phi-|phi_k>|**2`` and the angle theta_k.

    ``theta`` lies in ``[0, pi/2]`` with ``sin(theta)**2 = (1 + plus) / 2``.
    """
    if not abs(y) < 1:
        raise DomainError(f"|y| = {abs(y)} must be below 1")
    plus = (y * y + 1) / 4 + y / 2
    minus = (y * y + 1) / 4 - y / 2
    theta = math.asin(math.sqrt((1 + plus) / 2))
    return plus, minus, theta


# --- fixed-point arithmetic on scaled integers -----------------------------

def fixed_point_oracle(op: str, operands: Sequence[FixedPointCode], out_format: FixedPointFormat,
                       sign: int = 1, shift: int = 0) -> FixedPointCode:
    """Classical mirror of the quantum arithmetic.

    ``add``: operands ``(b, c)``; result ``c + sign * 2**-shift * b``.
    ``mul_add``: operands ``(a, b, c)``; result ``c + sign * a * b``.
    ``sub``: operands ``(alpha, beta)``; result ``alpha - beta``.

    All results wrap modulo ``2**width`` of ``out_format``.  Scaled terms
    that fall below the output resolution are truncated toward minus
    infinity, which is exact whenever the register is wide enough.
    """
    p = out_format.fraction_digits

    def rescale(scaled: int, frac: int) -> int:
        d = p - frac
        return scaled << d if d >= 0 else scaled >> -d

    if op == "add":
        b, c = operands
        if c.format != out_format:
            raise ValueError("accumulator format must equal the output format")
        term = rescale(b.scaled, b.format.fraction_digits + shift)
        total = c.scaled + sign * term
    elif op == "mul_add":
        a, b, c = operands
        if c.format != out_format:
            raise ValueError("accumulator format must equal the output format")
        frac = a.format.fraction_digits + b.format.fraction_digits
        total = c.scaled + sign * rescale(a.scaled * b.scaled, frac)
    elif op == "sub":
        alpha, beta = operands
        if alpha.format != beta.format:
            raise ValueError("sub operands must share a format")
        frac = alpha.format.fraction_digits
        total = rescale(alpha.scaled - beta.scaled, frac)
    else:
        raise ValueError(f"unknown op {op!r}")
    return FixedPointCode(out_format, out_format.to_code(total))


# --- circulant references ----------------------------------------------------

def circulant_matrix(c: Sequence[complex]) -> np.ndarray:
    """``C[a, b] = c[(b - a) mod N]`` (rows are cyclic right-shifts of ``c``)."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    return np.array([[c[(b - a) % n] for b in range(n)] for a in range(n)])


def expm_circulant(c: Sequence[complex], t: float, atol: float = 1e-10) -> np.ndarray:
    """``exp(-i C t)`` assembled from the Fourier eigenbasis."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    if not np.allclose(c, np.conj(c[(-np.arange(n)) % n]), atol=atol, rtol=0):
        raise DomainError("circulant is not Hermitian")
    f = fourier_matrix(n)
    lam = math.sqrt(n) * dft_reference(c)
    return f @ np.diag(np.exp(-1j * lam.real * t)) @ f.conj().T


def sin_pi(x: float) -> float:
    return math.sin(math.pi * x)


def cos_pi(x: float) -> float:
    return math.cos(math.pi * x)


# --- golden tables -----------------------------------------------------------

@dataclass
class ReferenceTable:
    """Rows of (inputs, expected outputs, provenance)."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *values, provenance: str) -> None:
        if len(values) != len(self.columns):
            raise ValueError("row width does not match the columns")
        self.rows.append([*values, provenance])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*self.columns, "provenance"])
            w.writerows(self.rows)


def dft_table(vectors: Sequence[Sequence[complex]]) -> ReferenceTable:
    table = ReferenceTable(["vector_index", "k", "y_real", "y_imag"])
    for i, x in enumerate(vectors):
        for k, yk in enumerate(dft_reference(x)):
            table.add(i, k, repr(float(yk.real)), repr(float(yk.imag)), provenance="dft_reference")
    return table
