"""Amplitude-loading oracles and the real/imaginary input reduction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import gates
from .errors import DomainError
from .program import Block, CircuitProgram, program
from .statevector import GateOp, RegisterLayout

UNIT_TOL = 1e-10


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise DomainError(f"dimension {n} is not a power of two")
    return n.bit_length() - 1


@dataclass(frozen=True, eq=False)
class InputVector:
    """Unit vector of ``N = 2**L`` complex amplitudes."""

    components: np.ndarray

    def __post_init__(self):
        comp = np.array(self.components, dtype=complex).reshape(-1)
        _log2_exact(len(comp))
        norm = np.linalg.norm(comp)
        if norm == 0:
            raise DomainError("zero vector")
        if abs(norm - 1) > UNIT_TOL:
            raise DomainError(f"input norm {norm:.12g} differs from 1")
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def L(self) -> int:
        return _log2_exact(self.n)

    @classmethod
    def normalized(cls, values) -> InputVector:
        v = np.asarray(values, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise DomainError("zero vector")
        return cls(v / norm)

    @classmethod
    def from_dict(cls, doc: dict, tol: float = 1e-8, real_key="real", imag_key="imag") -> InputVector:
        n = int(doc["n"])
        re = np.asarray(doc[real_key], dtype=float)
        im = np.asarray(doc.get(imag_key, [0.0] * n), dtype=float)
        if len(re) != n or len(im) != n:
            raise DomainError(f"expected {n} components")
        _log2_exact(n)
        v = re + 1j * im
        norm = np.linalg.norm(v)
        if abs(norm - 1) > tol:
            raise DomainError(f"input norm {norm:.12g} differs from 1 by more than {tol}")
        return cls(v / norm)

    @classmethod
    def from_json(cls, path) -> InputVector:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"n": self.n, "real": self.components.real.tolist(),
                "imag": self.components.imag.tolist()}


def oracle_ops(x: InputVector, qubits) -> list:
    """Rotation tree for ``|0^L> -> sum_j x_j |j>`` on ``qubits`` (MSB first).

    Level ``l`` splits each prefix's weight between its two children with
    an Ry controlled on the prefix; a final layer of prefix-controlled
    diagonal gates on the last qubit installs the exact phases.
    """
    qs = list(qubits)
    L = len(qs)
    if 2**L != x.n:
        raise ValueError("register width does not match the vector dimension")
    amps = x.components
    mags = np.abs(amps) ** 2
    ops = []
    for level in range(L):
        block = 2 ** (L - level)
        for prefix in range(2**level):
            seg = mags[prefix * block:(prefix + 1) * block]
            left, right = seg[: block // 2].sum(), seg[block // 2:].sum()
            if left + right == 0 or right == 0:
                continue
            angle = 2 * math.atan2(math.sqrt(right), math.sqrt(left))
            controls = tuple((qs[i], (prefix >> (level - 1 - i)) & 1) for i in range(level))
            ops.append(gates.ry(angle, qs[level], controls))
    phases = np.angle(amps)
    for prefix in range(2 ** (L - 1)):
        p0, p1 = phases[2 * prefix], phases[2 * prefix + 1]
        if p0 == 0 and p1 == 0:
            continue
        controls = tuple((qs[i], (prefix >> (L - 2 - i)) & 1) for i in range(L - 1))
        diag = np.diag([np.exp(1j * p0), np.exp(1j * p1)])
        ops.append(GateOp(diag, (qs[-1],), controls, "phase"))
    return ops


def prepare_oracle(x: InputVector) -> CircuitProgram:
    layout = RegisterLayout.sequential([("j", x.L)])
    return program(oracle_ops(x, layout.qubits("j")), layout, "O_x")


def oracle_block(x: InputVector, qubits, control: tuple[int, int] | None = None) -> Block:
    """The oracle as one costed call, optionally controlled."""
    ops = oracle_ops(x, qubits)
    if control is not None:
        ops = [op.controlled(*control) for op in ops]
    return Block(tuple(ops), "O_x", "oracle")


def controlled_oracle(x: InputVector) -> CircuitProgram:
    layout = RegisterLayout.sequential([("control", 1), ("j", x.L)])
    blk = oracle_block(x, layout.qubits("j"), (0, 1))
    return program([blk], layout, "c-O_x")


def real_reduction(x: InputVector):
    """Split ``x`` into inputs whose transforms are ``Re y`` and ``Im y``.

    ``x_re[j] = (x[j] + conj(x[-j])) / 2`` and
    ``x_im[j] = (x[j] - conj(x[-j])) / 2i``.  Both are renormalized; the
    norms are returned so that ``norm * dft(part)`` restores the real or
    imaginary part of ``dft(x)``.  A part with zero norm is returned as
    ``None``.
    """
    v = x.components
    mirror = np.conj(v[(-np.arange(x.n)) % x.n])
    parts = [(v + mirror) / 2, (v - mirror) / 2j]
    out, norms = [], []
    for part in parts:
        nrm = float(np.linalg.norm(part))
        norms.append(nrm)
        out.append(InputVector(part / nrm) if nrm > 1e-14 else None)
    return out[0], out[1], tuple(norms)
