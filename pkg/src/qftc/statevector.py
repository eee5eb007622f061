"""Dense state vectors, register layouts and elementary gate application.

Bit order is most-significant-first throughout: qubit 0 of a layout is the
most significant bit of the global basis index, and the first qubit of a
register is the most significant digit of the value it holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import ImpossibleOutcomeError

NORM_ATOL = 1e-10
UNITARY_ATOL = 1e-12
POSTSELECT_MIN_PROB = 1e-14
# two-qubit-gate equivalents charged per qubit beyond the second
MULTI_QUBIT_COST = 5


@dataclass
class GateTally:
    """Resource counts; additive under concatenation."""

    one_two_qubit_count: int = 0
    oracle_calls: int = 0
    inverse_oracle_calls: int = 0

    def __post_init__(self):
        if min(self.one_two_qubit_count, self.oracle_calls, self.inverse_oracle_calls) < 0:
            raise ValueError("tally counts must be non-negative")

    def __add__(self, other: GateTally) -> GateTally:
        return GateTally(
            self.one_two_qubit_count + other.one_two_qubit_count,
            self.oracle_calls + other.oracle_calls,
            self.inverse_oracle_calls + other.inverse_oracle_calls,
        )

    def __mul__(self, k: int) -> GateTally:
        return GateTally(self.one_two_qubit_count * k, self.oracle_calls * k,
                         self.inverse_oracle_calls * k)

    __rmul__ = __mul__

    def add(self, other: GateTally) -> None:
        self.one_two_qubit_count += other.one_two_qubit_count
        self.oracle_calls += other.oracle_calls
        self.inverse_oracle_calls += other.inverse_oracle_calls

    def inverse(self) -> GateTally:
        return GateTally(self.one_two_qubit_count, self.inverse_oracle_calls, self.oracle_calls)

    def as_dict(self) -> dict:
        return {
            "one_two_qubit_count": self.one_two_qubit_count,
            "oracle_calls": self.oracle_calls,
            "inverse_oracle_calls": self.inverse_oracle_calls,
        }


def gate_cost(width: int) -> int:
    """One- or two-qubit gate equivalents for a gate touching ``width`` qubits."""
    if width <= 2:
        return 1
    return MULTI_QUBIT_COST * (width - 2)


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint qubit ranges."""

    registers: tuple[tuple[str, int, int], ...]
    num_qubits: int
    bit_order: str = "msb-first"

    def __post_init__(self):
        used = set()
        for name, start, width in self.registers:
            if width < 1 or start < 0 or start + width > self.num_qubits:
                raise ValueError(f"register {name!r} out of range")
            span = set(range(start, start + width))
            if used & span:
                raise ValueError(f"register {name!r} overlaps another register")
            used |= span
        names = [r[0] for r in self.registers]
        if len(set(names)) != len(names):
            raise ValueError("duplicate register names")

    @classmethod
    def sequential(cls, spec: Sequence[tuple[str, int]]) -> RegisterLayout:
        regs, pos = [], 0
        for name, width in spec:
            regs.append((name, pos, width))
            pos += width
        return cls(tuple(regs), pos)

    def _lookup(self, name: str) -> tuple[str, int, int]:
        for reg in self.registers:
            if reg[0] == name:
                return reg
        raise KeyError(f"no register named {name!r}")

    def qubits(self, name: str) -> list[int]:
        _, start, width = self._lookup(name)
        return list(range(start, start + width))

    def width(self, name: str) -> int:
        return self._lookup(name)[2]

    def names(self) -> list[str]:
        return [r[0] for r in self.registers]

    def __contains__(self, name: str) -> bool:
        return any(r[0] == name for r in self.registers)


@dataclass(frozen=True, eq=False)
class GateOp:
    """A (multi-)controlled unitary on ``targets``.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 0 means the
    gate fires when the control reads 0.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    name: str = "U"
    cost: int | None = None
    tally_override: GateTally | None = None
    atol: float = field(default=UNITARY_ATOL, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple((int(q), int(p)) for q, p in self.controls))
        dim = 2 ** len(self.targets)
        if m.shape != (dim, dim):
            raise ValueError(f"{self.name}: matrix shape {m.shape} does not match {len(self.targets)} targets")
        qs = list(self.targets) + [q for q, _ in self.controls]
        if len(set(qs)) != len(qs):
            raise ValueError(f"{self.name}: repeated qubit among targets/controls")
        if not np.allclose(m.conj().T @ m, np.eye(dim), atol=self.atol, rtol=0):
            raise ValueError(f"{self.name}: matrix is not unitary")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def tally(self) -> GateTally:
        if self.tally_override is not None:
            return self.tally_override
        cost = self.cost if self.cost is not None else gate_cost(len(self.qubits))
        return GateTally(cost, 0, 0)

    def inverse(self) -> GateOp:
        t = self.tally_override.inverse() if self.tally_override is not None else None
        return GateOp(self.matrix.conj().T, self.targets, self.controls, self.name + "†",
                      self.cost, t, self.atol)

    def controlled(self, qubit: int, polarity: int = 1) -> GateOp:
        # cost overrides describe the uncontrolled decomposition only
        return GateOp(self.matrix, self.targets, self.controls + ((qubit, polarity),),
                      self.name, None, self.tally_override, self.atol)

    def remap(self, qmap) -> GateOp:
        return GateOp(self.matrix, tuple(qmap[q] for q in self.targets),
                      tuple((qmap[q], p) for q, p in self.controls), self.name, self.cost,
                      self.tally_override, self.atol)

    def check_range(self, num_qubits: int) -> None:
        for q in self.qubits:
            if not 0 <= q < num_qubits:
                raise IndexError(f"{self.name}: qubit {q} outside 0..{num_qubits - 1}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable dense amplitude array over ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise ValueError(f"expected {2**self.num_qubits} amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> StateVector:
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy_array(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def apply_gate(state: StateVector, gate: GateOp, tally: GateTally | None = None) -> StateVector:
    """Return ``gate`` applied to ``state``; ``tally`` is incremented if given."""
    gate.check_range(state.num_qubits)
    psi = state.copy_array()
    kernels.apply_matrix(psi, state.num_qubits, gate.matrix, gate.targets, gate.controls)
    if tally is not None:
        tally.add(gate.tally)
    return StateVector(state.num_qubits, psi)


def register_values(layout: RegisterLayout, name: str, indices: np.ndarray) -> np.ndarray:
    """Value held by register ``name`` in each global basis index."""
    qs = layout.qubits(name)
    shift = layout.num_qubits - 1 - qs[-1]
    return (indices >> shift) & ((1 << len(qs)) - 1)


def basis_table(layout: RegisterLayout, inputs: Sequence[str], output: str,
                f: Callable) -> np.ndarray:
    """Tabulate ``f(*input_values, out_value)`` over all register values.

    Raises ``ValueError`` if ``f`` is not a bijection on the output register
    for some fixed input values.
    """
    dims = [2 ** layout.width(r) for r in inputs] + [2 ** layout.width(output)]
    grids = np.meshgrid(*[np.arange(d, dtype=np.int64) for d in dims], indexing="ij")
    try:
        table = np.asarray(f(*grids), dtype=np.int64)
        if table.shape != tuple(dims):
            raise TypeError
    except (TypeError, ValueError):
        flat = [int(f(*vals)) for vals in zip(*(g.ravel() for g in grids))]
        table = np.array(flat, dtype=np.int64).reshape(dims)
    out_dim = dims[-1]
    if table.min() < 0 or table.max() >= out_dim:
        raise ValueError("basis function maps outside the output register")
    rows = table.reshape(-1, out_dim)
    srt = np.sort(rows, axis=1)
    if not np.array_equal(srt, np.broadcast_to(np.arange(out_dim), srt.shape)):
        raise ValueError("basis function is not injective on an input stratum")
    return table


def permute_by_table(psi: np.ndarray, layout: RegisterLayout, inputs: Sequence[str],
                     output: str, table: np.ndarray, chunk: int = 1 << 20) -> np.ndarray:
    """Apply ``|a>|c> -> |a>|table[a, c]>`` to ``psi`` (returns a new array)."""
    out = np.empty_like(psi)
    dim = 2**layout.num_qubits
    out_qs = layout.qubits(output)
    out_shift = layout.num_qubits - 1 - out_qs[-1]
    out_mask = ((1 << len(out_qs)) - 1) << out_shift
    for lo in range(0, dim, chunk):
        idx = np.arange(lo, min(dim, lo + chunk), dtype=np.int64)
        key = tuple(register_values(layout, r, idx) for r in inputs) + (
            register_values(layout, output, idx),)
        new_c = table[key]
        dest = (idx & ~out_mask) | (new_c << out_shift)
        out[dest] = psi[idx]
    return out


def apply_basis_function(state: StateVector, layout: RegisterLayout, inputs: Sequence[str],
                         output: str, f: Callable) -> StateVector:
    """Permute amplitudes by the reversible map ``|a>|c> -> |a>|f(a, c)>``."""
    if layout.num_qubits != state.num_qubits:
        raise ValueError("layout and state sizes differ")
    table = basis_table(layout, inputs, output, f)
    psi = permute_by_table(state.copy_array(), layout, inputs, output, table)
    return StateVector(state.num_qubits, psi)


def postselect(state: StateVector, layout: RegisterLayout, register: str,
               value: int) -> tuple[StateVector, float]:
    """Project ``register`` onto ``value``; return renormalized state and probability."""
    width = layout.width(register)
    if not 0 <= value < 2**width:
        raise ValueError(f"value {value} does not fit register {register!r}")
    idx = np.arange(2**state.num_qubits, dtype=np.int64)
    keep = register_values(layout, register, idx) == value
    psi = np.where(keep, state.amplitudes, 0)
    prob = float(np.vdot(psi, psi).real)
    if prob < POSTSELECT_MIN_PROB:
        raise ImpossibleOutcomeError(
            f"post-selecting {register}={value} has probability {prob:.3g}")
    return StateVector(state.num_qubits, psi / np.sqrt(prob)), prob


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
