"""Circuit programs: ordered operation lists with layouts and resource tallies."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .statevector import GateOp, GateTally, RegisterLayout, StateVector, basis_table


def _values(indices: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    v = np.zeros_like(indices)
    for q in qubits:
        v = (v << 1) | ((indices >> (n - 1 - q)) & 1)
    return v


@dataclass(frozen=True, eq=False)
class BasisFunctionOp:
    """Reversible basis permutation ``|a>|c> -> |a>|table[a, c]>`` on explicit qubits.

    ``tally`` is what the equivalent gate-level circuit would cost; it is
    supplied by whoever builds the op.
    """

    input_qubits: tuple[tuple[int, ...], ...]
    output_qubits: tuple[int, ...]
    table: np.ndarray
    name: str = "f"
    controls: tuple[tuple[int, int], ...] = ()
    tally: GateTally = field(default_factory=GateTally)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @cached_property
    def inverse_table(self) -> np.ndarray:
        out_dim = self.table.shape[-1]
        rows = self.table.reshape(-1, out_dim)
        inv = np.empty_like(rows)
        np.put_along_axis(inv, rows, np.broadcast_to(np.arange(out_dim), rows.shape), axis=1)
        return inv.reshape(self.table.shape)

    @property
    def qubits(self) -> tuple[int, ...]:
        flat = [q for reg in self.input_qubits for q in reg]
        return tuple(flat) + self.output_qubits + tuple(q for q, _ in self.controls)

    def inverse(self) -> BasisFunctionOp:
        return BasisFunctionOp(self.input_qubits, self.output_qubits, self.inverse_table,
                               self.name + "†", self.controls, self.tally.inverse())

    def controlled(self, qubit: int, polarity: int = 1) -> BasisFunctionOp:
        return BasisFunctionOp(self.input_qubits, self.output_qubits, self.table, self.name,
                               self.controls + ((qubit, polarity),), self.tally)

    def remap(self, qmap) -> BasisFunctionOp:
        return BasisFunctionOp(tuple(tuple(qmap[q] for q in reg) for reg in self.input_qubits),
                               tuple(qmap[q] for q in self.output_qubits), self.table, self.name,
                               tuple((qmap[q], p) for q, p in self.controls), self.tally)

    def destinations(self, idx: np.ndarray, n: int) -> np.ndarray:
        key = tuple(_values(idx, n, reg) for reg in self.input_qubits)
        new_c = self.table[key + (_values(idx, n, self.output_qubits),)]
        dest = idx.copy()
        for pos, q in enumerate(self.output_qubits):
            bit = 1 << (n - 1 - q)
            digit = (new_c >> (len(self.output_qubits) - 1 - pos)) & 1
            dest = (dest & ~bit) | (digit * bit)
        if self.controls:
            on = np.ones(idx.shape, dtype=bool)
            for q, p in self.controls:
                on &= ((idx >> (n - 1 - q)) & 1) == p
            dest = np.where(on, dest, idx)
        return dest

    def apply(self, psi: np.ndarray, n: int, chunk: int = 1 << 20) -> np.ndarray:
        dim = 1 << n
        if n <= 20:
            perm = self._cache.get(n)
            if perm is None:
                perm = self.destinations(np.arange(dim, dtype=np.int64), n)
                self._cache[n] = perm
            out = np.empty_like(psi)
            out[perm] = psi
            return out
        out = np.empty_like(psi)
        for lo in range(0, dim, chunk):
            idx = np.arange(lo, min(dim, lo + chunk), dtype=np.int64)
            out[self.destinations(idx, n)] = psi[idx]
        return out


@dataclass(frozen=True, eq=False)
class Block:
    """A named group of operations.

    With ``kind="oracle"`` the block is charged as one oracle call however
    many gates it contains internally; ``kind="inverse_oracle"`` likewise.
    """

    ops: tuple
    name: str = "block"
    kind: str | None = None

    @property
    def tally(self) -> GateTally:
        if self.kind == "oracle":
            return GateTally(0, 1, 0)
        if self.kind == "inverse_oracle":
            return GateTally(0, 0, 1)
        total = GateTally()
        for op in self.ops:
            total.add(op.tally)
        return total

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted({q for op in self.ops for q in op.qubits}))

    def inverse(self) -> Block:
        kind = {"oracle": "inverse_oracle", "inverse_oracle": "oracle"}.get(self.kind, self.kind)
        return Block(tuple(op.inverse() for op in reversed(self.ops)), self.name + "†", kind)

    def controlled(self, qubit: int, polarity: int = 1) -> Block:
        return Block(tuple(op.controlled(qubit, polarity) for op in self.ops), self.name, self.kind)

    def remap(self, qmap) -> Block:
        return Block(tuple(op.remap(qmap) for op in self.ops), self.name, self.kind)


def run_ops(ops: Iterable, psi: np.ndarray, n: int) -> np.ndarray:
    """Execute ``ops`` on the array ``psi`` (shape ``(2**n,)`` or ``(2**n, batch)``)."""
    for op in ops:
        if isinstance(op, GateOp):
            kernels.apply_matrix(psi, n, op.matrix, op.targets, op.controls)
        elif isinstance(op, BasisFunctionOp):
            psi = op.apply(psi, n)
        elif isinstance(op, Block):
            psi = run_ops(op.ops, psi, n)
        else:
            raise TypeError(f"unknown operation {op!r}")
    return psi


def _flatten(ops):
    for op in ops:
        if isinstance(op, Block):
            yield from _flatten(op.ops)
        else:
            yield op


@dataclass(frozen=True, eq=False)
class CircuitProgram:
    """An ordered operation sequence over a register layout."""

    ops: tuple
    layout: RegisterLayout
    name: str = "program"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        n = self.layout.num_qubits
        for op in _flatten(self.ops):
            for q in op.qubits:
                if not 0 <= q < n:
                    raise IndexError(f"{self.name}: qubit {q} outside layout of {n} qubits")

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    @cached_property
    def tally(self) -> GateTally:
        total = GateTally()
        for op in self.ops:
            total.add(op.tally)
        return total

    def __add__(self, other: CircuitProgram) -> CircuitProgram:
        if other.num_qubits != self.num_qubits:
            raise ValueError("cannot concatenate programs on different qubit counts")
        return CircuitProgram(self.ops + other.ops, self.layout, self.name, dict(self.metadata))

    def inverse(self) -> CircuitProgram:
        return CircuitProgram(tuple(op.inverse() for op in reversed(self.ops)), self.layout,
                              self.name + "†", dict(self.metadata))

    def controlled(self, qubit: int, polarity: int = 1) -> CircuitProgram:
        if qubit in {q for op in _flatten(self.ops) for q in op.qubits}:
            raise ValueError(f"control qubit {qubit} is used by the program itself")
        return CircuitProgram(tuple(op.controlled(qubit, polarity) for op in self.ops),
                              self.layout, self.name)

    def remap(self, qmap: Sequence[int] | dict, layout: RegisterLayout) -> CircuitProgram:
        """Relocate onto ``layout``; qubit ``q`` of this program becomes ``qmap[q]``."""
        return CircuitProgram(tuple(op.remap(qmap) for op in self.ops), layout, self.name)

    def as_block(self, kind: str | None = None, name: str | None = None) -> Block:
        return Block(self.ops, name or self.name, kind)

    def gate_count(self) -> int:
        return sum(1 for _ in _flatten(self.ops))

    def run_array(self, psi: np.ndarray) -> np.ndarray:
        return run_ops(self.ops, psi, self.num_qubits)

    def execute(self, state: StateVector) -> StateVector:
        if state.num_qubits != self.num_qubits:
            raise ValueError(f"state has {state.num_qubits} qubits, program {self.num_qubits}")
        return StateVector(self.num_qubits, self.run_array(state.copy_array()))

    def unitary(self) -> np.ndarray:
        dim = 2**self.num_qubits
        return self.run_array(np.eye(dim, dtype=complex))


def basis_function_op(layout: RegisterLayout, inputs: Sequence[str], output: str, f: Callable,
                      name: str = "f", tally: GateTally | None = None) -> BasisFunctionOp:
    """Tabulate ``f`` over named registers of ``layout`` and wrap it as an op."""
    table = basis_table(layout, inputs, output, f)
    return BasisFunctionOp(tuple(tuple(layout.qubits(r)) for r in inputs),
                           tuple(layout.qubits(output)), table, name, (),
                           tally or GateTally())


def program(ops: Iterable, layout: RegisterLayout, name: str = "program") -> CircuitProgram:
    return CircuitProgram(tuple(ops), layout, name)
