"""Product-state simulation for wide arithmetic circuits on basis inputs.

Fourier-basis arithmetic applied to a computational-basis input never
entangles its qubits: every control is in a definite state when its gate
fires.  Tracking one 2-vector per qubit is then exact, which lets the
gate-level trig circuits (around a hundred qubits) run on every input.
Any gate whose control is in superposition raises ``NotProductStateError``.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import NotProductStateError
from .gates import SWAP_MAT
from .program import BasisFunctionOp, Block, CircuitProgram
from .statevector import GateOp, RegisterLayout

DEFINITE_TOL = 1e-9


class ProductState:
    def __init__(self, num_qubits: int, index: int = 0):
        self.n = num_qubits
        self.q = np.zeros((num_qubits, 2), dtype=complex)
        for i in range(num_qubits):
            self.q[i, (index >> (num_qubits - 1 - i)) & 1] = 1.0

    def prob_one(self, qubit: int) -> float:
        return float(abs(self.q[qubit, 1]) ** 2)

    def bit(self, qubit: int) -> int:
        p1 = self.prob_one(qubit)
        if p1 > 1 - DEFINITE_TOL:
            return 1
        if p1 < DEFINITE_TOL:
            return 0
        raise NotProductStateError(f"qubit {qubit} is in superposition (P1={p1:.3g})")

    def value(self, qubits: Iterable[int]) -> int:
        v = 0
        for qb in qubits:
            v = (v << 1) | self.bit(qb)
        return v

    def set_value(self, qubits: list[int], value: int) -> None:
        w = len(qubits)
        for i, qb in enumerate(qubits):
            self.q[qb] = 0
            self.q[qb, (value >> (w - 1 - i)) & 1] = 1.0

    def _controls_on(self, controls) -> bool:
        return all(self.bit(c) == pol for c, pol in controls)

    def apply(self, op) -> None:
        if isinstance(op, Block):
            for sub in op.ops:
                self.apply(sub)
        elif isinstance(op, GateOp):
            if not self._controls_on(op.controls):
                return
            if len(op.targets) == 1:
                t = op.targets[0]
                self.q[t] = op.matrix @ self.q[t]
            elif len(op.targets) == 2 and np.array_equal(op.matrix, SWAP_MAT):
                a, b = op.targets
                self.q[[a, b]] = self.q[[b, a]]
            else:
                raise NotProductStateError(f"{op.name}: multi-target gates are not supported")
        elif isinstance(op, BasisFunctionOp):
            if not self._controls_on(op.controls):
                return
            key = tuple(self.value(reg) for reg in op.input_qubits)
            c = self.value(op.output_qubits)
            self.set_value(list(op.output_qubits), int(op.table[key + (c,)]))
        else:
            raise TypeError(f"unknown operation {op!r}")


def run_product(prog: CircuitProgram, inputs: dict[str, int]) -> dict[str, int]:
    """Run ``prog`` on the basis state given by ``inputs`` (other registers zero).

    Returns the final value of every register; raises if any register ends
    in superposition.
    """
    layout: RegisterLayout = prog.layout
    st = ProductState(layout.num_qubits)
    for name, v in inputs.items():
        st.set_value(layout.qubits(name), v)
    for op in prog.ops:
        st.apply(op)
    return {name: st.value(layout.qubits(name)) for name in layout.names()}
