"""Exact execution of protocol programs.

:func:`run_branches` enumerates every classical transcript depth-first,
carrying a per-branch classical environment, and returns each branch's
exact probability and final state over the external wires only.  No
sampling is involved: the output is the complete branch ensemble, so
tests tolerate only floating-point error.

:func:`channel_choi` turns a program into the Choi matrix of the channel
it implements, by running it on one half of a maximally entangled state
against an untouched reference register.  Choi matrices here are
normalized to trace 1; :func:`unitary_choi` uses the same convention so
the two are directly comparable.

Branches share no mutable state (states are immutable values), so they
could be evaluated in any order or in parallel; the returned list is
always sorted by transcript bits for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .protocol import (
    AllocQubit,
    ApplyControlledLocal,
    ApplyLocal,
    ConditionalPauli,
    DiscardBit,
    MakeBellPair,
    MeasureZ,
    Program,
    SendBit,
    WireRef,
    validate_locality,
)
from .qsim import StateVector, UnitaryMatrix

_PRUNE = 1e-14
_PAULI = {"X": qsim.X, "Z": qsim.Z}


@dataclass(frozen=True)
class BranchOutcome:
    """One classical history: the measured bits in program order, the exact
    probability of that history, and the final state of the external wires."""

    transcript: tuple[tuple[WireRef, int], ...]
    probability: float
    final_state: StateVector

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(bit for _, bit in self.transcript)


@dataclass(frozen=True)
class ChoiMatrix:
    """Trace-1 Choi matrix of a channel on n qubits (dimension 4^n).

    Index convention: output system qubits first (most significant),
    reference qubits after.  Construction checks Hermiticity (1e-12),
    unit trace (1e-12) and positive semidefiniteness (eigenvalues above
    -1e-10).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Choi matrix must be square, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("Choi matrix must be Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"Choi matrix must have trace 1, got {tr}")
        if float(np.linalg.eigvalsh(m).min()) < -1e-10:
            raise ValueError("Choi matrix must be positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def choi_distance(a: ChoiMatrix, b: ChoiMatrix) -> float:
    """Frobenius-norm distance between two Choi matrices."""
    if a.dim != b.dim:
        raise ValueError(f"Choi dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.matrix - b.matrix))


class ExecutionError(RuntimeError):
    """Internal inconsistency while executing a validated program (e.g. a
    conditional reading a bit that was never set)."""


def run_branches(p: Program, input_state: StateVector) -> list[BranchOutcome]:
    """Enumerate all measurement branches of ``p`` on ``input_state``.

    The input covers exactly the external wires, in declaration order.
    The program must pass :func:`validate_locality`; branches below
    probability 1e-14 are omitted, and the rest sum to 1 within 1e-12.
    """
    violations = validate_locality(p)
    if violations:
        summary = "; ".join(str(v) for v in violations[:3])
        raise ValueError(f"program fails locality validation: {summary}")
    if input_state.n_qubits != p.n_external:
        raise ValueError(
            f"input has {input_state.n_qubits} qubits, program declares {p.n_external}"
        )
    outcomes = _enumerate(p.instructions, input_state, list(p.external_wires))
    outcomes.sort(key=lambda o: o.bits)
    return outcomes


def _enumerate(
    instructions: tuple,
    state: StateVector,
    wires: list[WireRef | None],
) -> list[BranchOutcome]:
    """Depth-first branch enumeration.  ``wires[i]`` names the wire at qubit
    position i; ``None`` marks reference qubits no instruction may touch."""
    out: list[BranchOutcome] = []
    # stack entries: (next instruction index, state, wire order, env, transcript, prob)
    stack = [(0, state, wires, {}, (), 1.0)]
    while stack:
        idx, state, wires, env, transcript, prob = stack.pop()
        advancing = True
        while advancing and idx < len(instructions):
            ins = instructions[idx]
            idx += 1
            if isinstance(ins, AllocQubit):
                state = qsim.tensor(state, StateVector.from_bits(str(ins.basis_value)))
                wires = wires + [ins.wire]
            elif isinstance(ins, MakeBellPair):
                state = qsim.tensor(state, qsim.bell_pair())
                wires = wires + [ins.left, ins.right]
            elif isinstance(ins, ApplyLocal):
                state = qsim.apply_unitary(state, _positions(wires, ins.wires), ins.gate)
            elif isinstance(ins, ApplyControlledLocal):
                targets = (ins.control, *ins.targets)
                state = qsim.apply_unitary(
                    state, _positions(wires, targets), qsim.controlled(ins.gate)
                )
            elif isinstance(ins, MeasureZ):
                (pos,) = _positions(wires, (ins.wire,))
                rest = [w for w in wires if w != ins.wire]
                branches = qsim.measure_z(state, pos)
                advancing = False
                for br in branches:
                    p_total = prob * br.probability
                    if p_total < _PRUNE:
                        continue
                    stack.append(
                        (
                            idx,
                            br.post_state,
                            rest,
                            {**env, ins.out: br.outcome},
                            transcript + ((ins.out, br.outcome),),
                            p_total,
                        )
                    )
            elif isinstance(ins, ConditionalPauli):
                if ins.condition not in env:
                    raise ExecutionError(
                        f"conditional pauli reads unset classical wire {ins.condition}"
                    )
                if env[ins.condition] == 1:
                    state = qsim.apply_unitary(
                        state, _positions(wires, (ins.wire,)), _PAULI[ins.pauli]
                    )
            elif isinstance(ins, DiscardBit):
                env = {k: v for k, v in env.items() if k != ins.wire}
            elif isinstance(ins, SendBit):
                pass  # classical routing only; no effect on the state
            else:  # pragma: no cover - union is closed
                raise TypeError(f"unknown instruction {ins!r}")
        if advancing:
            out.append(BranchOutcome(transcript, prob, state))
    return out


def _positions(wires: list[WireRef | None], targets: tuple[WireRef, ...]) -> list[int]:
    positions = []
    for t in targets:
        try:
            positions.append(wires.index(t))
        except ValueError:
            raise ExecutionError(f"instruction touches missing quantum wire {t}") from None
    return positions


def branch_density(outcomes: list[BranchOutcome]) -> np.ndarray:
    """Mixed output state of a branch ensemble: sum of p |phi><phi|."""
    dim = outcomes[0].final_state.amplitudes.size
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for o in outcomes:
        v = o.final_state.amplitudes
        rho += o.probability * np.outer(v, v.conj())
    return rho


def _max_entangled(n_qubits: int) -> StateVector:
    d = 1 << n_qubits
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[:: d + 1] = 1.0 / math.sqrt(d)
    return StateVector(amps)


def channel_choi(p: Program) -> ChoiMatrix:
    """Choi matrix of the channel ``p`` implements on its external wires.

    Runs the program on the system half of a maximally entangled state
    (reference half untouched) and mixes the branch outputs.
    """
    n = p.n_external
    violations = validate_locality(p)
    if violations:
        summary = "; ".join(str(v) for v in violations[:3])
        raise ValueError(f"program fails locality validation: {summary}")
    wires: list[WireRef | None] = list(p.external_wires) + [None] * n
    outcomes = _enumerate(p.instructions, _max_entangled(n), wires)
    return ChoiMatrix(branch_density(outcomes))


def unitary_choi(u: UnitaryMatrix) -> ChoiMatrix:
    """Choi matrix of the unitary channel v -> u v u†, trace-normalized.

    For a maximally entangled input this is the rank-1 projector onto the
    row-major flattening of u (divided by its dimension).
    """
    phi = u.matrix.reshape(-1) / math.sqrt(u.dim)
    return ChoiMatrix(np.outer(phi, phi.conj()))
