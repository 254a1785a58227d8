"""Exact dense statevector and unitary algebra for small qubit registers.

Conventions fixed here and used by the whole package:

* Qubit 0 is the most significant bit of a computational-basis index
  (big-endian).  For two qubits, index 2 = binary ``10`` means qubit 0
  is |1> and qubit 1 is |0>.
* Gate matrices: ``H = [[1,1],[1,-1]]/sqrt(2)``, ``S = diag(1, i)``,
  ``T = diag(1, exp(i*pi/4))``, ``rz(t) = diag(exp(-it/2), exp(+it/2))``.
* Measuring a qubit removes it from the register: an n-qubit state
  branches into renormalized (n-1)-qubit states.

All values are immutable after construction; every operation returns a
new value, so everything here is safe to share between threads.
Amplitudes and entries are complex128 throughout.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

Array = np.ndarray

_DEFAULT_MAX_QUBITS = 12
_NORM_ATOL = 1e-9
_UNITARY_ATOL = 1e-10
_BRANCH_PRUNE = 1e-14


def max_qubits() -> int:
    """Register size cap, overridable via the TELEGATE_MAX_QUBITS env var."""
    raw = os.environ.get("TELEGATE_MAX_QUBITS")
    if raw is None:
        return _DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"TELEGATE_MAX_QUBITS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"TELEGATE_MAX_QUBITS must be >= 1, got {cap}")
    return cap


def _freeze(arr: Array) -> Array:
    arr.flags.writeable = False
    return arr


def _check_pow2(size: int, what: str) -> int:
    n = size.bit_length() - 1
    if size <= 0 or size != 1 << n:
        raise ValueError(f"{what} must be a power of two, got {size}")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over ``n_qubits`` qubits.

    The constructor validates the length is a power of two, all entries
    are finite, and the norm is 1 (within 1e-9), then renormalizes to
    machine precision and freezes the array.
    """

    amplitudes: Array

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1).copy()
        n = _check_pow2(amps.size, "state length")
        if n > max_qubits():
            raise ValueError(f"state of {n} qubits exceeds the {max_qubits()}-qubit cap")
        if not np.isfinite(amps.view(np.float64)).all():
            raise ValueError("state amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValueError(f"state is not normalized: |amplitudes| = {norm}")
        if abs(norm - 1.0) > 1e-13:  # snap drift without perturbing clean states
            amps /= norm
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The all-|0> state on ``n_qubits`` qubits (a scalar for n=0)."""
        if n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit label, e.g. ``"10"`` = |10>."""
        if not bits or any(b not in "01" for b in bits):
            raise ValueError(f"basis label must be nonempty bits, got {bits!r}")
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense complex unitary of power-of-two dimension.

    Construction rejects matrices whose deviation from U†U = I exceeds
    1e-10 entrywise, non-finite entries, and dimensions beyond the
    register cap.
    """

    matrix: Array

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got shape {m.shape}")
        n = _check_pow2(m.shape[0], "unitary dimension")
        if n > max_qubits():
            raise ValueError(f"unitary on {n} qubits exceeds the {max_qubits()}-qubit cap")
        if not np.isfinite(m.view(np.float64)).all():
            raise ValueError("unitary entries must be finite")
        defect = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if defect > _UNITARY_ATOL:
            raise ValueError(f"matrix is not unitary: max |U†U - I| = {defect:.3e}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def adjoint(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix.conj().T)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim})"


@dataclass(frozen=True)
class MeasurementBranch:
    """One outcome of a Z measurement: the bit, its probability, and the
    renormalized post-measurement state with the measured qubit removed."""

    outcome: int
    probability: float
    post_state: StateVector


# Fixed single-qubit gates.
I2 = UnitaryMatrix(np.eye(2))
X = UnitaryMatrix(np.array([[0, 1], [1, 0]]))
Y = UnitaryMatrix(np.array([[0, -1j], [1j, 0]]))
Z = UnitaryMatrix(np.array([[1, 0], [0, -1]]))
H = UnitaryMatrix(np.array([[1, 1], [1, -1]]) / math.sqrt(2))
S = UnitaryMatrix(np.diag([1, 1j]))
T = UnitaryMatrix(np.diag([1, np.exp(1j * math.pi / 4)]))


def identity(dim: int) -> UnitaryMatrix:
    return UnitaryMatrix(np.eye(dim))


def rx(theta: float) -> UnitaryMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return UnitaryMatrix(np.array([[c, -1j * s], [-1j * s, c]]))


def ry(theta: float) -> UnitaryMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return UnitaryMatrix(np.array([[c, -s], [s, c]]))


def rz(theta: float) -> UnitaryMatrix:
    return UnitaryMatrix(np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))


def phase(phi: float) -> UnitaryMatrix:
    return UnitaryMatrix(np.diag([1.0, np.exp(1j * phi)]))


def bell_pair() -> StateVector:
    """The shared entangled pair (|00> + |11>)/sqrt(2)."""
    return StateVector(np.array([1, 0, 0, 1]) / math.sqrt(2))


def kron(a: UnitaryMatrix, b: UnitaryMatrix) -> UnitaryMatrix:
    """Kronecker product; the left factor holds the more significant qubits."""
    if a.n_qubits + b.n_qubits > max_qubits():
        raise ValueError(
            f"kron result on {a.n_qubits + b.n_qubits} qubits exceeds "
            f"the {max_qubits()}-qubit cap"
        )
    return UnitaryMatrix(np.kron(a.matrix, b.matrix))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product of states; ``a``'s qubits become the more significant."""
    if a.n_qubits + b.n_qubits > max_qubits():
        raise ValueError(
            f"tensor result on {a.n_qubits + b.n_qubits} qubits exceeds "
            f"the {max_qubits()}-qubit cap"
        )
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def controlled(u: UnitaryMatrix) -> UnitaryMatrix:
    """Block matrix diag(I, U): apply ``u`` when the control qubit is |1>.

    The control is the first (most significant) tensor factor of the result.
    """
    d = u.dim
    if u.n_qubits + 1 > max_qubits():
        raise ValueError(f"controlled gate exceeds the {max_qubits()}-qubit cap")
    block = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    block[:d, :d] = np.eye(d)
    block[d:, d:] = u.matrix
    return UnitaryMatrix(block)


def apply_unitary(state: StateVector, targets: list[int] | tuple[int, ...], u: UnitaryMatrix) -> StateVector:
    """Apply ``u`` on the listed qubits, leaving all others untouched.

    ``targets[0]`` is the most significant index of ``u``'s basis.  Raises
    IndexError for out-of-range qubits and ValueError on dimension mismatch
    or repeated targets.
    """
    n = state.n_qubits
    targets = tuple(int(t) for t in targets)
    if not targets:
        raise ValueError("targets must be nonempty")
    for t in targets:
        if not 0 <= t < n:
            raise IndexError(f"qubit {t} out of range for {n} qubits")
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    k = len(targets)
    if u.dim != 1 << k:
        raise ValueError(f"unitary of dim {u.dim} cannot act on {k} qubits")

    psi = state.amplitudes.reshape((2,) * n)
    moved = np.moveaxis(psi, targets, range(k))
    front = moved.reshape(1 << k, -1)
    front = u.matrix @ front
    moved = front.reshape((2,) * n)
    psi = np.moveaxis(moved, range(k), targets)
    return StateVector(psi.reshape(-1))


def measure_z(state: StateVector, qubit: int) -> list[MeasurementBranch]:
    """Z-measure one qubit, returning every branch with probability >= 1e-14.

    The measured qubit is removed from each branch's post-state; the
    surviving qubits keep their relative order.  Branch probabilities
    sum to 1 (up to the pruning threshold).
    """
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), qubit, 0)
    branches = []
    for outcome in (0, 1):
        part = psi[outcome].reshape(-1)
        p = float(np.linalg.norm(part) ** 2)
        if p < _BRANCH_PRUNE:
            continue
        branches.append(MeasurementBranch(outcome, p, StateVector(part / math.sqrt(p))))
    return branches


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, insensitive to the global phase of either argument."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes))))


def _as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_random_unitary(dim: int, rng: np.random.Generator | int | None = None) -> UnitaryMatrix:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    g = _as_rng(rng)
    z = g.normal(size=(dim, dim)) + 1j * g.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return UnitaryMatrix(q * (d / np.abs(d)))


def haar_random_state(n_qubits: int, rng: np.random.Generator | int | None = None) -> StateVector:
    """Uniformly random pure state on ``n_qubits`` qubits."""
    g = _as_rng(rng)
    v = g.normal(size=1 << n_qubits) + 1j * g.normal(size=1 << n_qubits)
    return StateVector(v / np.linalg.norm(v))
