"""Bell-diagonal states, Werner states, Pauli channels and gate-noise models.

Bell basis convention
---------------------
The target pair is

    |Phi_00> = (|0>_z |0>_x + |1>_z |1>_x) / sqrt(2),

i.e. the two-vertex graph state, and ``|Phi_k1k2> = Z_A^k1 Z_B^k2 |Phi_00>``.
Qubit A is the first tensor factor.  A :class:`BellDiagonal` stores the four
weights in the order ``(lam00, lam01, lam10, lam11)``, i.e. flat index
``2*k1 + k2``.  ``K1 = X_A Z_B`` has eigenvalue ``(-1)**k1`` and
``K2 = Z_A X_B`` has eigenvalue ``(-1)**k2``.

Single-qubit Paulis act on the index by XOR with a fixed shift:

    ========  =========  =========
    Pauli     on A       on B
    ========  =========  =========
    X         (0, 1)     (1, 0)
    Y         (1, 1)     (1, 1)
    Z         (1, 0)     (0, 1)
    ========  =========  =========

These shifts are checked against the dense simulator in
``tests/test_conventions.py``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidStateError

SIMPLEX_TOL = 1e-12

# Bell flat-index XOR shift for (I, X, Y, Z) on qubit A and on qubit B.
PAULI_SHIFT_A = (0b00, 0b01, 0b11, 0b10)
PAULI_SHIFT_B = (0b00, 0b10, 0b11, 0b01)


def normalize_simplex(weights, tol: float = SIMPLEX_TOL, name: str = "weights") -> np.ndarray:
    """Validate a probability vector, silently fixing drift below ``tol``.

    Negative entries of size below ``tol`` are clipped to zero and the
    vector is rescaled to unit sum.  Anything worse raises
    :class:`InvalidStateError`.
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 1 or not np.all(np.isfinite(w)):
        raise InvalidStateError(f"{name} must be a finite 1-d vector")
    if np.any(w < -tol):
        raise InvalidStateError(f"{name} has negative entries: {w.min():.3g}")
    total = w.sum()
    if abs(total - 1.0) > tol:
        raise InvalidStateError(f"{name} sum to {total!r}, not 1")
    w = np.clip(w, 0.0, None)
    if abs(w.sum() - 1.0) > 8 * np.finfo(float).eps:
        w /= w.sum()
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class BellDiagonal:
    """Two-qubit state diagonal in the Bell basis."""

    lam: np.ndarray

    def __post_init__(self):
        lam = normalize_simplex(self.lam, name="Bell weights")
        if lam.shape != (4,):
            raise InvalidStateError("a Bell-diagonal state has exactly 4 weights")
        object.__setattr__(self, "lam", lam)

    @property
    def fidelity(self) -> float:
        return float(self.lam[0])

    def as_matrix(self) -> np.ndarray:
        """Dense 4x4 density matrix in the computational basis."""
        basis = bell_basis()
        return (basis * self.lam) @ basis.conj().T

    def __iter__(self):
        return iter(self.lam.tolist())

    def __repr__(self):
        return "BellDiagonal(" + ", ".join(f"{v:.6g}" for v in self.lam) + ")"


def as_bell(state) -> BellDiagonal:
    if isinstance(state, BellDiagonal):
        return state
    return BellDiagonal(np.asarray(state, dtype=float))


@dataclass(frozen=True)
class WernerParam:
    """Werner state ``x |Phi_00><Phi_00| + (1 - x) 1/4``."""

    x: float

    def __post_init__(self):
        if not (-1.0 / 3.0 - SIMPLEX_TOL <= self.x <= 1.0 + SIMPLEX_TOL):
            raise InvalidStateError(f"Werner parameter x={self.x} outside [-1/3, 1]")

    @property
    def fidelity(self) -> float:
        return (3.0 * self.x + 1.0) / 4.0

    @classmethod
    def from_fidelity(cls, F: float) -> "WernerParam":
        return cls((4.0 * F - 1.0) / 3.0)

    def to_bell(self) -> BellDiagonal:
        return werner_from_fidelity(min(max(self.fidelity, 0.0), 1.0))


@dataclass(frozen=True)
class PauliChannel:
    """Pauli-diagonal channel ``rho -> sum_k p_k s_k rho s_k`` over (I, X, Y, Z)."""

    p: np.ndarray

    def __post_init__(self):
        p = normalize_simplex(self.p, name="Pauli probabilities")
        if p.shape != (4,):
            raise InvalidStateError("a Pauli channel has exactly 4 probabilities")
        object.__setattr__(self, "p", p)

    @classmethod
    def identity(cls) -> "PauliChannel":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def depolarizing(cls, p: float) -> "PauliChannel":
        """``p rho + (1 - p)/4 sum_j s_j rho s_j``; ``p`` is the reliability."""
        _check_unit(p, "p")
        q = (1.0 - p) / 4.0
        return cls(np.array([p + q, q, q, q]))

    @classmethod
    def dephasing(cls, p: float) -> "PauliChannel":
        _check_unit(p, "p")
        return cls(np.array([(1.0 + p) / 2.0, 0.0, 0.0, (1.0 - p) / 2.0]))

    @classmethod
    def bitflip(cls, p: float) -> "PauliChannel":
        _check_unit(p, "p")
        return cls(np.array([(1.0 + p) / 2.0, (1.0 - p) / 2.0, 0.0, 0.0]))

    @property
    def is_identity(self) -> bool:
        return self.p[0] == 1.0


class NoiseKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    BITFLIP = "bitflip"


@dataclass(frozen=True)
class GateNoiseModel:
    """Noisy two-qubit gate: local channel on each qubit, then the ideal gate.

    ``p`` is the reliability of the per-qubit channel (``p = 1`` is noiseless).
    ``meas_eta`` is the probability that a measurement outcome is reported
    correctly; ``None`` means perfect measurements.
    """

    kind: NoiseKind = NoiseKind.DEPOLARIZING
    p: float = 1.0
    meas_eta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        _check_unit(self.p, "p")
        if self.meas_eta is not None and not (0.5 <= self.meas_eta <= 1.0):
            raise ValueError(f"meas_eta={self.meas_eta} outside [1/2, 1]")

    @property
    def channel(self) -> PauliChannel:
        return {
            NoiseKind.DEPOLARIZING: PauliChannel.depolarizing,
            NoiseKind.DEPHASING: PauliChannel.dephasing,
            NoiseKind.BITFLIP: PauliChannel.bitflip,
        }[self.kind](self.p)

    @property
    def flip_parity(self) -> float:
        """Probability that the XOR of two reported outcomes is wrong."""
        if self.meas_eta is None:
            return 0.0
        return 2.0 * self.meas_eta * (1.0 - self.meas_eta)

    @property
    def is_noiseless(self) -> bool:
        return self.p == 1.0 and self.flip_parity == 0.0


def depolarizing(p: float, meas_eta: float | None = None) -> GateNoiseModel:
    return GateNoiseModel(NoiseKind.DEPOLARIZING, p, meas_eta)


def _check_unit(p: float, name: str) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name}={p} outside [0, 1]")


def werner_from_fidelity(F: float) -> BellDiagonal:
    if not (0.0 <= F <= 1.0):
        raise InvalidStateError(f"fidelity F={F} outside [0, 1]")
    e = (1.0 - F) / 3.0
    return BellDiagonal(np.array([F, e, e, e]))


def werner_twirl(state) -> BellDiagonal:
    """Equalize the three non-target weights, keeping ``lam00`` fixed."""
    s = as_bell(state)
    e = (1.0 - s.lam[0]) / 3.0
    return BellDiagonal(np.array([s.lam[0], e, e, e]))


def bell_basis() -> np.ndarray:
    """Columns are ``|Phi_00>, |Phi_01>, |Phi_10>, |Phi_11>``."""
    zero = np.array([1.0, 0.0])
    one = np.array([0.0, 1.0])
    plus = (zero + one) / np.sqrt(2)
    minus = (zero - one) / np.sqrt(2)
    phi00 = (np.kron(zero, plus) + np.kron(one, minus)) / np.sqrt(2)
    z = np.diag([1.0, -1.0])
    cols = []
    for k1 in (0, 1):
        for k2 in (0, 1):
            op = np.kron(np.linalg.matrix_power(z, k1), np.linalg.matrix_power(z, k2))
            cols.append(op @ phi00)
    return np.array(cols, dtype=complex).T


def bell_twirl(rho) -> BellDiagonal:
    """Diagonal of a 4x4 density matrix in the Bell basis."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidStateError("expected a 4x4 density matrix")
    if not np.allclose(rho, rho.conj().T, atol=SIMPLEX_TOL):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise InvalidStateError("density matrix trace is not 1")
    basis = bell_basis()
    diag = np.real(np.einsum("ik,ij,jk->k", basis.conj(), rho, basis))
    diag = np.where(np.abs(diag) < 1e-14, 0.0, diag)
    return BellDiagonal(diag / diag.sum())


def channel_to_state(ch: PauliChannel) -> BellDiagonal:
    """State obtained by sending qubit B of ``|Phi_00>`` through ``ch``."""
    lam = np.zeros(4)
    for k, shift in enumerate(PAULI_SHIFT_B):
        lam[shift] += ch.p[k]
    return BellDiagonal(lam)


def apply_channel_weights(lam: np.ndarray, ch: PauliChannel, qubit: str) -> np.ndarray:
    """Action of a Pauli channel on qubit ``"A"`` or ``"B"`` of Bell weights.

    Works on arrays of shape ``(..., 4)``.
    """
    shifts = {"A": PAULI_SHIFT_A, "B": PAULI_SHIFT_B}[qubit]
    idx = np.arange(4)
    out = np.zeros_like(lam)
    for k, shift in enumerate(shifts):
        if ch.p[k]:
            out = out + ch.p[k] * lam[..., idx ^ shift]
    return out


def xlog2x(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


def entropy(state) -> float:
    """Von Neumann entropy in bits."""
    return float(-xlog2x(as_bell(state).lam).sum())


def s_of_F(F: float) -> float:
    """Entropy of the Werner state with fidelity ``F``."""
    if not (0.0 <= F <= 1.0):
        raise ValueError(f"F={F} outside [0, 1]")
    return float(-xlog2x(F) - 3.0 * xlog2x((1.0 - F) / 3.0))
