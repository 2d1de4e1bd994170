"""Dense density-matrix simulator used to certify the closed-form maps.

Qubit 0 is the most significant tensor factor.  For protocols on several
copies the ordering is copy-major, party-minor: copy ``c`` of an
``n``-party state occupies qubits ``c*n .. c*n + n - 1``.

Nothing here knows about index algebra on weights; states are built from
state vectors and read back by projecting onto basis vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graphs import Graph
from .states import PauliChannel

MAX_QUBITS = 12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (I2, X, Y, Z)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# Eigenvectors |0>, |1> of each measurement basis.
_BASIS_VECTORS = {
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "x": (np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2)),
}


class OracleError(ValueError):
    pass


class DensityMatrix:
    """Dense ``2**n x 2**n`` density matrix.

    Instances are treated as immutable; every operation returns a new one.
    """

    __slots__ = ("data", "n")

    def __init__(self, data, check: bool = True):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise OracleError("density matrix must be square")
        n = int(round(np.log2(data.shape[0])))
        if 2**n != data.shape[0]:
            raise OracleError("dimension must be a power of two")
        if n > MAX_QUBITS:
            raise OracleError(f"{n} qubits exceeds the oracle limit of {MAX_QUBITS}")
        if check:
            if not np.allclose(data, data.conj().T, atol=1e-12):
                raise OracleError("matrix is not Hermitian")
            if abs(np.trace(data) - 1) > 1e-12:
                raise OracleError(f"trace {np.trace(data).real!r} is not 1")
            if np.linalg.eigvalsh(data).min() < -1e-10:
                raise OracleError("matrix is not positive semidefinite")
        data.setflags(write=False)
        self.data = data
        self.n = n

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis_state(cls, bits: str) -> "DensityMatrix":
        psi = np.zeros(2 ** len(bits), dtype=complex)
        psi[int(bits, 2)] = 1
        return cls.from_vector(psi)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n) / 2**n)

    def __matmul__(self, other):
        # tensor product, so `a @ b` reads left-to-right in qubit order
        return DensityMatrix(np.kron(self.data, other.data), check=False)


@dataclass
class MeasurementRecord:
    outcomes: list = field(default_factory=list)  # (qubit, basis, result)
    probability: float = 1.0

    def __post_init__(self):
        if not (-1e-12 <= self.probability <= 1 + 1e-12):
            raise OracleError(f"probability {self.probability} outside [0, 1]")


def _raw(rho) -> np.ndarray:
    return rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _nqubits(a: np.ndarray) -> int:
    return int(round(np.log2(a.shape[0])))


def _check_qubits(n: int, qubits) -> None:
    for q in qubits:
        if not (0 <= q < n):
            raise OracleError(f"qubit {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise OracleError("repeated qubit index")


def _apply_left(a: np.ndarray, op: np.ndarray, qubits, n: int) -> np.ndarray:
    """``op`` acting on row indices at ``qubits`` of a ``(2,)*2n`` tensor."""
    k = len(qubits)
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, a, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def conjugate(rho, op: np.ndarray, qubits) -> np.ndarray:
    """``op rho op^dagger`` with ``op`` on ``qubits``; returns a raw array."""
    a = _raw(rho)
    n = _nqubits(a)
    qubits = list(qubits)
    _check_qubits(n, qubits)
    t = a.reshape((2,) * (2 * n))
    t = _apply_left(t, op, qubits, n)
    t = _apply_left(t, op.conj(), [q + n for q in qubits], n)
    return t.reshape(a.shape)


def apply_unitary(rho, U, qubits) -> DensityMatrix:
    return DensityMatrix(conjugate(rho, np.asarray(U, dtype=complex), qubits), check=False)


def apply_cnot(rho, control: int, target: int) -> DensityMatrix:
    return apply_unitary(rho, CNOT, [control, target])


def apply_pauli_channel(rho, qubit: int, ch: PauliChannel) -> DensityMatrix:
    a = _raw(rho)
    _check_qubits(_nqubits(a), [qubit])
    out = np.zeros_like(a)
    for pk, sigma in zip(ch.p, PAULIS):
        if pk:
            out = out + pk * conjugate(a, sigma, [qubit])
    return DensityMatrix(out, check=False)


def project(rho, qubit: int, basis: str, result: int) -> np.ndarray:
    """Unnormalized post-measurement matrix for one outcome."""
    v = _BASIS_VECTORS[basis][result]
    return conjugate(rho, np.outer(v, v.conj()), [qubit])


def measure(rho, qubit: int, basis: str, result: int) -> tuple[DensityMatrix, float]:
    """Postselect outcome ``result`` of a ``basis`` in {"x", "z"} measurement."""
    if basis not in _BASIS_VECTORS:
        raise OracleError(f"unknown basis {basis!r}")
    branch = project(rho, qubit, basis, result)
    prob = float(np.real(np.trace(branch)))
    if prob < 1e-15:
        raise OracleError("postselected outcome has zero probability")
    return DensityMatrix(branch / prob, check=False), prob


def measure_pattern(rho, qubits, bases, results) -> np.ndarray:
    a = _raw(rho)
    for q, b, r in zip(qubits, bases, results):
        a = project(a, q, b, r)
    return a


def partial_trace(rho, keep) -> np.ndarray:
    a = _raw(rho)
    n = _nqubits(a)
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = a.reshape((2,) * (2 * n))
    for q in sorted(drop, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + t.ndim // 2)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def pauli_operator(paulis: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as ``"XZI"``."""
    table = {"I": I2, "X": X, "Y": Y, "Z": Z}
    out = np.array([[1.0 + 0j]])
    for c in paulis:
        out = np.kron(out, table[c])
    return out


def expectation(rho, paulis: str) -> float:
    return float(np.real(np.trace(_raw(rho) @ pauli_operator(paulis))))


# -- graph states ---------------------------------------------------------


def graph_state_vector(g: Graph) -> np.ndarray:
    """Controlled-phase circuit on ``|+>^n``."""
    if g.n > MAX_QUBITS:
        raise OracleError(f"graph with {g.n} vertices exceeds the oracle limit")
    psi = np.full(2**g.n, 1 / np.sqrt(2**g.n), dtype=complex)
    bits = (np.arange(2**g.n)[:, None] >> (g.n - 1 - np.arange(g.n))) & 1
    for u, v in g.edges:
        psi = psi * (1 - 2 * (bits[:, u] & bits[:, v]))
    return psi


def build_graph_state(g: Graph) -> DensityMatrix:
    return DensityMatrix.from_vector(graph_state_vector(g))


@lru_cache(maxsize=64)
def graph_basis(g: Graph) -> np.ndarray:
    """Columns ``|Phi_mu> = prod_i Z_i^mu_i |G>``, column ``mu`` little-endian (bit i <-> vertex i).

    Cached per graph; the returned array is read-only.
    """
    psi = graph_state_vector(g)
    bits = (np.arange(2**g.n)[:, None] >> (g.n - 1 - np.arange(g.n))) & 1
    cols = np.empty((2**g.n, 2**g.n), dtype=complex)
    for mu in range(2**g.n):
        mu_bits = (mu >> np.arange(g.n)) & 1
        sign = 1 - 2 * ((bits @ mu_bits) & 1)
        cols[:, mu] = sign * psi
    cols.setflags(write=False)
    return cols


def graph_diagonal_matrix(g: Graph, lam) -> np.ndarray:
    basis = graph_basis(g)
    return (basis * np.asarray(lam, dtype=float)) @ basis.conj().T


def graph_weights(g: Graph, rho) -> np.ndarray:
    """Diagonal of ``rho`` in the graph-state basis of ``g``."""
    basis = graph_basis(g)
    return np.real(np.einsum("ik,ij,jk->k", basis.conj(), _raw(rho), basis))


def graph_offdiagonal_norm(g: Graph, rho) -> float:
    basis = graph_basis(g)
    m = basis.conj().T @ _raw(rho) @ basis
    return float(np.abs(m - np.diag(np.diag(m))).max())


def correlation_expectations(g: Graph, rho) -> list[float]:
    out = []
    for j in range(g.n):
        s = ["I"] * g.n
        s[j] = "X"
        for k in g.neighbors(j):
            s[k] = "Z"
        out.append(expectation(rho, "".join(s)))
    return out
