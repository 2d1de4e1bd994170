"""Gate-level replays of every protocol step on the dense simulator.

Each replay builds the input density matrices from basis state vectors,
applies the protocol's gates, channels and measurements literally, sums the
accepted branches, and reads the surviving copy back in its basis.  The
result is ``(weights, p_success)`` to be compared against the closed-form
maps in :mod:`purify.bipartite` and :mod:`purify.multipartite`.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import oracle as o
from .graphs import Graph
from .states import GateNoiseModel, PauliChannel

PAIR = Graph.line(2)

# Bell flat index 2*k1 + k2  <->  two-vertex graph index k1 + 2*k2
_BELL_TO_GRAPH = np.array([0, 2, 1, 3])


def bell_matrix(lam) -> np.ndarray:
    """Dense Bell-diagonal matrix built from the two-vertex graph basis."""
    g_lam = np.zeros(4)
    g_lam[_BELL_TO_GRAPH] = np.asarray(lam, dtype=float)
    return o.graph_diagonal_matrix(PAIR, g_lam)


def bell_weights(rho) -> np.ndarray:
    return o.graph_weights(PAIR, rho)[_BELL_TO_GRAPH]


def _apply_noise(rho, qubits, noise: GateNoiseModel | None):
    if noise is None or noise.p == 1.0:
        return rho
    ch = noise.channel
    for q in qubits:
        rho = o.apply_pauli_channel(rho, q, ch).data
    return rho


def _finish(accepted: np.ndarray, keep) -> tuple[np.ndarray, float]:
    reduced = o.partial_trace(accepted, keep)
    p = float(np.real(np.trace(reduced)))
    return reduced / p, p


def replay_channel_to_state(ch: PauliChannel) -> np.ndarray:
    rho = o.apply_pauli_channel(bell_matrix([1, 0, 0, 0]), 1, ch)
    return bell_weights(rho)


def replay_recurrence(a, b, *, basis_change: bool = False, noise: GateNoiseModel | None = None):
    """Bilateral CNOT step on pair 1 = (A1, B1), pair 2 = (A2, B2).

    Qubits: A1=0, B1=1, A2=2, B2=3.  ``basis_change`` adds the local
    rotations that turn the BBPSSW step into the DEJMPS step.
    """
    rho = np.kron(bell_matrix(a), bell_matrix(b))
    if basis_change:
        ua = (o.I2 - 1j * o.X) / np.sqrt(2)
        ub = (o.I2 + 1j * o.Z) / np.sqrt(2)
        for q, u in ((0, ua), (2, ua), (1, ub), (3, ub)):
            rho = o.conjugate(rho, u, [q])
    rho = _apply_noise(rho, [0, 1, 2, 3], noise)
    rho = o.conjugate(rho, o.CNOT, [0, 2])  # A1 -> A2
    rho = o.conjugate(rho, o.CNOT, [3, 1])  # B2 -> B1
    flip = noise.flip_parity if noise is not None else 0.0
    accepted = np.zeros_like(rho)
    for zeta, xi in itertools.product((0, 1), repeat=2):
        branch = o.measure_pattern(rho, [2, 3], ["z", "x"], [zeta, xi])
        weight = (1.0 - flip) if zeta == xi else flip
        if weight:
            accepted = accepted + weight * branch
    out, p = _finish(accepted, [0, 1])
    return bell_weights(out), p


def replay_filter(F: float, eps: float) -> tuple[float, float]:
    """Local filter ``sqrt(eps)|0><0| + |1><1|`` on both qubits of
    ``F |Psi+><Psi+| + (1 - F)|00><00|`` (computational basis)."""
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    rho = F * np.outer(psi, psi) + (1 - F) * np.diag([1.0, 0, 0, 0])
    op = np.diag([np.sqrt(eps), 1.0]).astype(complex)
    rho = o.conjugate(o.conjugate(rho, op, [0]), op, [1])
    p = float(np.real(np.trace(rho)))
    return float(np.real(psi.conj() @ rho @ psi)) / p, p


def _swap_corrections() -> list[np.ndarray]:
    """Pauli on B that returns each Bell-measurement branch of two perfect pairs to |Phi_00>."""
    rho = np.kron(bell_matrix([1, 0, 0, 0]), bell_matrix([1, 0, 0, 0]))
    basis = o.graph_basis(PAIR)[:, _BELL_TO_GRAPH]
    out = []
    for beta in range(4):
        v = basis[:, beta]
        reduced = o.partial_trace(o.conjugate(rho, np.outer(v, v.conj()), [1, 2]), [0, 3])
        reduced = reduced / np.trace(reduced)
        best = max(o.PAULIS, key=lambda s: bell_weights(o.conjugate(reduced, s, [1]))[0])
        out.append(best)
    return out


def replay_swap(a, b, noise: GateNoiseModel | None = None) -> np.ndarray:
    """Bell measurement on the middle qubits of A-C1 and C2-B, Pauli correction on B."""
    rho = np.kron(bell_matrix(a), bell_matrix(b))
    rho = _apply_noise(rho, [1, 2], noise)
    basis = o.graph_basis(PAIR)[:, _BELL_TO_GRAPH]
    total = np.zeros((4, 4), dtype=complex)
    for beta, corr in enumerate(_swap_corrections()):
        v = basis[:, beta]
        reduced = o.partial_trace(o.conjugate(rho, np.outer(v, v.conj()), [1, 2]), [0, 3])
        total = total + o.conjugate(reduced, corr, [1])
    return bell_weights(total / np.trace(total))


def _two_copy_step(g_first: Graph, first, g_second: Graph, second, into_first, x_measured,
                   accept_graph: Graph, noise, correct_graph: Graph | None = None, postselect=True,
                   corrected=None):
    """Shared machinery for all multilateral two-copy steps.

    ``into_first``: vertices whose CNOT has copy 2 as control, copy 1 as
    target.  All other vertices use copy 1 -> copy 2.  Copy 2 is measured in
    x on ``x_measured`` and z elsewhere.  When ``postselect`` the branch is
    kept only if ``K_i`` of ``accept_graph`` reads +1 for every ``i`` in
    ``x_measured``.  With ``correct_graph``, copy-1 vertex ``a`` in
    ``corrected`` (default: outside ``x_measured``) receives ``Z`` when the
    z outcomes on its ``correct_graph``-neighbours in ``corrected`` have odd
    parity.
    """
    n = g_first.n
    if corrected is None:
        corrected = set(range(n)) - set(x_measured)
    rho = np.kron(o.graph_diagonal_matrix(g_first, first), o.graph_diagonal_matrix(g_second, second))
    rho = _apply_noise(rho, range(2 * n), noise)
    for v in range(n):
        if v in into_first:
            rho = o.conjugate(rho, o.CNOT, [n + v, v])
        else:
            rho = o.conjugate(rho, o.CNOT, [v, n + v])
    bases = ["x" if v in x_measured else "z" for v in range(n)]
    accepted = np.zeros_like(rho)
    for outcome in itertools.product((0, 1), repeat=n):
        if postselect:
            ok = all(
                (outcome[i] + sum(outcome[k] for k in accept_graph.neighbors(i))) % 2 == 0
                for i in x_measured
            )
            if not ok:
                continue
        branch = o.measure_pattern(rho, [n + v for v in range(n)], bases, outcome)
        if correct_graph is not None:
            for a in sorted(corrected):
                par = sum(outcome[k] for k in correct_graph.neighbors(a) if k in corrected) % 2
                if par:
                    branch = o.conjugate(branch, o.Z, [a])
        accepted = accepted + branch
    return _finish(accepted, range(n))


def replay_p1(g: Graph, va, vb, a, b, noise=None):
    """Sub-protocol P1: V_A gates copy 2 -> copy 1, V_B copy 1 -> copy 2;
    copy 2 measured x on V_A, z on V_B; keep if all K_j (j in V_A) are +1."""
    out, p = _two_copy_step(g, a, g, b, set(va), set(va), g, noise)
    return o.graph_weights(g, out), p


def replay_p2(g: Graph, va, vb, a, b, noise=None):
    out, p = _two_copy_step(g, a, g, b, set(vb), set(vb), g, noise)
    return o.graph_weights(g, out), p


def replay_make_gj(g: Graph, g_j: Graph, vj, a, b, variant: str = "purifying", noise=None):
    """Two copies on ``g`` to one copy on ``g_j``; returns weights in the ``g_j`` basis."""
    vj = set(vj)
    if variant == "erase":
        rest = set(range(g.n)) - vj
        out, p = _two_copy_step(g, a, g, b, vj, set(), g, noise, correct_graph=g, postselect=False,
                                corrected=rest)
    elif variant == "purifying":
        out, p = _two_copy_step(g, a, g, b, vj, vj, g, noise, correct_graph=g)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return o.graph_weights(g_j, out), p, o.graph_offdiagonal_norm(g_j, out)


def replay_kcolor_step_ii(g: Graph, g_j: Graph, vj, target, helper, noise=None):
    vj = set(vj)
    out, p = _two_copy_step(g, target, g_j, helper, vj, vj, g_j, noise)
    return o.graph_weights(g, out), p


def replay_pauli_on_weights(g: Graph, lam, qubit: int, ch: PauliChannel) -> np.ndarray:
    rho = o.apply_pauli_channel(o.graph_diagonal_matrix(g, lam), qubit, ch)
    return o.graph_weights(g, rho)
