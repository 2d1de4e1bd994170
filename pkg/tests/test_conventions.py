"""Index conventions checked against the dense simulator."""
import itertools

import numpy as np
import pytest

from purify import oracle as o
from purify import replay
from purify.bipartite import bcnot_weights
from purify.graphs import Graph
from purify.states import PAULI_SHIFT_A, PAULI_SHIFT_B, bell_basis, bell_twirl


def test_phi00_is_two_vertex_graph_state():
    psi = o.graph_state_vector(Graph.line(2))
    assert abs(np.vdot(bell_basis()[:, 0], psi)) == pytest.approx(1.0, abs=1e-12)


def test_bell_basis_is_graph_basis_up_to_reorder():
    g = o.graph_basis(Graph.line(2))[:, replay._BELL_TO_GRAPH]
    overlaps = np.abs(np.einsum("ik,ik->k", bell_basis().conj(), g))
    np.testing.assert_allclose(overlaps, 1.0, atol=1e-12)


@pytest.mark.parametrize("side,shifts", [(0, PAULI_SHIFT_A), (1, PAULI_SHIFT_B)])
def test_pauli_index_shifts(side, shifts):
    phi = np.outer(bell_basis()[:, 0], bell_basis()[:, 0].conj())
    for k, pauli in enumerate(o.PAULIS):
        lam = bell_twirl(o.conjugate(phi, pauli, [side])).lam
        assert lam[shifts[k]] == pytest.approx(1.0, abs=1e-12)


def test_bilateral_cnot_all_sixteen_index_pairs():
    for i, j in itertools.product(range(4), repeat=2):
        a, b = np.eye(4)[i], np.eye(4)[j]
        raw = bcnot_weights(a, b)
        p = raw.sum()
        if p == 0:
            # rejected pair: the dense replay keeps nothing either
            rho = np.kron(replay.bell_matrix(a), replay.bell_matrix(b))
            rho = o.conjugate(o.conjugate(rho, o.CNOT, [0, 2]), o.CNOT, [3, 1])
            kept = sum(o.measure_pattern(rho, [2, 3], ["z", "x"], [z, z]) for z in (0, 1))
            assert np.trace(kept).real == pytest.approx(0.0, abs=1e-12)
            continue
        w, pr = replay.replay_recurrence(a, b)
        np.testing.assert_allclose(raw / p, w, atol=1e-12)
        assert p == pytest.approx(pr, abs=1e-12)
