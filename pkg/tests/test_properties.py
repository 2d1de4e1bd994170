import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from purify import bipartite as bp
from purify import multipartite as mp
from purify.graphs import Graph
from purify.repeater import swap_weights
from purify.states import PauliChannel, apply_channel_weights, depolarizing, werner_from_fidelity


def simplex(dim):
    raw = st.lists(st.floats(0.0, 1.0), min_size=dim, max_size=dim).filter(lambda v: sum(v) > 1e-3)
    return raw.map(lambda v: np.asarray(v) / sum(v))


reliability = st.floats(0.8, 1.0)


@given(simplex(4), simplex(4), reliability)
def test_dejmps_output_is_a_state(a, b, p):
    lam, ps = bp.recurrence_weights(a, b, flip=True, noise=depolarizing(p))
    if ps > 1e-12:
        assert np.all(lam >= -1e-15) and abs(lam.sum() - 1) < 1e-12
    assert -1e-15 <= ps <= 1 + 1e-12


@given(st.floats(0.500001, 0.999999))
def test_bbpssw_noiseless_gain_is_positive(F):
    assert bp.bbpssw_step(F).fidelity > F


@given(st.floats(0.25, 0.499999))
def test_bbpssw_noiseless_below_half_loses(F):
    assert bp.bbpssw_step(F).fidelity <= F + 1e-15


@given(simplex(4), simplex(4))
def test_swap_is_commutative_and_normalized(a, b):
    out = swap_weights(a, b)
    np.testing.assert_allclose(out, swap_weights(b, a), atol=1e-15)
    assert abs(out.sum() - 1) < 1e-12


@given(simplex(4), simplex(4), st.sampled_from("AB"))
def test_pauli_channel_preserves_trace(lam, ch, side):
    out = apply_channel_weights(lam, PauliChannel(ch), side)
    assert abs(out.sum() - 1) < 1e-12 and np.all(out >= 0)


@settings(max_examples=30, deadline=None)
@given(simplex(16), simplex(16), reliability, st.sampled_from([1, 2]))
def test_p_steps_output_is_a_state(a, b, p, which):
    g = Graph.line(4)
    lam, ps = mp.p_step_weights(g, a, b, which, depolarizing(p))
    if ps > 1e-12:
        assert np.all(lam >= -1e-15) and abs(lam.sum() - 1) < 1e-12
    assert 0 <= ps <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(simplex(8), st.integers(0, 2))
def test_erase_variant_always_succeeds(lam, j):
    s = mp.GraphDiagonalState(Graph.complete(3), lam)
    assert abs(mp.make_gj_state(s, s, j, "erase").p_success - 1.0) < 1e-12


@given(st.floats(0.5, 1.0), st.integers(1, 6))
def test_pump_trajectory_is_valid(F, rounds):
    w = werner_from_fidelity(F)
    res = bp.pump(w, rounds)
    assert all(0 <= f <= 1 for f in res.fidelities)
    assert all(0 < p <= 1 for p in res.p_success)
