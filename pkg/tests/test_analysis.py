import numpy as np
import pytest

from purify import analysis as an
from purify import bipartite as bp
from purify.graphs import Graph
from purify.states import WernerParam, depolarizing, werner_from_fidelity


def test_identity_map_converges_immediately():
    traj = an.iterate_to_fixed_point(lambda s: s, np.array([0.3]))
    assert traj.status is an.Status.CONVERGED and len(traj.iterates) == 2


def test_oscillation_detected():
    traj = an.iterate_to_fixed_point(lambda s: -s, np.array([0.3]))
    assert traj.status is an.Status.OSCILLATING


def test_divergence_detected():
    traj = an.iterate_to_fixed_point(lambda s: s * np.inf, np.array([0.3]))
    assert traj.status is an.Status.DIVERGED


def test_noiseless_bbpssw_converges_to_one():
    traj = an.iterate_to_fixed_point(lambda s: bp.bbpssw_step(s), werner_from_fidelity(0.6))
    assert traj.converged and traj.fixed_point.fidelity == pytest.approx(1.0, abs=1e-10)
    assert len(traj.p_success) == len(traj.iterates) - 1


def test_noisy_bbpssw_fixed_point_is_upper_branch():
    nz = depolarizing(0.98)
    traj = an.iterate_to_fixed_point(lambda x: bp.bbpssw_step_noisy(x, nz), WernerParam(0.6 * 4 / 3 - 1 / 3))
    assert traj.fixed_point.x == pytest.approx(bp.bbpssw_fixed_points(0.98)[1], abs=1e-6)


def test_bbpssw_ranges():
    r = an.purification_range("bbpssw", 1.0)
    assert (r.F_min, r.F_max) == pytest.approx((0.5, 1.0))
    r = an.purification_range("bbpssw", 0.98)
    assert (r.F_min, r.F_max) == pytest.approx((0.575016, 0.924984), abs=1e-4)
    num = an.purification_range("bbpssw", 0.98, method="numeric")
    assert (num.F_min, num.F_max) == pytest.approx((r.F_min, r.F_max), abs=1e-5)
    empty = an.purification_range("bbpssw", 0.95)
    assert not empty.exists and empty.width == 0.0 and np.isnan(empty.F_min)


def test_dejmps_range_contains_bbpssw():
    rb = an.purification_range("bbpssw", 0.99)
    rd = an.purification_range("dejmps", 0.99)
    assert rd.contains(rb) and rd.width > rb.width


def test_graph_range_noiseless_line4():
    r = an.purification_range("graph", 1.0, resolution=100, graph=Graph.line(4))
    assert r.F_max == pytest.approx(1.0, abs=1e-9)
    assert 0.0 < r.F_min < 0.5


def test_bipartite_thresholds():
    tb = an.threshold_p("bbpssw")
    assert tb == pytest.approx(0.9628, abs=5e-4)
    assert tb == pytest.approx(bp.BBPSSW_P_MIN, abs=1e-5)
    assert an.threshold_p("dejmps") < tb


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ghz_toy_threshold_bisection(n):
    from purify.multipartite import ghz_toy_threshold

    assert an.threshold_p("ghz-toy", n=n) == pytest.approx(ghz_toy_threshold(n), abs=1e-3)


def test_yield_edge_cases():
    w = werner_from_fidelity(0.95)
    assert an.yield_at_target("dejmps", w, 0.9) == 1.0
    assert an.yield_at_target("bbpssw", w, 0.99, depolarizing(0.98)) == 0.0


def test_yield_value_and_monte_carlo():
    w = werner_from_fidelity(0.7)
    y = an.yield_at_target("dejmps", w, 0.99)
    assert y == pytest.approx(0.0088741, abs=1e-7)
    mc = an.yield_monte_carlo("dejmps", w, 0.99, trials=40, seed=1)
    assert abs(mc.mean - y) < 3 * mc.stderr
    assert mc == an.yield_monte_carlo("dejmps", w, 0.99, trials=40, seed=1)
