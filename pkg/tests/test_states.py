import numpy as np
import pytest

from purify import replay
from purify.errors import InvalidStateError
from purify.states import (
    BellDiagonal,
    GateNoiseModel,
    PauliChannel,
    WernerParam,
    apply_channel_weights,
    bell_twirl,
    channel_to_state,
    entropy,
    s_of_F,
    werner_from_fidelity,
    werner_twirl,
)


def test_werner_from_fidelity():
    np.testing.assert_allclose(werner_from_fidelity(1.0).lam, [1, 0, 0, 0])
    np.testing.assert_allclose(werner_from_fidelity(0.25).lam, [0.25] * 4)
    np.testing.assert_allclose(werner_from_fidelity(0.75).lam, [0.75, 1 / 12, 1 / 12, 1 / 12], atol=1e-15)


def test_werner_state_trace_and_fidelity_in_oracle():
    rho = replay.bell_matrix(werner_from_fidelity(0.75).lam)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert bell_twirl(rho).fidelity == pytest.approx(0.75, abs=1e-12)


def test_werner_param_round_trip():
    w = WernerParam.from_fidelity(0.8)
    assert w.x == pytest.approx(0.8 * 4 / 3 - 1 / 3)
    assert w.fidelity == pytest.approx(0.8)
    with pytest.raises(InvalidStateError):
        WernerParam(1.5)


def test_werner_twirl():
    np.testing.assert_allclose(werner_twirl([0.7, 0.2, 0.1, 0.0]).lam, [0.7, 0.1, 0.1, 0.1])
    np.testing.assert_allclose(werner_twirl([1, 0, 0, 0]).lam, [1, 0, 0, 0])
    np.testing.assert_allclose(werner_twirl([0.25] * 4).lam, [0.25] * 4)


def test_bell_twirl_corners():
    np.testing.assert_allclose(bell_twirl(replay.bell_matrix([1, 0, 0, 0])).lam, [1, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(bell_twirl(np.eye(4) / 4).lam, [0.25] * 4, atol=1e-12)


def test_one_sided_dephasing_matches_oracle():
    ch = PauliChannel.dephasing(0.9)
    lam = apply_channel_weights(np.array([1.0, 0, 0, 0]), ch, "B")
    np.testing.assert_allclose(lam, replay.replay_channel_to_state(ch), atol=1e-12)
    np.testing.assert_allclose(lam, [0.95, 0.05, 0, 0], atol=1e-15)


def test_channel_to_state():
    np.testing.assert_allclose(channel_to_state(PauliChannel.identity()).lam, [1, 0, 0, 0])
    dep = PauliChannel([0.9, 1 / 30, 1 / 30, 1 / 30])
    np.testing.assert_allclose(channel_to_state(dep).lam, replay.replay_channel_to_state(dep), atol=1e-12)
    assert channel_to_state(dep).fidelity == pytest.approx(0.9)
    z = PauliChannel([0, 0, 0, 1])
    np.testing.assert_allclose(replay.replay_channel_to_state(z), [0, 1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(channel_to_state(z).lam, [0, 1, 0, 0])


def test_entropy():
    assert entropy([1, 0, 0, 0]) == 0.0
    assert entropy([0.25] * 4) == pytest.approx(2.0)
    assert entropy(werner_from_fidelity(0.9)) == pytest.approx(0.627492, abs=1e-6)
    assert s_of_F(1.0) == 0.0
    assert s_of_F(0.25) == pytest.approx(2.0)
    assert s_of_F(0.8107) == pytest.approx(1.0, abs=1e-3)


def test_invalid_inputs_rejected():
    with pytest.raises(InvalidStateError):
        BellDiagonal([0.5, 0.5, 0.5, -0.5])
    with pytest.raises(InvalidStateError):
        BellDiagonal([0.5, 0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        GateNoiseModel("depolarizing", 1.2)
    with pytest.raises(ValueError):
        GateNoiseModel("depolarizing", 0.9, meas_eta=0.3)
    with pytest.raises(ValueError):
        GateNoiseModel("amplitude", 0.9)


def test_measurement_flip_parity():
    assert GateNoiseModel("depolarizing", 1.0, 0.9).flip_parity == pytest.approx(0.18)
    assert GateNoiseModel("depolarizing", 1.0).is_noiseless
