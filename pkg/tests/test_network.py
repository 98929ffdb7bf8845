import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltddm.datasets import synth_fixed_interval, synth_on_off, synth_two_interval
from ltddm.exceptions import DimensionMismatch
from ltddm.network import (LtddmNetwork, NetworkConfig, TrainTrace, detect_convergence,
                           first_zero_epoch, teacher_inputs)
from ltddm.units import ON


def bias_net(L=None, pulse=True, T=200, eta=1.0, epochs=5):
    cfg = NetworkConfig(n_inputs=0, n_hidden=0, eta=eta, epochs=epochs, pulse_outputs=pulse)
    net = LtddmNetwork.build(cfg, T)
    if L is not None:
        net.outputs[0].off_bank.w[:] = 1.0 / L
        net.outputs[0].on_bank.w[:] = 1.0
    return net


def test_config_validation():
    assert NetworkConfig(n_inputs=2, n_outputs=3).n_hidden == 3
    for kw in ({"n_outputs": 0}, {"n_hidden": -1}, {"eta": 0}, {"eta": 1.5}, {"tau": 0}, {"epochs": -1}):
        with pytest.raises(ValueError):
            NetworkConfig(n_inputs=1, **kw)


def test_wiring_and_shapes():
    net = LtddmNetwork.build(NetworkConfig(n_inputs=2, n_outputs=2, n_hidden=3), 50)
    assert net.wiring == ["bias", "in0", "in1", "h0", "h1", "h2"]
    assert all(h.n == 3 for h in net.hidden)
    assert all(o.n == 6 for o in net.outputs)
    assert net.outputs[0].off_bank.w[0] == pytest.approx(1 / (6 * 50))
    with pytest.raises(DimensionMismatch):
        LtddmNetwork(net.config, net.hidden[:2], net.outputs)


def test_teacher_inputs():
    assert teacher_inputs([1, 0, 1]).tolist() == [[0], [1], [0]]


def test_zero_weight_network_is_silent():
    net = bias_net(pulse=False)
    for u in net.outputs:
        u.off_bank.w[:] = 1e-8
    assert net.free_run(np.zeros((500, 0))).sum() == 0


def test_forward_step_periodic_output():
    net = bias_net(L=10)
    net.restart()
    fired = [t for t in range(50) if net.forward_step(np.zeros(0), t)[0] == ON]
    assert fired == [9, 19, 29, 39, 49]


def test_forward_step_dimension_check():
    net = bias_net()
    with pytest.raises(DimensionMismatch):
        net.forward_step([1], 0)


def test_hidden_feeds_output_accumulation():
    cfg = NetworkConfig(n_inputs=1, n_hidden=1)
    net = LtddmNetwork.build(cfg, 100)
    h, o = net.hidden[0], net.outputs[0]
    h.off_bank.w[:] = [1e-8, 1.0]      # hidden turns ON on the first input event
    h.on_bank.w[:] = [1e-8, 1e-8]
    o.off_bank.w[:] = [1e-8, 1e-8, 1 / 4]
    X = np.zeros((30, 1), dtype=int)
    X[5] = 1
    out, hid = net.free_run(X, return_hidden=True)
    h_on = int(np.flatnonzero(hid[:, 0])[0])
    assert h_on == 5
    # the hidden state reaches the output on the same step, so the fourth
    # accumulation happens three steps after the hidden onset
    assert int(np.flatnonzero(out[:, 0])[0]) == h_on + 3


def test_clamping_soundness():
    y = synth_on_off(3, 5, 80)[:, None]
    X = teacher_inputs(y)
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=1), 80)
    net.set_cap(80)
    net.restart()
    for t in range(80):
        net.clamped_step(X[t], t, y[t], 0.1)
        assert net.outputs[0].state == y[t, 0]


def test_pulse_clamping_matches_events():
    y = synth_fixed_interval(7, 70)[:, None]
    net = bias_net(T=70)
    net.restart()
    for t in range(70):
        net.clamped_step(np.zeros(0), t, y[t], 0.5)
        assert net.outputs[0].state == y[t, 0]


def test_fixed_interval_learned_in_one_epoch():
    y = synth_fixed_interval(10, 200)[:, None]
    net = bias_net(T=200, eta=1.0)
    trace = net.fit(y, np.zeros((200, 0)), epochs=3)
    assert trace.initial_ste > 0
    assert trace.ste == [0.0, 0.0, 0.0]
    assert trace.epochs_to_zero == 1
    assert net.free_run(np.zeros((50, 0)))[:, 0].nonzero()[0].tolist() == [9, 19, 29, 39, 49]


def test_on_off_target_learned():
    y = synth_on_off(4, 8, 240)[:, None]
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=0, eta=0.1), 240)
    trace = net.fit(y, teacher_inputs(y), epochs=12)
    assert trace.epochs_to_zero is not None and trace.epochs_to_zero <= 10


def test_converged_network_is_fixed_point():
    y = synth_on_off(4, 8, 240)[:, None]
    X = teacher_inputs(y)
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=0, eta=1.0), 240)
    net.fit(y, X, epochs=3)
    w = [b.w.copy() for b in (net.outputs[0].off_bank, net.outputs[0].on_bank)]
    assert net.train_epoch(y, X) == 0.0
    for before, b in zip(w, (net.outputs[0].off_bank, net.outputs[0].on_bank)):
        np.testing.assert_allclose(b.w, before, rtol=1e-12)


def test_ideal_hidden_solution_is_stable():
    # hand-built solution for the two-interval target: the hidden unit spans each event pair
    y = synth_two_interval(2, 4, 10, 360)[:, None]
    X = teacher_inputs(y)
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=1, eta=0.1), 360)
    h, o = net.hidden[0], net.outputs[0]
    h.off_bank.w[:] = [0.1, 1e-8]
    h.on_bank.w[:] = [1 / 8, 1e-8]
    o.off_bank.w[:] = [1 / 12, 1e-8, 1 / 6]
    o.on_bank.w[:] = [0.25, 0.25, 1e-8]
    trace = net.fit(y, X, epochs=5)
    assert trace.initial_ste == 0.0
    assert trace.ste == [0.0] * 5


def test_determinism():
    y = synth_two_interval(1, 2, 5, 100)[:, None]
    X = teacher_inputs(y)
    runs = []
    for _ in range(2):
        net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=1, epochs=10), 100)
        tr = net.fit(y, X)
        runs.append((tr.ste, [b.w.tolist() for u in net.hidden + net.outputs
                              for b in (u.off_bank, u.on_bank)]))
    assert runs[0] == runs[1]


def test_free_run_does_not_touch_weights():
    y = synth_on_off(2, 3, 50)[:, None]
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1), 50)
    before = net.outputs[0].off_bank.w.copy()
    net.free_run(teacher_inputs(y))
    assert net.outputs[0].off_bank.w.tolist() == before.tolist()


def test_autoregressive_matches_teacher_on_converged_model():
    y = synth_on_off(4, 8, 240)[:, None]
    X = teacher_inputs(y)
    net = LtddmNetwork.build(NetworkConfig(n_inputs=1, n_hidden=0, eta=1.0), 240)
    net.fit(y, X, epochs=3)
    teacher = net.free_run(X)
    auto = net.free_run(n_steps=240, autoregressive=True)
    assert teacher.tolist() == auto.tolist() == y.tolist()


def test_autoregressive_needs_square_network():
    net = LtddmNetwork.build(NetworkConfig(n_inputs=2, n_outputs=1), 10)
    with pytest.raises(DimensionMismatch):
        net.free_run(n_steps=5, autoregressive=True)


@pytest.mark.parametrize("trace, expected", [
    ([100, 4, 0, 0, 0, 0, 0], 2),
    ([5, 5, 5, 5, 5, 5, 5], 0),
    ([1, 2, 4, 8, 16, 32, 64, 128], None),
    ([7], 0),
])
def test_detect_convergence(trace, expected):
    assert detect_convergence(trace, 0.01, 5) == expected


def test_detect_convergence_truncates_at_end():
    assert detect_convergence([100, 50, 0, 0], 0.01, 5) == 2
    with pytest.raises(ValueError):
        detect_convergence([])


def test_first_zero_epoch():
    assert first_zero_epoch([3, 1, 0, 0]) == 2
    assert first_zero_epoch([3, 1]) is None


def test_trace_curve():
    tr = TrainTrace(ste=[4.0, 0.0], initial_ste=9.0)
    assert tr.curve == [9.0, 4.0, 0.0]
    assert tr.epochs_to_zero == 2
    assert len(tr) == 2


@settings(max_examples=25)
@given(st.integers(3, 30), st.integers(2, 6))
def test_timescale_invariance_unit_level(L, k):
    # eta=1: one clamped correction fixes the period regardless of L
    y = synth_fixed_interval(L, k * L + 1)[:, None]
    net = bias_net(T=len(y), eta=1.0)
    tr = net.fit(y, np.zeros((len(y), 0)), epochs=1)
    assert tr.ste == [0.0]
