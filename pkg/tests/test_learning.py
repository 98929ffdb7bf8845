import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ltddm import learning as L
from ltddm.exceptions import DegenerateWindow, DimensionMismatch, ZeroAccumulator
from ltddm.units import OFF, ON, BistableUnit
from oracles import finite_diff, iterate_interval_updates

positive = st.floats(1e-3, 10.0)


@pytest.mark.parametrize("a1, g, expected", [(10, 0, 1.0), (10, 2, 0.8), (10, -5, 1.5)])
def test_lambda_scale(a1, g, expected):
    assert L.lambda_scale(a1, g) == pytest.approx(expected)


def test_lambda_scale_floor_and_degenerate():
    assert L.lambda_scale(10, 50) == L.LAMBDA_FLOOR
    with pytest.raises(DegenerateWindow):
        L.lambda_scale(0, 1)


def test_grad_w_examples():
    w, a = np.array([0.5, 0.5]), np.array([2.0, 2.0])
    g = L.grad_w(w, a, 1.0)
    assert g.tolist() == [0.25, 0.25]
    assert np.dot(w - g, a) == 1.0
    assert L.grad_w([0.5, 0.5], [1, 1], 1.0).tolist() == [0.0, 0.0]
    assert L.grad_w([1.0, 0.0], [0, 3], 1.0) == pytest.approx([0, -1 / 3])


def test_grad_w_errors():
    with pytest.raises(ZeroAccumulator):
        L.grad_w([0.5], [0], 1.0)
    with pytest.raises(DimensionMismatch):
        L.grad_w([0.5, 0.5], [1], 1.0)


def test_grad_a_examples():
    w = np.array([1.0, 1e-8])
    a = np.array([2.0, 3.0])
    g = L.grad_a(w, a, 1.0)
    assert g == pytest.approx([1.0, 0.0], abs=1e-7)
    assert np.dot(a - g, w) == pytest.approx(1.0, abs=1e-12)
    assert L.grad_a([0.5, 0.5], [4, 0], 1.0).tolist() == [1.0, 1.0]
    assert L.grad_a([0.5, 0.5], [1, 1], 1.0).tolist() == [0.0, 0.0]


def test_apply_weight_update():
    assert L.apply_weight_update([0.5, 0.5], [0.25, 0.25], 1.0).tolist() == [0.25, 0.25]
    assert L.apply_weight_update([0.3, 0.7], [0, 0], 0.1).tolist() == [0.3, 0.7]
    assert L.apply_weight_update([1e-8 + 1e-12, 1.0], [1.0, 0.0], 1.0).tolist() == [1e-8, 1.0]
    with pytest.raises(DimensionMismatch):
        L.apply_weight_update([1.0], [1.0, 2.0], 1.0)


@given(arrays(float, 4, elements=positive), arrays(np.int64, 4, elements=st.integers(0, 50)), positive)
def test_grad_w_matches_finite_differences(w, a, tau):
    a = a.astype(float)
    if not np.any(a):
        a[0] = 1.0
    norm2 = float(np.dot(a, a))

    def energy(v):
        return 0.5 * (np.dot(v, a) - tau) ** 2 / norm2

    assert L.grad_w(w, a, tau) == pytest.approx(finite_diff(energy, w), rel=1e-5, abs=1e-6)


def test_route_cases():
    r = L.route_hidden_correction(OFF, 0.5, 0, 8)
    assert not r.applies
    r = L.route_hidden_correction(ON, -0.5, 3, 8)
    assert (r.boundary, r.which_bank, r.delta_eps) == (L.Boundary.LAST_CHANGE, L.TriggerBank.ON_TRIGGER, -0.5)
    r = L.route_hidden_correction(ON, 0.5, 8, 8)
    assert (r.boundary, r.which_bank, r.delta_eps) == (L.Boundary.NEXT_CHANGE, L.TriggerBank.OFF_TRIGGER, -0.5)
    r = L.route_hidden_correction(OFF, 0.5, 3, 8)
    assert (r.boundary, r.which_bank, r.delta_eps) == (L.Boundary.LAST_CHANGE, L.TriggerBank.OFF_TRIGGER, -0.5)
    r = L.route_hidden_correction(OFF, -0.5, 0, 8)
    assert (r.boundary, r.which_bank, r.delta_eps) == (L.Boundary.NEXT_CHANGE, L.TriggerBank.ON_TRIGGER, -0.5)
    assert not L.route_hidden_correction(ON, -0.5, 8, 8).applies


@given(st.sampled_from([ON, OFF]), st.floats(-5, 5), st.integers(1, 30), st.data())
def test_route_is_total(state, g, a_t1, data):
    a_th = data.draw(st.integers(0, a_t1))
    r = L.route_hidden_correction(state, g, a_th, a_t1)
    if r.applies:
        assert r.boundary in L.Boundary and r.which_bank in L.TriggerBank
    else:
        assert r == L.NO_CORRECTION


@pytest.mark.parametrize("grads, expected", [
    ([np.array([0.0, -0.4])], -0.4),
    ([np.array([0.0, 0.3]), np.array([0.0, -0.1])], 0.2),
    ([np.zeros(2), np.zeros(2)], 0.0),
])
def test_sum_hidden_requests(grads, expected):
    assert L.sum_hidden_requests(grads, 1) == pytest.approx(expected)


def _fired_unit(w, n_steps):
    """A bias-only unit whose OFF bank fired after ``n_steps`` accumulations."""
    u = BistableUnit.create(1, w).restart()
    u.off_bank.a[:] = n_steps
    u.toggle(n_steps)
    return u


def test_timing_shift_on_snapshot_later():
    u = _fired_unit(0.1, 10)
    req = L.TimingShiftRequest(2.0, L.Boundary.LAST_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    assert L.apply_timing_shift(u, req, eta=1.0)
    assert u.off_bank.w[0] == pytest.approx(1 / 12)


def test_timing_shift_on_snapshot_earlier():
    u = _fired_unit(0.1, 10)
    req = L.TimingShiftRequest(-5.0, L.Boundary.LAST_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    L.apply_timing_shift(u, req, eta=1.0)
    assert u.off_bank.w[0] == pytest.approx(1 / 5)


def test_zero_shift_is_a_no_op():
    u = _fired_unit(0.1, 10)
    req = L.TimingShiftRequest(0.0, L.Boundary.LAST_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    L.apply_timing_shift(u, req, eta=1.0)
    assert u.off_bank.w[0] == pytest.approx(0.1, rel=1e-12)
    live = BistableUnit.create(1, 0.05).restart()
    live.off_bank.a[:] = 4
    req = L.TimingShiftRequest(0.0, L.Boundary.NEXT_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    L.apply_timing_shift(live, req, eta=1.0)
    assert live.off_bank.w[0] == pytest.approx(0.05, rel=1e-12)


def test_live_shift_moves_predicted_switch():
    u = BistableUnit.create(1, 0.05).restart()
    u.off_bank.a[:] = 4  # would fire after 20 steps
    req = L.TimingShiftRequest(-6.0, L.Boundary.NEXT_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    L.apply_timing_shift(u, req, eta=1.0)
    assert 1.0 / u.off_bank.w[0] == pytest.approx(14.0)


def test_timing_shift_skips_and_errors():
    u = BistableUnit.create(1, 0.1).restart()
    assert not L.apply_timing_shift(u, L.NO_CORRECTION)
    req = L.TimingShiftRequest(1.0, L.Boundary.LAST_CHANGE, L.TriggerBank.ON_TRIGGER, True)
    with pytest.raises(DegenerateWindow):
        L.apply_timing_shift(u, req)


def test_clamped_correction_learns_interval_in_one_step():
    u = BistableUnit.create(1, 1 / 20, pulse=True).restart()
    for t in range(9):
        u.advance([1], t)
    u.advance([1], 9)
    c = L.correct_output_clamped(u, 9, eta=1.0)
    assert c.applied
    assert u.off_bank.w[0] == pytest.approx(0.1)
    u.restart()
    fired = [t for t in range(40) if u.step([1], t) == ON]
    assert fired == [9, 19, 29, 39]


def test_clamped_correction_on_hyperplane_changes_nothing():
    u = BistableUnit.create(1, 0.1, pulse=True).restart()
    for t in range(10):
        u.advance([1], t)
    c = L.correct_output_clamped(u, 9, eta=1.0)
    assert u.off_bank.w[0] == 0.1
    assert c.grad_a.tolist() == [0.0]


def test_clamped_correction_with_empty_bank_skips_update():
    u = BistableUnit.create(2, 0.1).restart()
    c = L.correct_output_clamped(u, 0, eta=1.0)
    assert not c.applied and c.grad_a is None
    assert u.state == ON


def test_alternating_intervals_compromise():
    # clamp a bias-only unit to alternating 5 and 15 step intervals
    u = BistableUnit.create(1, 1 / 20, pulse=True).restart()
    t = -1
    for _ in range(200):
        for gap in (5, 15):
            for _ in range(gap):
                t += 1
                u.advance([1], t)
            L.correct_output_clamped(u, t, eta=0.1)
    expected = iterate_interval_updates(1 / 20, (5, 15), 0.1, 200)
    assert u.off_bank.w[0] == pytest.approx(expected, rel=1e-9)
    assert 1 / 15 < u.off_bank.w[0] < 1 / 5


def test_eta_one_oscillates_between_projections():
    u = BistableUnit.create(1, 1 / 20, pulse=True).restart()
    seen = []
    t = -1
    for gap in (5, 15, 5, 15):
        for _ in range(gap):
            t += 1
            u.advance([1], t)
        L.correct_output_clamped(u, t, eta=1.0)
        seen.append(u.off_bank.w[0])
    assert seen == pytest.approx([1 / 5, 1 / 15, 1 / 5, 1 / 15])
