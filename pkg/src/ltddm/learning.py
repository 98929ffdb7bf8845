"""Timing-error gradients and the correction rules built on them.

Output units are corrected at clamped transitions, where their timing
error is zero by construction and the drift rates are simply projected
toward the activation hyperplane ``w . a = tau``. The dual gradient with
respect to the accumulators tells each hidden unit how much more or less
of its stimulus the output wanted; hidden units turn that into a shift of
one of their state boundaries.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateWindow, DimensionMismatch, ZeroAccumulator
from .units import ON

WEIGHT_FLOOR = 1e-8
LAMBDA_FLOOR = 1e-6
DEFAULT_LR = 0.1


class Boundary(enum.Enum):
    LAST_CHANGE = "last_change"
    NEXT_CHANGE = "next_change"


class TriggerBank(enum.Enum):
    ON_TRIGGER = "on_trigger"    # the bank accumulating while OFF
    OFF_TRIGGER = "off_trigger"  # the bank accumulating while ON


@dataclass(frozen=True)
class TimingShiftRequest:
    """Ask a hidden unit to move one state boundary ``delta_eps`` steps later.

    A negative ``delta_eps`` moves the boundary earlier.
    """

    delta_eps: float = 0.0
    boundary: Boundary = None
    which_bank: TriggerBank = None
    applies: bool = False


@dataclass(frozen=True)
class CorrectionWindow:
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"window start {self.start} after end {self.end}")

    def __len__(self):
        return self.end - self.start


NO_CORRECTION = TimingShiftRequest()


def lambda_scale(a_bias, grad_eps, floor=LAMBDA_FLOOR):
    """Stimulus scale that would have moved activation by ``-grad_eps`` steps.

    ``a_bias`` is the elapsed-step count of the bias accumulator.
    """
    if a_bias <= 0:
        raise DegenerateWindow("bias accumulator is zero; no elapsed time to rescale")
    return max((a_bias - grad_eps) / a_bias, floor)


def grad_w(w, a, tau=1.0):
    """Gradient of the timing error with respect to the drift rates.

    A full step ``w - grad_w(w, a, tau)`` lands exactly on ``w . a = tau``.
    """
    w = np.asarray(w, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if w.shape != a.shape:
        raise DimensionMismatch(f"weights {w.shape} vs accumulators {a.shape}")
    norm2 = float(np.dot(a, a))
    if norm2 == 0.0:
        raise ZeroAccumulator("no accumulated evidence to attribute error to")
    return (float(np.dot(w, a)) - tau) * a / norm2


def grad_a(w, a, tau=1.0):
    """Gradient of the timing error with respect to the accumulated stimuli.

    Positive components mean the unit saw more of that stimulus than it
    needed to fire on time.
    """
    w = np.asarray(w, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if w.shape != a.shape:
        raise DimensionMismatch(f"weights {w.shape} vs accumulators {a.shape}")
    return (float(np.dot(w, a)) - tau) * w / float(np.dot(w, w))


def apply_weight_update(w, grad, eta, floor=WEIGHT_FLOOR):
    """One gradient step on drift rates, floored to stay strictly positive."""
    w = np.asarray(w, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if w.shape != grad.shape:
        raise DimensionMismatch(f"weights {w.shape} vs gradient {grad.shape}")
    return np.maximum(w - eta * grad, floor)


@dataclass(frozen=True)
class OutputCorrection:
    """What happened when an output unit was corrected at a clamped transition."""

    accumulators: np.ndarray
    grad_a: np.ndarray
    weights: np.ndarray
    window: CorrectionWindow
    applied: bool


def correct_output_clamped(unit, t, eta=DEFAULT_LR):
    """Correct the bank that should have triggered the transition at ``t``, then toggle.

    The accumulator gradient is evaluated before the weights move, so
    hidden units still see what the output would have needed.
    """
    bank = unit.active_bank
    a = bank.a.copy()
    w_before = bank.w.copy()
    window = CorrectionWindow(max(unit.last_change, t - int(a[0])), t)
    applied = False
    ga = None
    try:
        g = grad_w(bank.w, a, bank.tau)
        ga = grad_a(bank.w, a, bank.tau)
    except ZeroAccumulator:
        pass
    else:
        bank.w = apply_weight_update(bank.w, g, eta)
        applied = True
    unit.toggle(t)
    return OutputCorrection(accumulators=a, grad_a=ga, weights=w_before, window=window, applied=applied)


def sum_hidden_requests(output_grads, h):
    """Sum component ``h`` of each output's accumulator gradient."""
    return float(sum(float(g[h]) for g in output_grads if g is not None))


def route_hidden_correction(hidden_state, g, a_th, a_t1):
    """Decide which boundary of a hidden unit should move, and by how much.

    Parameters
    ----------
    hidden_state : int
        The hidden unit's current state (``ON`` or ``OFF``).
    g : float
        Summed accumulator gradient for this hidden unit. Positive means the
        output wanted less of it.
    a_th : int
        Steps within the output's window during which the hidden unit was ON.
    a_t1 : int
        Length of the window.
    """
    if 0 < a_th < a_t1:
        if hidden_state == ON:
            return TimingShiftRequest(g, Boundary.LAST_CHANGE, TriggerBank.ON_TRIGGER, True)
        return TimingShiftRequest(-g, Boundary.LAST_CHANGE, TriggerBank.OFF_TRIGGER, True)
    if a_th == 0 and -g > 0:
        return TimingShiftRequest(g, Boundary.NEXT_CHANGE, TriggerBank.ON_TRIGGER, True)
    if a_th == a_t1 and -g < 0:
        return TimingShiftRequest(-g, Boundary.NEXT_CHANGE, TriggerBank.OFF_TRIGGER, True)
    return NO_CORRECTION


def apply_timing_shift(hidden, req, eta=DEFAULT_LR):
    """Move the requested boundary of ``hidden`` by ``req.delta_eps`` steps.

    The bank's firing point is extrapolated from its stimuli, ``n* = a1 *
    tau / (w . a)`` elapsed steps (exactly ``a1`` for a snapshot taken when
    the bank fired), and its weights are projected toward the hyperplane
    through the stimuli rescaled to ``n* + delta_eps`` steps. A zero shift
    therefore never changes anything. Returns whether the weights changed.
    """
    if not req.applies:
        return False
    bank = hidden.off_bank if req.which_bank is TriggerBank.ON_TRIGGER else hidden.on_bank
    live = req.boundary is Boundary.NEXT_CHANGE
    a = bank.a if live else bank.snapshot
    if a is None or a[0] <= 0:
        raise DegenerateWindow("selected bank has no elapsed steps to rescale")
    a = a.astype(np.float64)
    a1 = a[0]
    phi = float(np.dot(bank.w, a))
    n_star = a1 * bank.tau / phi
    # a live bank can switch at the next step at the earliest, a past one
    # no earlier than its first accumulation
    target = max(n_star + req.delta_eps, a1 + 1.0 if live else 1.0)
    lam = lambda_scale(a1, a1 - target)
    scaled = lam * a
    bank.w = apply_weight_update(bank.w, grad_w(bank.w, scaled, bank.tau), eta)
    return True
