"""Squared timing error between binary event streams.

Every ON step is an event. Each event is matched to the nearest event of
the opposite stream; the full error is half the sum of squared step
distances taken in both directions. When the opposite stream is silent,
every event is charged the horizon length ``T`` as its distance, which
keeps totals finite and monotone in the number of missed events.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_same_horizon, check_stream


@dataclass(frozen=True)
class SteReport:
    """Result of :func:`ste_full`.

    ``per_event`` lists ``(step, squared_distance)`` for the target's
    events followed by the prediction's events.
    """

    total: float
    per_event: list = field(default_factory=list)


def nearest_event_distance(t, events, horizon):
    """Signed distance ``t - t*`` to the closest event ``t*``.

    Ties go to the earlier event. An empty ``events`` yields ``+horizon``.
    """
    if len(events) == 0:
        return int(horizon)
    ev = np.asarray(events)
    i = int(np.searchsorted(ev, t, side="left"))
    best = None
    # candidates: ev[i-1] (earlier or equal) and ev[i] (>= t)
    if i > 0:
        best = int(ev[i - 1])
    if i < len(ev):
        later = int(ev[i])
        if best is None or abs(later - t) < abs(t - best):
            best = later
    return int(t - best)


def _nearest_sq(src, dst, horizon):
    """Squared nearest-neighbour distances from each step in ``src`` to ``dst``."""
    if src.size == 0:
        return np.zeros(0, dtype=np.float64)
    if dst.size == 0:
        return np.full(src.size, float(horizon) ** 2)
    idx = np.searchsorted(dst, src, side="left")
    left = dst[np.clip(idx - 1, 0, dst.size - 1)]
    right = dst[np.clip(idx, 0, dst.size - 1)]
    d_left = np.where(idx > 0, np.abs(src - left), np.iinfo(np.int64).max)
    d_right = np.where(idx < dst.size, np.abs(right - src), np.iinfo(np.int64).max)
    d = np.minimum(d_left, d_right).astype(np.float64)
    return d * d


def ste_full(Y, Yhat, onsets_only=False):
    """Symmetric squared timing error between target and prediction.

    Parameters
    ----------
    Y, Yhat : array-like of {0, 1}
        Target and predicted streams of equal length.
    onsets_only : bool, default=False
        Count only the first step of each ON run as an event.

    Returns
    -------
    SteReport

    Raises
    ------
    HorizonMismatch
        If the streams differ in length.
    """
    y = check_stream(Y)
    yh = check_stream(Yhat)
    check_same_horizon(y, yh)
    T = len(y)
    if onsets_only:
        y = y & ~np.concatenate(([0], y[:-1])).astype(np.uint8)
        yh = yh & ~np.concatenate(([0], yh[:-1])).astype(np.uint8)
    ey = np.flatnonzero(y).astype(np.int64)
    eh = np.flatnonzero(yh).astype(np.int64)
    dy = _nearest_sq(ey, eh, T)
    dh = _nearest_sq(eh, ey, T)
    total = 0.5 * (float(dy.sum()) + float(dh.sum()))
    per_event = list(zip(ey.tolist(), dy.tolist())) + list(zip(eh.tolist(), dh.tolist()))
    return SteReport(total=total, per_event=per_event)


def ste_total(Y, Yhat, onsets_only=False):
    """Shorthand for ``ste_full(Y, Yhat).total``."""
    return ste_full(Y, Yhat, onsets_only=onsets_only).total


def ste_event(t, Yhat, horizon=None):
    """One-sided timing error of the target event at step ``t``.

    This is the loss used for online correction: only the distance from
    the target event to the closest predicted event counts.
    """
    yh = check_stream(Yhat)
    T = len(yh) if horizon is None else int(horizon)
    d = nearest_event_distance(t, np.flatnonzero(yh), T)
    return 0.5 * float(d) ** 2


def grad_eps(t, eps):
    """Derivative of ``0.5 * (t - eps)**2`` with respect to the firing time ``eps``.

    Positive when the prediction is later than the target.
    """
    return eps - t
