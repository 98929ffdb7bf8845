"""Step-level classification scores and the two trivial baselines.

ON is the positive class. Ratios with a zero denominator are defined as 0,
so a silent model scores precision 0 rather than an undefined value.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_event_matrix, check_same_horizon, check_stream
from .exceptions import DimensionMismatch


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)


def confusion(Y, Yhat):
    y = check_stream(Y)
    p = check_stream(Yhat)
    check_same_horizon(y, p)
    y = y.astype(bool)
    p = p.astype(bool)
    return ConfusionCounts(
        tp=int(np.sum(y & p)),
        fp=int(np.sum(~y & p)),
        fn=int(np.sum(y & ~p)),
        tn=int(np.sum(~y & ~p)),
    )


def _ratio(num, den):
    return num / den if den else 0.0


def precision(c):
    return _ratio(c.tp, c.tp + c.fp)


def recall(c):
    return _ratio(c.tp, c.tp + c.fn)


def f1(c):
    return _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)


def accuracy(c):
    return _ratio(c.tp + c.tn, c.total)


def scores(c):
    """All four scores of ``c`` as a dict."""
    return {"precision": precision(c), "recall": recall(c), "f1": f1(c), "accuracy": accuracy(c)}


def majority_baseline(Y):
    """Constant prediction of the modal state, ties going to OFF.

    Returns ``(Yhat, accuracy)``; the accuracy is ``max(p, 1 - p)`` for an
    ON fraction ``p``.
    """
    y = check_stream(Y)
    on = int(y.sum())
    off = y.shape[0] - on
    state = 1 if on > off else 0
    p = on / y.shape[0]
    return np.full(y.shape[0], state, dtype=np.uint8), max(p, 1 - p)


def reactive_baseline(Y):
    """Repeat the previous step: ``Yhat[t] = Y[t - 1]``, ``Yhat[0] = 0``."""
    y = check_stream(Y)
    out = np.zeros_like(y)
    out[1:] = y[:-1]
    return out


def pooled_and_macro(Y, Yhat):
    """Per-stream counts plus micro (pooled counts) and macro (mean of scores) summaries.

    ``Y`` and ``Yhat`` are ``(T, n)`` event matrices. Returns ``(per_stream,
    micro, macro)`` where ``per_stream`` is a list of counts and the other two
    are score dicts.
    """
    Y = check_event_matrix(Y)
    Yhat = check_event_matrix(Yhat)
    check_same_horizon(Y, Yhat)
    if Y.shape[1] != Yhat.shape[1]:
        raise DimensionMismatch(f"{Y.shape[1]} target streams vs {Yhat.shape[1]} predicted")
    per = [confusion(Y[:, j], Yhat[:, j]) for j in range(Y.shape[1])]
    micro = scores(sum(per, ConfusionCounts()))
    each = [scores(c) for c in per]
    macro = {k: float(np.mean([s[k] for s in each])) for k in micro}
    return per, micro, macro
