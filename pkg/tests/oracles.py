"""Slow, obviously-correct reference implementations used as test oracles."""

import numpy as np


def brute_nearest(t, events, horizon):
    """Signed distance to the nearest event by exhaustive scan; ties go earlier."""
    if not events:
        return horizon
    best = None
    for e in events:
        if best is None or abs(t - e) < abs(t - best):
            best = e
    return t - best


def brute_ste(y, yh):
    """Double loop over all event pairs."""
    y = [int(v) for v in y]
    yh = [int(v) for v in yh]
    T = len(y)
    ey = [t for t, v in enumerate(y) if v]
    eh = [t for t, v in enumerate(yh) if v]
    total = 0.0
    for src, dst in ((ey, eh), (eh, ey)):
        for t in src:
            if dst:
                d = min(abs(t - u) for u in dst)
            else:
                d = T
            total += 0.5 * d * d
    return total


def brute_blocks(y):
    out, start = [], None
    for t, v in enumerate(list(y) + [0]):
        if v and start is None:
            start = t
        elif not v and start is not None:
            out.append((start, t - 1))
            start = None
    return out


def shift_right(y, k=1):
    y = np.asarray(y)
    out = np.zeros_like(y)
    if k < len(y):
        out[k:] = y[:-k] if k else y
    return out


def finite_diff(f, x, h=1e-6):
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def iterate_interval_updates(w, intervals, eta, rounds):
    """Bias-only clamped corrections applied by hand: w <- w - eta*(w*L - 1)/L."""
    for _ in range(rounds):
        for L in intervals:
            w = max(w - eta * (w * L - 1.0) / L, 1e-8)
    return w
