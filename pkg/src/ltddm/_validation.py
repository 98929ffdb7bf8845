"""Input validation helpers shared by the public API."""

import numpy as np

from .exceptions import HorizonMismatch


def _as_binary(arr, what):
    arr = np.asarray(arr)
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{what} must contain only 0 and 1")
    return arr.astype(np.uint8)


def check_stream(stream):
    """Validate a single event stream.

    Returns a read-only ``uint8`` copy so callers can never mutate the
    caller's data through it.
    """
    arr = _as_binary(stream, "event stream")
    if arr.ndim != 1:
        raise ValueError(f"event stream must be 1-D, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("event stream must have at least one time step")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def check_event_matrix(X):
    """Validate a (T, n_streams) matrix of binary events.

    A 1-D input is treated as a single stream.
    """
    arr = _as_binary(X, "event matrix")
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"event matrix must be 2-D (T, n_streams), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"event matrix must be non-empty, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


def check_same_horizon(a, b):
    if len(a) != len(b):
        raise HorizonMismatch(f"horizons differ: {len(a)} != {len(b)}")


def check_positive(value, name, upper=None):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    if upper is not None and value > upper:
        raise ValueError(f"{name} must be <= {upper}, got {value}")
    return value
