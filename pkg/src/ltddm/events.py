"""Binary event streams and the block structure of their ON runs.

A stream is a 1-D array of 0/1 states indexed by discrete, 0-based time
steps. Streams handed out by this module are read-only arrays.
"""

from typing import NamedTuple

import numpy as np

from ._validation import check_stream


class EventBlock(NamedTuple):
    """A maximal run of ON steps, ``start`` and ``end`` inclusive."""

    start: int
    end: int

    def __len__(self):
        return self.end - self.start + 1


def event_stream(states):
    """Validate ``states`` and return it as an immutable stream."""
    return check_stream(states)


def stimulus(components):
    """Build a stimulus vector with the constant bias prepended.

    >>> stimulus([0, 1]).tolist()
    [1, 0, 1]
    """
    comp = np.asarray(components, dtype=np.int64).ravel()
    return np.concatenate(([1], comp)).astype(np.int64)


def event_steps(stream):
    """All steps at which the stream is ON, ascending."""
    s = check_stream(stream)
    return np.flatnonzero(s).tolist()


def onsets(stream):
    """Steps at which an ON run begins."""
    s = check_stream(stream)
    prev = np.concatenate(([0], s[:-1]))
    return np.flatnonzero((s == 1) & (prev == 0)).tolist()


def blocks(stream):
    """Maximal contiguous ON runs as :class:`EventBlock` tuples."""
    s = check_stream(stream).astype(np.int8)
    edges = np.diff(np.concatenate(([0], s, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [EventBlock(int(a), int(b)) for a, b in zip(starts, ends)]


def from_blocks(block_list, horizon):
    """Inverse of :func:`blocks` over a horizon of ``horizon`` steps."""
    out = np.zeros(int(horizon), dtype=np.uint8)
    for b in block_list:
        out[b.start:b.end + 1] = 1
    return check_stream(out)
