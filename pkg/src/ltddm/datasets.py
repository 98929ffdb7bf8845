"""Loading and synthesizing binary event streams.

Supported sources:

* event CSV: a header of stream names, then one row of 0/1 cells per step;
* sampled-signal CSV (e.g. an ECG lead resampled to one sample per model
  step): peaks above a threshold become events;
* price CSV: a date column followed by one close-price column per ticker;
  unusually high closes become events;
* note lists (``tone,duration`` per line) and a monophonic subset of
  Humdrum ``**kern``, folded into 12 pitch-class streams at 32nd-note
  resolution.
"""

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_event_matrix, check_stream
from .exceptions import InsufficientHistory, InvalidPeriod, ParseError, UnsupportedToken

PITCH_CLASSES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
MAX_TONE = 96
STEPS_PER_WHOLE = 32


@dataclass
class EventTable:
    """Named binary streams sharing one horizon.

    ``data`` has shape ``(T, n_streams)``; column ``j`` is stream ``names[j]``.
    """

    names: list
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = check_event_matrix(self.data)
        self.names = [str(n) for n in self.names]
        if len(self.names) != self.data.shape[1]:
            raise ValueError(f"{len(self.names)} names for {self.data.shape[1]} streams")
        if len(set(self.names)) != len(self.names):
            raise ValueError("stream names must be unique")

    @property
    def horizon(self):
        return self.data.shape[0]

    def __len__(self):
        return self.data.shape[1]

    def stream(self, name):
        return check_stream(self.data[:, self.names.index(name)])


# ---------------------------------------------------------------------------
# CSV files


def _read_rows(path):
    text = Path(path).read_text(encoding="utf-8")
    return list(csv.reader(io.StringIO(text, newline="")))


def load_event_csv(path):
    """Read an event CSV into an :class:`EventTable`.

    Raises :class:`ParseError` for a missing header, ragged rows, or any
    cell other than ``0``/``1``; ``line`` and ``column`` are 1-based file
    positions.
    """
    rows = _read_rows(path)
    if not rows or not any(c.strip() for c in rows[0]):
        raise ParseError("missing header row", line=1)
    names = [c.strip() for c in rows[0]]
    body = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(names):
            raise ParseError(f"expected {len(names)} cells, got {len(row)}", line=i)
        vals = []
        for j, cell in enumerate(row, start=1):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ParseError(f"non-binary cell {cell!r}", line=i, column=j)
            vals.append(int(cell))
        body.append(vals)
    if not body:
        raise ParseError("no data rows", line=2)
    try:
        return EventTable(names, np.array(body, dtype=np.uint8), {"source": str(path)})
    except ValueError as exc:
        raise ParseError(str(exc), line=1) from exc


def write_event_csv(table, path_or_file):
    """Write an :class:`EventTable` in the format read by :func:`load_event_csv`."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.names)
    for row in table.data:
        w.writerow([int(v) for v in row])
    if hasattr(path_or_file, "write"):
        path_or_file.write(buf.getvalue())
    else:
        Path(path_or_file).write_text(buf.getvalue(), encoding="utf-8")


def _read_numeric_columns(path, skip_first):
    rows = _read_rows(path)
    if not rows:
        raise ParseError("missing header row", line=1)
    header = [c.strip() for c in rows[0]]
    names = header[1:] if skip_first else header
    if not names:
        raise ParseError("no value columns", line=1)
    cols = [[] for _ in names]
    for i, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, got {len(row)}", line=i)
        cells = row[1:] if skip_first else row
        for j, cell in enumerate(cells):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r}", line=i,
                                 column=j + 1 + int(skip_first)) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite cell {cell!r}", line=i, column=j + 1 + int(skip_first))
            cols[j].append(v)
    if not cols[0]:
        raise ParseError("no data rows", line=2)
    return names, [np.array(c) for c in cols]


def load_signal_csv(path, threshold=0.5, min_separation=1):
    """Sampled signals (one column per lead) to peak events."""
    names, cols = _read_numeric_columns(path, skip_first=False)
    data = np.column_stack([detect_peaks(c, threshold, min_separation) for c in cols])
    return EventTable(names, data, {"source": str(path), "kind": "signal",
                                    "threshold": threshold, "min_separation": min_separation})


def load_price_csv(path, window=14, z=0.7):
    """Date + close-price columns to jump events, one stream per ticker."""
    names, cols = _read_numeric_columns(path, skip_first=True)
    data = np.column_stack([discretize_prices(c, window, z) for c in cols])
    return EventTable(names, data, {"source": str(path), "kind": "prices", "window": window, "z": z})


# ---------------------------------------------------------------------------
# Signal and price transforms


def detect_peaks(signal, threshold=0.5, min_separation=1):
    """Events at strict local maxima reaching ``threshold``.

    Of two maxima closer than ``min_separation`` steps only the larger is
    kept (the earlier on ties). Endpoints are never peaks.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite samples")
    out = np.zeros(x.size, dtype=np.uint8)
    if x.size < 3:
        return out
    mid = x[1:-1]
    cand = np.flatnonzero((mid > x[:-2]) & (mid > x[2:]) & (mid >= threshold)) + 1
    # strongest first, earliest first among equals
    order = sorted(cand.tolist(), key=lambda i: (-x[i], i))
    kept = []
    for i in order:
        if all(abs(i - j) >= min_separation for j in kept):
            kept.append(i)
    out[kept] = 1
    return out


def discretize_prices(prices, window=14, z=0.7):
    """Mark days whose close jumps above the trailing window.

    Day ``t >= window`` is an event when its close is at least ``z``
    population standard deviations above the mean of the previous
    ``window`` closes (strictly above the mean when they are all equal).
    The first ``window`` days are never events.
    """
    p = np.asarray(prices, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("prices must be 1-D")
    if p.size < window + 1:
        raise InsufficientHistory(f"need at least {window + 1} prices, got {p.size}")
    out = np.zeros(p.size, dtype=np.uint8)
    for t in range(window, p.size):
        hist = p[t - window:t]
        mu = hist.mean()
        sd = hist.std()
        # relative slack so shifting or scaling prices cannot flip a tie
        eps = 1e-12 * max(abs(mu), sd, 1e-300)
        if sd <= eps:
            out[t] = p[t] > mu + eps
        else:
            out[t] = p[t] >= mu + z * sd - eps
    return out


# ---------------------------------------------------------------------------
# Music


_IGNORED_SIGNIFIERS = str.maketrans("", "", "{}()LJKk/\\;'~^`\"")
_KERN_NOTE = re.compile(r"^(\d+)(\.*)([a-gA-G]+|r)(##?|--?|n)?$")
_PC = {"c": 0, "d": 2, "e": 4, "f": 5, "g": 7, "a": 9, "b": 11}


def _duration_steps(digits, dots, line):
    base = int(digits)
    if base == 0 or STEPS_PER_WHOLE % base:
        raise UnsupportedToken(f"duration {digits!r} is not a whole number of 32nd notes", line=line)
    steps = STEPS_PER_WHOLE // base
    total = steps * (2 - 0.5 ** len(dots))
    if total != int(total):
        raise UnsupportedToken(f"dotted duration {digits}{dots} is finer than a 32nd note", line=line)
    return int(total)


def _kern_tone(letters, accidental, line):
    if len(set(letters)) != 1:
        raise ParseError(f"malformed pitch {letters!r}", line=line)
    pc = _PC[letters[0].lower()]
    if letters[0].islower():
        octave = 4 + len(letters) - 1
    else:
        octave = 3 - (len(letters) - 1)
    shift = {"#": 1, "##": 2, "-": -1, "--": -2, "n": 0, None: 0}[accidental]
    tone = 12 * octave + pc + shift
    if not 0 <= tone <= MAX_TONE:
        raise ParseError(f"pitch {letters}{accidental or ''} outside tones 0..{MAX_TONE}", line=line)
    return tone


def _parse_kern(lines):
    notes = []
    for n, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("!"):
            continue
        if "\t" in line.strip():
            raise UnsupportedToken("multiple spines are not supported", line=n)
        tok = line.strip()
        if tok.startswith("**"):
            if tok != "**kern":
                raise UnsupportedToken(f"spine type {tok!r}", line=n)
            continue
        if tok.startswith("*") or tok.startswith("=") or tok == ".":
            continue
        if " " in tok:
            raise UnsupportedToken(f"chord {tok!r}", line=n)
        if any(c in tok for c in "[]_"):
            raise UnsupportedToken(f"tie in {tok!r}", line=n)
        if any(c in tok for c in "qQP"):
            raise UnsupportedToken(f"grace note {tok!r}", line=n)
        m = _KERN_NOTE.match(tok.translate(_IGNORED_SIGNIFIERS))
        if not m:
            raise ParseError(f"unrecognised token {tok!r}", line=n)
        digits, dots, pitch, acc = m.groups()
        steps = _duration_steps(digits, dots, n)
        if pitch == "r":
            if acc:
                raise ParseError(f"accidental on a rest {tok!r}", line=n)
            notes.append((None, steps))
        else:
            notes.append((_kern_tone(pitch, acc, n), steps))
    return notes


def _parse_note_list(lines):
    notes = []
    for n, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError("expected 'tone,duration'", line=n)
        tone_s, dur_s = parts
        try:
            dur = int(dur_s)
        except ValueError:
            raise ParseError(f"bad duration {dur_s!r}", line=n) from None
        if dur < 1:
            raise ParseError("duration must be >= 1", line=n)
        if tone_s.lower() in ("r", "rest"):
            notes.append((None, dur))
            continue
        try:
            tone = int(tone_s)
        except ValueError:
            raise ParseError(f"bad tone {tone_s!r}", line=n) from None
        if not 0 <= tone <= MAX_TONE:
            raise ParseError(f"tone {tone} outside 0..{MAX_TONE}", line=n)
        notes.append((tone, dur))
    return notes


def notes_to_table(notes):
    """Fold ``(tone, duration)`` notes into 12 pitch-class streams.

    ``tone=None`` is a rest. A stream that never sounds gets a single
    event on the final step so that every stream has at least one event.
    """
    T = sum(d for _, d in notes)
    if T < 1:
        raise ParseError("piece contains no notes or rests")
    data = np.zeros((T, 12), dtype=np.uint8)
    t = 0
    for tone, dur in notes:
        if tone is not None:
            data[t:t + dur, tone % 12] = 1
        t += dur
    silent = ~data.any(axis=0)
    data[T - 1, silent] = 1
    return EventTable(list(PITCH_CLASSES), data, {"kind": "music"})


def parse_kern_subset(text):
    """Parse a note list or monophonic ``**kern`` text into 12 streams."""
    lines = text.splitlines()
    is_kern = any(line.lstrip().startswith("**") for line in lines)
    notes = _parse_kern(lines) if is_kern else _parse_note_list(lines)
    table = notes_to_table(notes)
    table.meta["format"] = "kern" if is_kern else "notes"
    return table


def load_music(path):
    table = parse_kern_subset(Path(path).read_text(encoding="utf-8"))
    table.meta["source"] = str(path)
    return table


# ---------------------------------------------------------------------------
# Synthetic targets


def _check_fits(period, T):
    if period < 1:
        raise InvalidPeriod(f"period must be >= 1, got {period}")
    if period >= T:
        raise InvalidPeriod(f"period {period} does not fit in horizon {T}")


def synth_fixed_interval(L, T):
    """Single-step events every ``L`` steps, the first at step ``L - 1``."""
    _check_fits(L, T)
    out = np.zeros(T, dtype=np.uint8)
    out[L - 1::L] = 1
    return out


def synth_on_off(on_len, off_len, T):
    """``off_len`` OFF steps then ``on_len`` ON steps, repeated."""
    if on_len < 1 or off_len < 1:
        raise InvalidPeriod("durations must be >= 1")
    period = on_len + off_len
    _check_fits(period, T)
    return (np.arange(T) % period >= off_len).astype(np.uint8)


def synth_two_interval(d_on, gap_short, gap_long, T):
    """Pairs of ``d_on``-step events: a long gap, event, short gap, event, repeated."""
    if min(d_on, gap_short, gap_long) < 1:
        raise InvalidPeriod("durations must be >= 1")
    pattern = np.concatenate([
        np.zeros(gap_long), np.ones(d_on), np.zeros(gap_short), np.ones(d_on),
    ]).astype(np.uint8)
    _check_fits(pattern.size, T)
    reps = -(-T // pattern.size)
    return np.tile(pattern, reps)[:T]
