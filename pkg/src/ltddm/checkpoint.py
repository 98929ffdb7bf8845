"""Plain-text model checkpoints.

A checkpoint is line oriented and readable by eye::

    ltddm-checkpoint 1
    params {"epochs": 200, ...}
    names ["a", "b"]
    networks 1
    network 0 streams [0, 1]
    config {"n_inputs": 2, ...}
    wiring bias in0 in1 h0 h1
    unit hidden 0 pulse 0 cap 200
    bank off tau 1.0 w 0.0025 0.0025 0.0025
    bank on tau 1.0 w 0.0025 0.0025 0.0025
    unit output 0 pulse 0 cap 200
    ...
    end

Structured values are JSON. Weights are written with :func:`repr`, the
shortest decimal string that reads back to the identical double, so a
save/load cycle is exact.
"""

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .exceptions import ParseError
from .network import LtddmNetwork, NetworkConfig
from .units import BistableUnit, TddmUnit

MAGIC = "ltddm-checkpoint"
VERSION = 1


def _dump(obj):
    return json.dumps(obj, sort_keys=True)


def _floats(values):
    return " ".join(repr(float(v)) for v in values)


def _unit_lines(role, idx, unit):
    yield f"unit {role} {idx} pulse {int(unit.pulse)} cap {unit.off_bank.cap}"
    for name, bank in (("off", unit.off_bank), ("on", unit.on_bank)):
        yield f"bank {name} tau {bank.tau!r} w {_floats(bank.w)}"


def dumps(networks, groups, names, params):
    """Serialize ``networks`` (each predicting the columns in ``groups[i]``)."""
    lines = [f"{MAGIC} {VERSION}", f"params {_dump(params)}", f"names {_dump(list(names))}",
             f"networks {len(networks)}"]
    for i, (net, cols) in enumerate(zip(networks, groups)):
        lines.append(f"network {i} streams {_dump([int(c) for c in cols])}")
        lines.append(f"config {_dump(asdict(net.config))}")
        lines.append("wiring " + " ".join(net.wiring))
        for h, u in enumerate(net.hidden):
            lines.extend(_unit_lines("hidden", h, u))
        for o, u in enumerate(net.outputs):
            lines.extend(_unit_lines("output", o, u))
    lines.append("end")
    return "\n".join(lines) + "\n"


def save(path, networks, groups, names, params):
    Path(path).write_text(dumps(networks, groups, names, params), encoding="utf-8")


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, keyword):
        while self.pos < len(self.lines) and not self.lines[self.pos].strip():
            self.pos += 1
        if self.pos >= len(self.lines):
            raise ParseError(f"unexpected end of checkpoint, expected {keyword!r}", line=self.pos + 1)
        self.pos += 1
        head, _, rest = self.lines[self.pos - 1].strip().partition(" ")
        if head != keyword:
            raise self.error(f"expected {keyword!r}, found {head!r}")
        return rest

    def error(self, message):
        return ParseError(message, line=self.pos)

    def json(self, keyword):
        raw = self.next(keyword)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise self.error(f"bad JSON after {keyword!r}: {exc.msg}") from exc


def _parse_unit(reader, role, idx):
    fields = reader.next("unit").split()
    try:
        if fields[0] != role or int(fields[1]) != idx or fields[2] != "pulse" or fields[4] != "cap":
            raise ValueError
        pulse = bool(int(fields[3]))
        cap = None if fields[5] == "None" else int(fields[5])
    except (IndexError, ValueError):
        raise reader.error(f"malformed unit header, expected {role} {idx}") from None
    banks = {}
    for name in ("off", "on"):
        fields = reader.next("bank").split()
        try:
            if fields[0] != name or fields[1] != "tau" or fields[3] != "w":
                raise ValueError
            tau = float(fields[2])
            w = np.array([float(v) for v in fields[4:]], dtype=np.float64)
        except (IndexError, ValueError):
            raise reader.error(f"malformed {name} bank") from None
        banks[name] = TddmUnit(w, tau=tau, cap=cap)
    unit = BistableUnit(off_bank=banks["off"], on_bank=banks["on"], pulse=pulse)
    return unit.restart()


def loads(text):
    """Inverse of :func:`dumps`: returns ``(networks, groups, names, params)``."""
    r = _Reader(text)
    head = r.next(MAGIC)
    if head.strip() != str(VERSION):
        raise r.error(f"unsupported checkpoint version {head.strip()!r}")
    params = r.json("params")
    names = r.json("names")
    try:
        count = int(r.next("networks"))
    except ValueError:
        raise r.error("network count must be an integer") from None
    networks, groups = [], []
    for i in range(count):
        rest = r.next("network").split(" ", 2)
        if len(rest) != 3 or rest[0] != str(i) or rest[1] != "streams":
            raise r.error(f"malformed header for network {i}")
        groups.append(json.loads(rest[2]))
        try:
            config = NetworkConfig(**r.json("config"))
        except (TypeError, ValueError) as exc:
            raise r.error(f"invalid network config: {exc}") from None
        wiring = r.next("wiring").split()
        hidden = [_parse_unit(r, "hidden", h) for h in range(config.n_hidden)]
        outputs = [_parse_unit(r, "output", o) for o in range(config.n_outputs)]
        try:
            net = LtddmNetwork(config, hidden, outputs)
        except ValueError as exc:
            raise r.error(str(exc)) from None
        if net.wiring != wiring:
            raise r.error(f"wiring {wiring} does not match the network shape")
        networks.append(net)
    r.next("end")
    return networks, groups, names, params


def load(path):
    return loads(Path(path).read_text(encoding="utf-8"))
