"""Event-sequence prediction with drift-diffusion timing units.

The package learns when binary events will occur. Bistable units learn
both the gaps between events and their durations, and a hidden layer of
free-running units gives a network room for latent timing structure.
Error is the squared timing error (STE) between observed and predicted
event steps.
"""

from .datasets import EventTable, load_event_csv, parse_kern_subset, synth_fixed_interval, synth_on_off, synth_two_interval
from .estimator import LTDDM, TDDM
from .exceptions import (
    DegenerateWindow,
    DimensionMismatch,
    HorizonMismatch,
    InsufficientHistory,
    InvalidPeriod,
    LtddmError,
    ParseError,
    UnsupportedToken,
    ZeroAccumulator,
)
from .network import LtddmNetwork, NetworkConfig, detect_convergence, teacher_inputs
from .ste import ste_full, ste_total
from .units import BistableUnit, TddmUnit

__version__ = "0.1.0"

__all__ = [
    "BistableUnit", "DegenerateWindow", "DimensionMismatch", "EventTable", "HorizonMismatch",
    "InsufficientHistory", "InvalidPeriod", "LTDDM", "LtddmError", "LtddmNetwork",
    "NetworkConfig", "ParseError", "TDDM", "TddmUnit", "UnsupportedToken", "ZeroAccumulator",
    "detect_convergence", "load_event_csv", "parse_kern_subset", "ste_full", "ste_total",
    "synth_fixed_interval", "synth_on_off", "synth_two_interval", "teacher_inputs",
]
