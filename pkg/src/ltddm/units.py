"""Drift-diffusion accumulator units.

A :class:`TddmUnit` integrates binary stimuli into integer accumulators
and reports an activation ``w . a``. A :class:`BistableUnit` pairs two
such banks: one accumulates while the unit is OFF and switches it ON,
the other accumulates while ON and switches it OFF.

Within one time step the order is always: accumulate, test threshold,
then toggle and reset. The unit's output for the step is its state after
that sequence, so a unit fires on the exact step its evidence reaches
threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch

OFF = 0
ON = 1

# Weights projected exactly onto w.a = tau land there only up to rounding;
# a relative slack keeps such a unit firing on the intended step.
FIRE_RTOL = 1e-6


@dataclass
class TddmUnit:
    """One bank of drift rates and accumulators.

    Attributes
    ----------
    w : ndarray of float
        Drift rates, one per stimulus component; component 0 is the bias.
    a : ndarray of int
        Accumulated stimulus counts since the last reset.
    tau : float
        Activation threshold.
    cap : int or None
        Saturation level for the accumulators.
    snapshot : ndarray of int or None
        Accumulator contents the last time this bank triggered a transition.
    """

    w: np.ndarray
    a: np.ndarray = None
    tau: float = 1.0
    cap: int = None
    snapshot: np.ndarray = None

    def __post_init__(self):
        self.w = np.array(self.w, dtype=np.float64)
        if self.a is None:
            self.a = np.zeros(self.w.shape[0], dtype=np.int64)
        else:
            self.a = np.array(self.a, dtype=np.int64)
        if self.a.shape != self.w.shape:
            raise DimensionMismatch(
                f"accumulators have {self.a.shape[0]} components, weights have {self.w.shape[0]}"
            )
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def n(self):
        return self.w.shape[0]

    def accumulate(self, x):
        x = np.asarray(x, dtype=np.int64)
        if x.shape != self.a.shape:
            raise DimensionMismatch(f"stimulus has shape {x.shape}, expected {self.a.shape}")
        self.a += x
        if self.cap is not None:
            np.minimum(self.a, self.cap, out=self.a)
        return self

    def activation(self):
        return float(np.dot(self.w, self.a))

    def fires(self):
        return self.activation() >= self.tau * (1.0 - FIRE_RTOL)

    def reset(self):
        self.a[:] = 0
        return self

    def copy(self):
        return TddmUnit(
            w=self.w.copy(),
            a=self.a.copy(),
            tau=self.tau,
            cap=self.cap,
            snapshot=None if self.snapshot is None else self.snapshot.copy(),
        )


@dataclass
class BistableUnit:
    """An ON/OFF unit driven by two accumulator banks.

    With ``pulse=True`` the unit behaves as a plain instantaneous TDDM:
    the ON state lasts exactly one step, and the OFF bank is reset on the
    firing step so accumulation for the next event starts right after.
    """

    off_bank: TddmUnit
    on_bank: TddmUnit
    state: int = OFF
    pulse: bool = False
    last_change: int = -1
    _last_bank: str = field(default=None, repr=False)

    @classmethod
    def create(cls, n, w_init, tau=1.0, pulse=False, cap=None):
        """A fresh OFF unit with ``n`` stimulus components and constant weights."""
        w = np.full(n, float(w_init))
        return cls(
            off_bank=TddmUnit(w.copy(), tau=tau, cap=cap),
            on_bank=TddmUnit(w.copy(), tau=tau, cap=cap),
            pulse=pulse,
        )

    @property
    def n(self):
        return self.off_bank.n

    @property
    def active_bank(self):
        """The bank accumulating in the current state."""
        return self.on_bank if self.state == ON else self.off_bank

    def restart(self, entered_at=None):
        """Return to OFF with empty banks.

        ``entered_at`` is the step treated as the OFF state's entry, which
        does not accumulate. A bistable unit's state block starts on the
        entry step, so by default a bistable unit enters at step 0; a pulse
        unit's virtual last event sits at step -1.
        """
        if entered_at is None:
            entered_at = -1 if self.pulse else 0
        self.state = OFF
        self.off_bank.reset()
        self.on_bank.reset()
        self.off_bank.snapshot = None
        self.on_bank.snapshot = None
        self.last_change = entered_at
        self._last_bank = None
        return self

    def advance(self, x, t):
        """Accumulate ``x`` into the active bank without testing threshold."""
        if self.pulse and self.state == ON:
            self.state = OFF
        if t == self.last_change:
            return self
        self.active_bank.accumulate(x)
        return self

    def toggle(self, t):
        """Switch state at step ``t``, snapshotting the triggering bank."""
        trig = self.active_bank
        trig.snapshot = trig.a.copy()
        self._last_bank = "on" if self.state == ON else "off"
        if self.pulse:
            # instantaneous event: back to accumulating for the next one
            self.state = ON
            self.off_bank.reset()
        else:
            self.state = OFF if self.state == ON else ON
            self.active_bank.reset()
        self.last_change = t
        return self

    def step(self, x, t):
        """Free-running step: accumulate, fire if at threshold. Returns the state."""
        self.advance(x, t)
        if t != self.last_change and self.active_bank.fires():
            self.toggle(t)
        return self.state

    def copy(self):
        return BistableUnit(
            off_bank=self.off_bank.copy(),
            on_bank=self.on_bank.copy(),
            state=self.state,
            pulse=self.pulse,
            last_change=self.last_change,
            _last_bank=self._last_bank,
        )


def step_bistable(unit, x, t):
    """Functional form of :meth:`BistableUnit.step` returning ``(unit, state)``."""
    state = unit.step(x, t)
    return unit, state
