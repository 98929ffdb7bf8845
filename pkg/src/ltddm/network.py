"""Feed-forward networks of bistable timing units.

The hidden layer runs freely on the network inputs; the output layer sees
the inputs plus the hidden states. During training each output is
clamped to its target stream, so its transitions happen exactly at the
target's onsets and offsets and every correction is made with zero
timing error. Epoch error is measured on a separate unclamped pass.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import learning
from .exceptions import DegenerateWindow, DimensionMismatch
from .ste import ste_total
from .units import OFF, ON, BistableUnit

logger = logging.getLogger(__name__)

PER_STREAM = "per-stream"
JOINT = "joint"


@dataclass
class NetworkConfig:
    """Shape and training settings of a single network.

    ``n_hidden=None`` means one hidden unit per output. ``pulse_outputs``
    selects instantaneous (one-step) output events, the plain TDDM
    behaviour; otherwise outputs are bistable and hold their state.
    """

    n_inputs: int
    n_outputs: int = 1
    n_hidden: int = None
    eta: float = learning.DEFAULT_LR
    tau: float = 1.0
    epochs: int = 200
    pulse_outputs: bool = False
    reset_hidden_each_epoch: bool = True
    init_weight: float = None

    def __post_init__(self):
        if self.n_hidden is None:
            self.n_hidden = self.n_outputs
        if self.n_inputs < 0 or self.n_hidden < 0:
            raise ValueError("n_inputs and n_hidden must be >= 0")
        if self.n_outputs < 1:
            raise ValueError("n_outputs must be >= 1")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class TrainTrace:
    """Free-run error of a training run.

    ``ste[e]`` is measured with the weights reached at the end of epoch
    ``e`` (0-based) and ``initial_ste`` with the untrained weights. The
    learning curve :attr:`curve` puts the two together so that its index
    counts completed epochs; ``convergence_epoch`` indexes that curve.
    """

    ste: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    initial_ste: float = None
    convergence_epoch: int = None

    def __len__(self):
        return len(self.ste)

    @property
    def curve(self):
        return [self.initial_ste] + list(self.ste)

    @property
    def epochs_to_zero(self):
        return first_zero_epoch(self.curve)


def teacher_inputs(Y):
    """Previous-step targets as inputs: row ``t`` holds ``Y[t - 1]``, row 0 is zero."""
    Y = np.asarray(Y, dtype=np.int64)
    if Y.ndim == 1:
        Y = Y[:, None]
    X = np.zeros_like(Y)
    X[1:] = Y[:-1]
    return X


class LtddmNetwork:
    """Hidden and output layers of :class:`~ltddm.units.BistableUnit`.

    Output bank components are wired as ``[bias, inputs..., hidden...]``;
    hidden bank components as ``[bias, inputs...]``.
    """

    def __init__(self, config, hidden, outputs):
        self.config = config
        self.hidden = list(hidden)
        self.outputs = list(outputs)
        n_in = config.n_inputs
        if any(h.n != 1 + n_in for h in self.hidden):
            raise DimensionMismatch("hidden units must have 1 + n_inputs components")
        if any(o.n != 1 + n_in + len(self.hidden) for o in self.outputs):
            raise DimensionMismatch("output units must have 1 + n_inputs + n_hidden components")
        self.wiring = (
            ["bias"] + [f"in{j}" for j in range(n_in)] + [f"h{h}" for h in range(len(self.hidden))]
        )

    @classmethod
    def build(cls, config, horizon, rng=None, jitter=0.1):
        """Fresh network with every weight at ``1 / (N * horizon)``.

        Such weights make initial predictions late, so early corrections
        shorten the predicted intervals. With ``rng`` the weights are
        jittered multiplicatively within ``+/-jitter``.
        """
        n_h = 1 + config.n_inputs
        n_o = n_h + config.n_hidden
        cap = int(horizon)

        def make(n, pulse):
            w0 = config.init_weight if config.init_weight is not None else 1.0 / (n * horizon)
            u = BistableUnit.create(n, w0, tau=config.tau, pulse=pulse, cap=cap)
            if rng is not None:
                u.off_bank.w *= rng.uniform(1 - jitter, 1 + jitter, n)
                u.on_bank.w *= rng.uniform(1 - jitter, 1 + jitter, n)
            return u

        hidden = [make(n_h, False) for _ in range(config.n_hidden)]
        outputs = [make(n_o, config.pulse_outputs) for _ in range(config.n_outputs)]
        return cls(config, hidden, outputs)

    def copy(self):
        return LtddmNetwork(self.config, [h.copy() for h in self.hidden],
                            [o.copy() for o in self.outputs])

    def restart(self, hidden=True):
        for u in self.outputs:
            u.restart()
        if hidden:
            for u in self.hidden:
                u.restart()

    def set_cap(self, cap):
        for u in self.hidden + self.outputs:
            u.off_bank.cap = cap
            u.on_bank.cap = cap

    def _output_stimulus(self, x_in, t):
        hs = [h.step(np.concatenate(([1], x_in)), t) for h in self.hidden]
        return np.concatenate(([1], x_in, hs)).astype(np.int64), hs

    def forward_step(self, x_in, t):
        """Unclamped step on raw inputs ``x_in`` (no bias). Returns output states."""
        x_in = np.asarray(x_in, dtype=np.int64)
        if x_in.shape != (self.config.n_inputs,):
            raise DimensionMismatch(f"expected {self.config.n_inputs} inputs, got {x_in.shape}")
        x_out, _ = self._output_stimulus(x_in, t)
        return [o.step(x_out, t) for o in self.outputs]

    def clamped_step(self, x_in, t, targets, eta):
        """Training step: force outputs to ``targets`` and correct at transitions."""
        x_in = np.asarray(x_in, dtype=np.int64)
        x_out, hs = self._output_stimulus(x_in, t)
        corrections = []
        for unit, want in zip(self.outputs, targets):
            unit.advance(x_out, t)
            if unit.pulse:
                change = want == ON
            else:
                change = want != unit.state
            if change:
                corrections.append(learning.correct_output_clamped(unit, t, eta))
        if corrections and self.hidden:
            self._correct_hidden(corrections, hs, eta)

    def _correct_hidden(self, corrections, hidden_states, eta):
        usable = [c for c in corrections if c.grad_a is not None]
        if not usable:
            return
        widest = max(usable, key=lambda c: int(c.accumulators[0]))
        a_t1 = int(widest.accumulators[0])
        offset = 1 + self.config.n_inputs
        for h, unit in enumerate(self.hidden):
            idx = offset + h
            g = learning.sum_hidden_requests([c.grad_a for c in usable], idx)
            a_th = int(widest.accumulators[idx])
            # the hidden unit can only add or remove the steps it has left in the window
            g = float(np.clip(g, -(a_t1 - a_th), a_th))
            req = learning.route_hidden_correction(hidden_states[h], g, a_th, a_t1)
            try:
                learning.apply_timing_shift(unit, req, eta)
            except DegenerateWindow:
                logger.debug("skipped degenerate timing shift on hidden unit %d", h)

    def train_epoch(self, Y, X, eta=None):
        """One clamped pass over ``Y`` followed by an unclamped evaluation.

        Returns the summed free-run STE over the output streams.
        """
        eta = self.config.eta if eta is None else eta
        Y = np.asarray(Y, dtype=np.int64)
        X = np.asarray(X, dtype=np.int64)
        self.restart(hidden=self.config.reset_hidden_each_epoch)
        for t in range(Y.shape[0]):
            self.clamped_step(X[t], t, Y[t], eta)
        pred = self.copy().free_run(X)
        return sum(ste_total(Y[:, o], pred[:, o]) for o in range(Y.shape[1]))

    def free_run(self, X=None, n_steps=None, autoregressive=False, return_hidden=False):
        """Unclamped pass.

        With ``autoregressive=False`` the inputs are read from ``X``. With
        ``autoregressive=True`` the previous step's outputs are fed back as
        inputs (requires ``n_inputs == n_outputs``), for ``n_steps`` steps.
        """
        if autoregressive:
            if self.config.n_inputs != self.config.n_outputs:
                raise DimensionMismatch("autoregressive mode needs n_inputs == n_outputs")
            T = int(n_steps)
        else:
            X = np.asarray(X, dtype=np.int64)
            if X.ndim != 2 or X.shape[1] != self.config.n_inputs:
                raise DimensionMismatch(
                    f"inputs must have shape (T, {self.config.n_inputs}), got {X.shape}")
            T = X.shape[0] if n_steps is None else int(n_steps)
        self.restart()
        out = np.zeros((T, len(self.outputs)), dtype=np.uint8)
        hid = np.zeros((T, len(self.hidden)), dtype=np.uint8)
        prev = np.zeros(self.config.n_inputs, dtype=np.int64)
        for t in range(T):
            x_in = prev if autoregressive else X[t]
            x_out, hs = self._output_stimulus(x_in, t)
            out[t] = [o.step(x_out, t) for o in self.outputs]
            hid[t] = hs
            if autoregressive:
                prev = out[t].astype(np.int64)
        if return_hidden:
            return out, hid
        return out

    def fit(self, Y, X, epochs=None, delta=0.01, k=5, callback=None):
        """Train for ``epochs`` epochs. Returns a :class:`TrainTrace`."""
        epochs = self.config.epochs if epochs is None else epochs
        Y = np.asarray(Y, dtype=np.int64)
        X = np.asarray(X, dtype=np.int64)
        self.set_cap(Y.shape[0])
        trace = TrainTrace()
        pred = self.copy().free_run(X)
        trace.initial_ste = float(sum(ste_total(Y[:, o], pred[:, o]) for o in range(Y.shape[1])))
        for e in range(epochs):
            s = self.train_epoch(Y, X)
            trace.ste.append(float(s))
            if callback is not None:
                callback(e, s)
        conv = detect_convergence(trace.curve, delta, k)
        trace.convergence_epoch = conv
        trace.converged = [conv is not None and e + 1 >= conv for e in range(len(trace.ste))]
        return trace


def detect_convergence(trace, delta=0.01, k=5):
    """First epoch after which the error stops moving.

    Epoch ``e`` qualifies when each of the next ``k`` consecutive changes
    (fewer at the end of the trace, but at least one) is smaller than
    ``delta * max(trace[0], 1)``. Returns ``None`` when no epoch does.
    """
    trace = [float(v) for v in trace]
    if not trace:
        raise ValueError("empty trace")
    if len(trace) == 1:
        return 0
    tol = delta * max(trace[0], 1.0)
    steady = [abs(trace[i] - trace[i + 1]) < tol for i in range(len(trace) - 1)]
    for e in range(len(steady)):
        if all(steady[e:e + k]):
            return e
    return None


def first_zero_epoch(trace):
    """Index of the first epoch with zero error, or ``None``."""
    for e, v in enumerate(trace):
        if v == 0:
            return e
    return None
