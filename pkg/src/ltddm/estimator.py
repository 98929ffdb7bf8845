"""Scikit-learn style estimators wrapping one or more networks.

Both estimators learn to predict a ``(T, n_streams)`` binary event matrix.
In the default autoencoder mode, ``fit(X)`` uses ``X`` as both target and
(shifted by one step) input. Passing ``y`` trains on explicit inputs
``X`` and targets ``y`` instead.

With ``topology="per-stream"`` every target stream gets its own network,
trained independently (in parallel with ``n_jobs``); with ``"joint"`` a
single network predicts all streams and sees all of them as input.
"""

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import checkpoint
from ._validation import check_event_matrix, check_positive, check_same_horizon
from .exceptions import DimensionMismatch
from .network import JOINT, PER_STREAM, LtddmNetwork, NetworkConfig, detect_convergence, first_zero_epoch, teacher_inputs
from .ste import ste_total

INPUT_MODES = ("previous", "bias")


def _train_network(config, Y, X, seed, jitter, delta, k):
    rng = None if seed is None else np.random.default_rng(seed)
    net = LtddmNetwork.build(config, Y.shape[0], rng=rng, jitter=jitter)
    trace = net.fit(Y, X, delta=delta, k=k)
    return net, trace


class LTDDM(BaseEstimator):
    """Latent timing network: bistable outputs over a free-running hidden layer.

    Parameters
    ----------
    n_hidden : int or None
        Hidden units per network; ``None`` means one per predicted stream.
    lr : float
        Learning rate in (0, 1].
    tau : float
        Firing threshold of every bank.
    epochs : int
        Training epochs (full passes over the sequence).
    topology : {"per-stream", "joint"}
    inputs : {"previous", "bias"}
        ``"previous"`` feeds the inputs to the network; ``"bias"`` gives it
        the bias stimulus only, so it can learn pure intervals.
    pulse_outputs : bool
        One-step output events instead of held ON/OFF states.
    reset_hidden_each_epoch : bool
    init_jitter : float
        Relative jitter of initial weights, drawn from ``random_state``.
        Zero gives the deterministic constant initialisation.
    random_state : int or None
    n_jobs : int or None
        Worker processes for per-stream training.
    convergence_delta, convergence_k : float, int
        Settings of the convergence detector run on the learning curve.
    """

    def __init__(self, n_hidden=None, lr=0.1, tau=1.0, epochs=200, topology=PER_STREAM,
                 inputs="previous", pulse_outputs=False, reset_hidden_each_epoch=True,
                 init_jitter=0.0, random_state=None, n_jobs=None,
                 convergence_delta=0.01, convergence_k=5):
        self.n_hidden = n_hidden
        self.lr = lr
        self.tau = tau
        self.epochs = epochs
        self.topology = topology
        self.inputs = inputs
        self.pulse_outputs = pulse_outputs
        self.reset_hidden_each_epoch = reset_hidden_each_epoch
        self.init_jitter = init_jitter
        self.random_state = random_state
        self.n_jobs = n_jobs
        self.convergence_delta = convergence_delta
        self.convergence_k = convergence_k

    # -- validation ---------------------------------------------------------

    def _check_params(self):
        check_positive(self.lr, "lr", upper=1.0)
        check_positive(self.tau, "tau")
        if int(self.epochs) != self.epochs or self.epochs < 0:
            raise ValueError(f"epochs must be a non-negative integer, got {self.epochs}")
        if self.n_hidden is not None and (int(self.n_hidden) != self.n_hidden or self.n_hidden < 0):
            raise ValueError(f"n_hidden must be a non-negative integer or None, got {self.n_hidden}")
        if self.topology not in (PER_STREAM, JOINT):
            raise ValueError(f"topology must be {PER_STREAM!r} or {JOINT!r}, got {self.topology!r}")
        if self.inputs not in INPUT_MODES:
            raise ValueError(f"inputs must be one of {INPUT_MODES}, got {self.inputs!r}")
        if not 0 <= self.init_jitter < 1:
            raise ValueError(f"init_jitter must lie in [0, 1), got {self.init_jitter}")

    def _layout(self, n_in, n_out):
        """Per network: (output columns, input columns)."""
        bias_only = self.inputs == "bias"
        if self.topology == JOINT:
            return [(list(range(n_out)), [] if bias_only else list(range(n_in)))]
        if self.autoencoder_:
            return [([j], [] if bias_only else [j]) for j in range(n_out)]
        return [([j], [] if bias_only else list(range(n_in))) for j in range(n_out)]

    def _inputs_for(self, X):
        X = check_event_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} streams, got {X.shape[1]}")
        return teacher_inputs(X) if self.autoencoder_ else X.astype(np.int64)

    # -- estimator API -------------------------------------------------------

    def fit(self, X, y=None):
        self._check_params()
        X = check_event_matrix(X)
        self.autoencoder_ = y is None
        if self.autoencoder_:
            Y = X
        else:
            Y = check_event_matrix(y)
            check_same_horizon(X, Y)
        self.n_features_in_ = X.shape[1]
        self.n_outputs_ = Y.shape[1]
        inputs = teacher_inputs(X) if self.autoencoder_ else X.astype(np.int64)
        self.layout_ = self._layout(X.shape[1], Y.shape[1])

        seeds = [None] * len(self.layout_)
        if self.init_jitter > 0:
            ss = np.random.SeedSequence(self.random_state)
            seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(len(self.layout_))]
        jobs = []
        for (outs, ins), seed in zip(self.layout_, seeds):
            config = NetworkConfig(
                n_inputs=len(ins), n_outputs=len(outs),
                n_hidden=len(outs) if self.n_hidden is None else int(self.n_hidden),
                eta=float(self.lr), tau=float(self.tau), epochs=int(self.epochs),
                pulse_outputs=bool(self.pulse_outputs),
                reset_hidden_each_epoch=bool(self.reset_hidden_each_epoch),
            )
            jobs.append(delayed(_train_network)(
                config, Y[:, outs].astype(np.int64), inputs[:, ins], seed,
                self.init_jitter, self.convergence_delta, self.convergence_k))
        n_jobs = 1 if len(jobs) == 1 else self.n_jobs
        results = Parallel(n_jobs=n_jobs)(jobs)
        self.networks_ = [net for net, _ in results]
        self.traces_ = [trace for _, trace in results]
        return self

    @property
    def learning_curve_(self):
        """Total free-run STE after each number of completed epochs (index 0: untrained)."""
        check_is_fitted(self, "traces_")
        if not self.traces_:
            raise AttributeError("no training history (estimator was loaded from a checkpoint)")
        return np.sum([t.curve for t in self.traces_], axis=0).astype(np.float64)

    @property
    def convergence_epoch_(self):
        return detect_convergence(self.learning_curve_, self.convergence_delta, self.convergence_k)

    @property
    def epochs_to_zero_(self):
        return first_zero_epoch(self.learning_curve_)

    def predict(self, X, return_hidden=False):
        """Unclamped predictions, shape ``(T, n_outputs)``.

        ``X`` is the observed event matrix; in autoencoder mode each
        prediction only sees inputs up to the previous step.
        """
        check_is_fitted(self, "networks_")
        inputs = self._inputs_for(X)
        out = np.zeros((inputs.shape[0], self.n_outputs_), dtype=np.uint8)
        hidden = []
        for net, (outs, ins) in zip(self.networks_, self.layout_):
            pred, hid = net.copy().free_run(inputs[:, ins], return_hidden=True)
            out[:, outs] = pred
            hidden.append(hid)
        if return_hidden:
            return out, hidden
        return out

    def generate(self, n_steps, X=None, mode="autoregressive"):
        """Roll the model forward for ``n_steps`` steps.

        ``mode="teacher"`` reads inputs from ``X`` like :meth:`predict`;
        ``"autoregressive"`` feeds each step's predictions back as the next
        inputs (autoencoder models only, or bias-only inputs).
        """
        check_is_fitted(self, "networks_")
        n_steps = int(n_steps)
        if n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if mode == "teacher":
            if X is None:
                raise ValueError("teacher mode needs observed inputs X")
            return self.predict(np.asarray(X)[:n_steps])
        if mode != "autoregressive":
            raise ValueError(f"unknown mode {mode!r}")
        if not self.autoencoder_ and self.inputs != "bias":
            raise ValueError("autoregressive generation needs an autoencoder model")
        nets = [n.copy() for n in self.networks_]
        for n in nets:
            n.restart()
        out = np.zeros((n_steps, self.n_outputs_), dtype=np.uint8)
        prev = np.zeros(self.n_outputs_, dtype=np.int64)
        for t in range(n_steps):
            for net, (outs, ins) in zip(nets, self.layout_):
                out[t, outs] = net.forward_step(prev[ins], t)
            prev = out[t].astype(np.int64)
        return out

    def score(self, X, y=None):
        """Negative total STE of the predictions (higher is better)."""
        pred = self.predict(X)
        Y = check_event_matrix(X if y is None else y)
        return -float(sum(ste_total(Y[:, j], pred[:, j]) for j in range(Y.shape[1])))

    # -- persistence -----------------------------------------------------------

    def to_checkpoint(self, names=None):
        check_is_fitted(self, "networks_")
        names = names or [f"s{j}" for j in range(self.n_outputs_)]
        params = {k: v for k, v in self.get_params().items() if k != "n_jobs"}
        params = dict(params, model=type(self).__name__,
                      autoencoder=self.autoencoder_, n_features_in=self.n_features_in_,
                      inputs_layout=[ins for _, ins in self.layout_])
        return checkpoint.dumps(self.networks_, [outs for outs, _ in self.layout_], names, params)

    @classmethod
    def from_checkpoint(cls, text):
        """Rebuild a fitted estimator; returns ``(estimator, stream_names)``."""
        networks, groups, names, params = checkpoint.loads(text)
        params = dict(params)
        kind = params.pop("model", cls.__name__)
        autoencoder = params.pop("autoencoder")
        n_in = params.pop("n_features_in")
        ins_layout = params.pop("inputs_layout")
        est_cls = MODELS.get(kind.lower(), cls)
        est = est_cls(**params)
        est.autoencoder_ = autoencoder
        est.n_features_in_ = n_in
        est.n_outputs_ = sum(len(g) for g in groups)
        est.layout_ = list(zip(groups, ins_layout))
        est.networks_ = networks
        est.traces_ = []
        return est, names


class TDDM(LTDDM):
    """Plain timing units: one-step output events and no hidden layer."""

    def __init__(self, n_hidden=0, lr=0.1, tau=1.0, epochs=200, topology=PER_STREAM,
                 inputs="previous", pulse_outputs=True, reset_hidden_each_epoch=True,
                 init_jitter=0.0, random_state=None, n_jobs=None,
                 convergence_delta=0.01, convergence_k=5):
        super().__init__(n_hidden=n_hidden, lr=lr, tau=tau, epochs=epochs, topology=topology,
                         inputs=inputs, pulse_outputs=pulse_outputs,
                         reset_hidden_each_epoch=reset_hidden_each_epoch,
                         init_jitter=init_jitter, random_state=random_state, n_jobs=n_jobs,
                         convergence_delta=convergence_delta, convergence_k=convergence_k)


MODELS = {"ltddm": LTDDM, "tddm": TDDM}
