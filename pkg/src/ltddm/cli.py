"""Command-line experiment runner.

Every option can also come from a flat JSON file passed with ``--config``;
keys are the long option names with dashes replaced by underscores.
Command-line flags override the file, and unknown keys are rejected.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import datasets, metrics, plotting
from .estimator import LTDDM, MODELS
from .exceptions import DimensionMismatch, HorizonMismatch, LtddmError
from .ste import ste_total

logger = logging.getLogger("ltddm")

FORMATS = ("events", "signal", "prices", "music")
SYNTH_KINDS = ("fixed", "on-off", "two-interval")

# name: (type, default, choices, help)
OPTIONS = {
    "data": (str, None, None, "input data file"),
    "format": (str, "events", FORMATS, "how to read --data"),
    "threshold": (float, 0.5, None, "peak threshold for --format signal"),
    "min_separation": (int, 1, None, "minimum peak separation for --format signal"),
    "window": (int, 14, None, "rolling window for --format prices"),
    "z": (float, 0.7, None, "standard deviations above the mean for --format prices"),
    "model": (str, "ltddm", tuple(MODELS), "model family"),
    "hidden": (int, None, None, "hidden units per network (default: one per output)"),
    "inputs": (str, "previous", ("previous", "bias"), "stimulus fed to the networks"),
    "lr": (float, 0.1, None, "learning rate"),
    "tau": (float, 1.0, None, "firing threshold"),
    "epochs": (int, 200, None, "training epochs"),
    "topology": (str, "per-stream", ("per-stream", "joint"), "one network per stream or one for all"),
    "jitter": (float, 0.0, None, "relative jitter of initial weights, drawn with --seed"),
    "seed": (int, 0, None, "random seed"),
    "workers": (int, 1, None, "parallel worker processes"),
    "out": (str, None, None, "output directory"),
    "plot": (bool, False, None, "also write SVG plots"),
    "checkpoint": (str, None, None, "checkpoint file to load"),
    "steps": (int, None, None, "number of steps to generate or synthesize"),
    "mode": (str, "teacher", ("teacher", "autoregressive"), "input mode for generate"),
    "kind": (str, "fixed", SYNTH_KINDS, "synthetic stream shape"),
    "interval": (int, 10, None, "interval for --kind fixed"),
    "on": (int, 4, None, "ON duration for --kind on-off and two-interval"),
    "off": (int, 8, None, "OFF duration for --kind on-off"),
    "gap_short": (int, 4, None, "short gap for --kind two-interval"),
    "gap_long": (int, 10, None, "long gap for --kind two-interval"),
}

COMMAND_OPTIONS = {
    "train": ["data", "format", "threshold", "min_separation", "window", "z", "model", "hidden",
              "inputs", "lr", "tau", "epochs", "topology", "jitter", "seed", "workers", "out", "plot"],
    "eval": ["data", "format", "threshold", "min_separation", "window", "z", "checkpoint", "out"],
    "generate": ["checkpoint", "data", "format", "threshold", "min_separation", "window", "z",
                 "steps", "mode", "out", "plot"],
    "ste": ["out"],
    "synth": ["kind", "interval", "on", "off", "gap_short", "gap_long", "steps", "out", "plot"],
    "baseline": ["data", "format", "threshold", "min_separation", "window", "z", "out"],
}

METRIC_FIELDS = ["model", "stream", "precision", "recall", "f1", "accuracy", "ste"]


class UsageError(LtddmError):
    """Bad command-line or config input."""


def _convert(name, value):
    typ, _, choices, _ = OPTIONS[name]
    if value is None:
        return None
    if typ is bool:
        if not isinstance(value, bool):
            raise UsageError(f"{name} must be true or false, got {value!r}")
    elif typ is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise UsageError(f"{name} must be an integer, got {value!r}")
        value = int(value)
    elif typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise UsageError(f"{name} must be a number, got {value!r}")
        value = float(value)
    elif not isinstance(value, str):
        raise UsageError(f"{name} must be a string, got {value!r}")
    if choices and value not in choices:
        raise UsageError(f"{name} must be one of {', '.join(choices)}, got {value!r}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="ltddm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "train": "train a model and write its checkpoint, learning curve and metrics",
        "eval": "score a checkpoint on data against the two baselines",
        "generate": "write predictions of a checkpoint",
        "ste": "squared timing error between two event CSV files",
        "synth": "write a synthetic event stream",
        "baseline": "score the majority and reactive baselines",
    }
    for cmd, names in COMMAND_OPTIONS.items():
        p = sub.add_parser(cmd, help=helps[cmd])
        p.add_argument("--config", help="flat JSON file of option values")
        for name in names:
            typ, _, choices, help_ = OPTIONS[name]
            flag = "--" + name.replace("_", "-")
            if typ is bool:
                p.add_argument(flag, dest=name, action="store_true", default=argparse.SUPPRESS,
                               help=help_)
            else:
                p.add_argument(flag, dest=name, type=typ, choices=choices,
                               default=argparse.SUPPRESS, help=help_)
        if cmd == "ste":
            p.add_argument("reference", help="event CSV of observed streams")
            p.add_argument("predicted", help="event CSV of predicted streams")
    return parser


def resolve_options(command, args):
    """Defaults, then the JSON config, then explicit flags."""
    names = COMMAND_OPTIONS[command]
    opts = {n: OPTIONS[n][1] for n in names}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        unknown = sorted(set(cfg) - set(names))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        opts.update({k: _convert(k, v) for k, v in cfg.items()})
    for n in names:
        if hasattr(args, n):
            opts[n] = getattr(args, n)
    return opts


def _need(opts, *names):
    missing = [n for n in names if opts.get(n) is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


def load_data(opts):
    path = opts["data"]
    fmt = opts["format"]
    if fmt == "events":
        return datasets.load_event_csv(path)
    if fmt == "signal":
        return datasets.load_signal_csv(path, opts["threshold"], opts["min_separation"])
    if fmt == "prices":
        return datasets.load_price_csv(path, opts["window"], opts["z"])
    return datasets.load_music(path)


def _out_dir(opts):
    if opts.get("out") is None:
        return None
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _num(v):
    return repr(float(v))


def metric_rows(label, names, Y, P):
    """Rows for ``metrics.csv``: one per stream, then pooled and macro summaries."""
    per, micro, macro = metrics.pooled_and_macro(Y, P)
    stes = [ste_total(Y[:, j], P[:, j]) for j in range(Y.shape[1])]
    rows = []
    for name, c, s in zip(names, per, stes):
        sc = metrics.scores(c)
        rows.append([label, name] + [_num(sc[k]) for k in METRIC_FIELDS[2:6]] + [_num(s)])
    total = _num(sum(stes))
    rows.append([label, "pooled"] + [_num(micro[k]) for k in METRIC_FIELDS[2:6]] + [total])
    rows.append([label, "macro"] + [_num(macro[k]) for k in METRIC_FIELDS[2:6]] + [total])
    return rows


def baseline_rows(names, Y):
    majority = np.column_stack([metrics.majority_baseline(Y[:, j])[0] for j in range(Y.shape[1])])
    reactive = np.column_stack([metrics.reactive_baseline(Y[:, j]) for j in range(Y.shape[1])])
    return metric_rows("majority", names, Y, majority) + metric_rows("reactive", names, Y, reactive)


def _load_checkpoint(path):
    return LTDDM.from_checkpoint(Path(path).read_text(encoding="utf-8"))


def cmd_train(opts):
    _need(opts, "data")
    table = load_data(opts)
    est = MODELS[opts["model"]](
        lr=opts["lr"], tau=opts["tau"], epochs=opts["epochs"], topology=opts["topology"],
        inputs=opts["inputs"], init_jitter=opts["jitter"], random_state=opts["seed"],
        n_jobs=opts["workers"],
    )
    if opts["hidden"] is not None:
        est.set_params(n_hidden=opts["hidden"])
    logger.info("training %s on %d streams of %d steps", opts["model"], len(table), table.horizon)
    est.fit(table.data)
    Y = table.data
    P = est.predict(Y)
    curve = est.learning_curve_
    conv = est.convergence_epoch_
    summary = {
        "streams": len(table),
        "horizon": table.horizon,
        "initial_ste": float(curve[0]),
        "final_ste": float(curve[-1]),
        "convergence_epoch": conv,
        "epochs_to_zero": est.epochs_to_zero_,
    }
    out = _out_dir(opts)
    if out is not None:
        n = len(table)
        _write_csv(out / "ste_curve.csv", ["epoch", "ste_total", "ste_mean"],
                   [[e, _num(v), _num(v / n)] for e, v in enumerate(curve)])
        (out / "checkpoint.txt").write_text(est.to_checkpoint(table.names), encoding="utf-8")
        _write_csv(out / "metrics.csv", METRIC_FIELDS,
                   metric_rows(opts["model"], table.names, Y, P) + baseline_rows(table.names, Y))
        datasets.write_event_csv(datasets.EventTable(table.names, P), out / "predictions.csv")
        if opts["plot"]:
            plotting.write_svg(out / "learning_curve.svg",
                               plotting.learning_curve_svg(curve / n, conv))
            plotting.write_svg(out / "raster.svg", _raster(table.names, Y, P))
    print(json.dumps(summary, sort_keys=True))
    return 0


def _raster(names, Y, P, limit=100):
    rows, labels = [], []
    for j, name in enumerate(names):
        rows += [Y[:limit, j], P[:limit, j]]
        labels += [f"{name}", f"{name} pred"]
    return plotting.raster_svg(rows, labels, title="observed and predicted events")


def cmd_eval(opts):
    _need(opts, "data", "checkpoint")
    table = load_data(opts)
    est, names = _load_checkpoint(opts["checkpoint"])
    if est.n_features_in_ != len(table):
        raise DimensionMismatch(f"checkpoint expects {est.n_features_in_} streams, data has {len(table)}")
    P = est.predict(table.data)
    label = type(est).__name__.lower()
    rows = metric_rows(label, table.names, table.data, P) + baseline_rows(table.names, table.data)
    out = _out_dir(opts)
    _write_csv(None if out is None else out / "metrics.csv", METRIC_FIELDS, rows)
    return 0


def cmd_generate(opts):
    _need(opts, "checkpoint")
    est, names = _load_checkpoint(opts["checkpoint"])
    table = load_data(opts) if opts["data"] else None
    if opts["mode"] == "teacher":
        if table is None:
            raise UsageError("teacher mode needs --data")
        steps = opts["steps"] or table.horizon
        P = est.generate(steps, X=table.data, mode="teacher")
    else:
        _need(opts, "steps")
        P = est.generate(opts["steps"], mode="autoregressive")
    out = _out_dir(opts)
    pred = datasets.EventTable(names, P)
    if out is None:
        datasets.write_event_csv(pred, sys.stdout)
    else:
        datasets.write_event_csv(pred, out / "predictions.csv")
        if opts["plot"] and table is not None:
            n = min(len(P), table.horizon)
            plotting.write_svg(out / "raster.svg", _raster(names, table.data[:n], P[:n]))
    return 0


def cmd_ste(opts, reference, predicted):
    a = datasets.load_event_csv(reference)
    b = datasets.load_event_csv(predicted)
    if a.names != b.names:
        raise UsageError(f"stream names differ: {a.names} vs {b.names}")
    if a.horizon != b.horizon:
        raise HorizonMismatch(f"horizons differ: {a.horizon} != {b.horizon}")
    stes = [ste_total(a.data[:, j], b.data[:, j]) for j in range(len(a))]
    rows = [[n, _num(s)] for n, s in zip(a.names, stes)] + [["total", _num(sum(stes))]]
    out = _out_dir(opts)
    _write_csv(None if out is None else out / "ste.csv", ["stream", "ste"], rows)
    return 0


def cmd_synth(opts):
    _need(opts, "steps")
    T = opts["steps"]
    kind = opts["kind"]
    if kind == "fixed":
        y = datasets.synth_fixed_interval(opts["interval"], T)
    elif kind == "on-off":
        y = datasets.synth_on_off(opts["on"], opts["off"], T)
    else:
        y = datasets.synth_two_interval(opts["on"], opts["gap_short"], opts["gap_long"], T)
    table = datasets.EventTable([kind], y[:, None])
    out = _out_dir(opts)
    if out is None:
        datasets.write_event_csv(table, sys.stdout)
    else:
        datasets.write_event_csv(table, out / "synth.csv")
        if opts["plot"]:
            plotting.write_svg(out / "synth.svg", plotting.raster_svg([y], [kind], title=kind))
    return 0


def cmd_baseline(opts):
    _need(opts, "data")
    table = load_data(opts)
    out = _out_dir(opts)
    _write_csv(None if out is None else out / "metrics.csv", METRIC_FIELDS,
               baseline_rows(table.names, table.data))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        opts = resolve_options(args.command, args)
        if args.command == "ste":
            return cmd_ste(opts, args.reference, args.predicted)
        handler = {"train": cmd_train, "eval": cmd_eval, "generate": cmd_generate,
                   "synth": cmd_synth, "baseline": cmd_baseline}[args.command]
        return handler(opts)
    except (LtddmError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
