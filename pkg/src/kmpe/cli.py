"""
Config-driven experiment runner.

Subcommands::

    kmpe run CONFIG [--set key.path=value ...]
    kmpe props [--vectors N] [--seed S] [--output-dir DIR]
    kmpe schema VERSION

Configs are YAML mappings with a ``task`` key.  Every key has a default
(see :data:`TASK_DEFAULTS`); unknown keys are rejected.  Trial ``t`` runs with
seed ``seed + t``.  ``KMPE_MAX_WORKERS`` caps the number of trials that run
in parallel; outputs are assembled in trial order regardless.

Exit codes: 0 success, 1 property check failure, 2 config error,
3 numerical failure (divergence or a singular system).
"""
from __future__ import annotations

import argparse
import copy
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import data as kdata
from . import elm, metrics, pca
from .core import KernelParams, run_property_suite
from .errors import DegenerateWeightsError, DomainError, ParseError

EXIT_OK, EXIT_PROPS_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SCHEMA_VERSION = 1
SUMMARY_HEADER = "trial,seed,train_metric,test_metric"
TRACE_HEADER = "iteration,loss"
CURVE_HEADER = "x,y_true,y_pred"
COMPARISON_HEADER = "algorithm,train_mean,train_std,test_mean,test_std"
PROPS_HEADER = "property,checks,max_error,tolerance,passed"

_SCHEMAS = {
    1: "\n".join([
        "kmpe report format version 1",
        f"summary.csv: {SUMMARY_HEADER}",
        "  one row per trial, then rows 'mean' and 'std' (sample std, ddof=1) with an empty seed",
        "  sinc_bench, elm: train_metric and test_metric are RMSE (regression) or accuracy (classification)",
        "  pca_recon: train_metric is the reconstruction error against the corrupted data,"
        " test_metric against the clean data",
        "  cluster_eval: train_metric is clustering accuracy, test_metric is NMI",
        f"trace.csv: {TRACE_HEADER}",
        "  loss per iteration of the last trial; iteration 0 is the starting loss when defined",
        f"curve.csv: {CURVE_HEADER}",
        "  sinc_bench only; last trial test inputs sorted by x",
        f"comparison.csv: {COMPARISON_HEADER}",
        f"props.csv: {PROPS_HEADER}",
    ]) + "\n",
}


def report_format(version) -> str:
    """CSV column schemas for a report format version."""
    try:
        return _SCHEMAS[int(version)]
    except (KeyError, TypeError, ValueError):
        raise DomainError(f"unknown report format version {version!r}; known: {sorted(_SCHEMAS)}") from None


class ConfigError(ValueError):
    pass


class TrialFailure(ArithmeticError):
    def __init__(self, trial, seed, cause):
        super().__init__(f"trial {trial} (seed {seed}) failed: {cause}")
        self.trial, self.seed, self.cause = trial, seed, cause


# ---------------------------------------------------------------------------
# configuration

_COMMON = {"task": None, "trials": 1, "seed": 0, "output_dir": "kmpe_out"}

_NOISE = {"c": 0.1, "low": -1.0, "high": 1.0, "outlier_std": 3.0}
_TRAIN = {"max_iter": 100, "tol": 1e-6, "backtrack": True}

# Parameter rows for the sinc benchmark, keyed by background.
SINC_TABLE = {
    "uniform": {
        "elm": {"L": 20},
        "relm": {"L": 90, "lambda": 5e-5},
        "elm_rcc": {"L": 90, "lambda_prime": 1e-6, "sigma": 1.5, "p": 2.0},
        "kmpe": {"L": 90, "lambda_prime": 2e-6, "sigma": 0.8, "p": 4.0},
    },
    "sine": {
        "elm": {"L": 10},
        "relm": {"L": 40, "lambda": 5e-5},
        "elm_rcc": {"L": 25, "lambda_prime": 5e-6, "sigma": 2.0, "p": 2.0},
        "kmpe": {"L": 25, "lambda_prime": 2.5e-6, "sigma": 1.2, "p": 3.4},
    },
}

TASK_DEFAULTS = {
    "sinc_bench": {
        "background": "uniform",
        "n_train": 200,
        "n_test": 200,
        "noise": _NOISE,
        "hidden": {"activation": "gaussian", "weight_scale": 0.25, "bias_scale": 1.0},
        "train": _TRAIN,
        **SINC_TABLE["uniform"],
    },
    "elm": {
        "source": "sinc",
        "mode": "regression",
        "algorithm": "kmpe",
        "sinc": {"n_train": 200, "n_test": 200, "background": "uniform", "noise": _NOISE},
        "csv": {"path": None, "target_columns": [-1], "train_frac": 0.7, "normalize": True},
        "hidden": {"L": 50, "activation": "sigmoid", "weight_scale": 1.0, "bias_scale": 1.0},
        "lambda": 5e-5,
        "lambda_prime": 2e-6,
        "sigma": 1.0,
        "p": 2.0,
        "train": _TRAIN,
    },
    "pca_recon": {
        "d": 20, "n": 200, "r": 3, "outlier_frac": 0.2, "mode": "occlusion", "noise_std": 0.01,
        "m": 3, "m_r": None, "p": 2.0, "sigma": None, "max_iter": 100, "tol": 1e-6,
    },
    "cluster_eval": {
        "source": "synthetic",
        "synthetic": {"d": 30, "k": 3, "n_per_cluster": 100, "n_outliers": 20, "r": 3,
                      "separation": 6.0, "outlier_scale": 10.0, "noise_std": 0.05},
        "csv": {"path": None, "label_column": -1},
        "k": 3,
        "reduce": "kmpe",
        "m": 3, "p": 10.0, "sigma": None, "max_iter": 100, "tol": 1e-6,
        "kmeans_max_iter": 300,
    },
    "props": {"vectors": 1000, "length": 10},
}

_CHOICES = {
    "background": kdata.BACKGROUNDS,
    "activation": tuple(elm.ACTIVATIONS),
    "mode": ("regression", "classification") + kdata.CORRUPTION_MODES,
    "algorithm": ("kmpe", "ls", "pinv"),
    "source": ("sinc", "csv", "synthetic"),
    "reduce": ("kmpe", "l2", "none"),
}


def _coerce(default, value, path):
    if default is None or value is None:
        return value
    try:
        if isinstance(default, bool):
            if isinstance(value, bool):
                return value
            raise TypeError
        if isinstance(default, int):
            if isinstance(value, bool):
                raise TypeError
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if isinstance(default, float):
            if isinstance(value, bool):
                raise TypeError
            # YAML 1.1 reads "2e-6" as a string
            return float(value)
        if isinstance(default, str):
            if not isinstance(value, str):
                raise TypeError
            return value
        if isinstance(default, list):
            return list(value) if isinstance(value, (list, tuple)) else [value]
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: cannot use {value!r} as {type(default).__name__}") from None
    return value


def _merge(base, override, prefix=""):
    out = copy.deepcopy(base)
    for key, value in override.items():
        path = f"{prefix}{key}"
        if key not in out:
            raise ConfigError(f"unknown config key {path!r}")
        if isinstance(out[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{path}: expected a mapping")
            out[key] = _merge(out[key], value, path + ".")
        else:
            out[key] = _coerce(out[key], value, path)
    return out


def _set_path(doc, dotted, value):
    keys = dotted.split(".")
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {dotted}: {k!r} is not a mapping")
    node[keys[-1]] = value


def _check_choices(cfg, prefix=""):
    for key, value in cfg.items():
        if isinstance(value, dict):
            _check_choices(value, f"{prefix}{key}.")
        elif key in _CHOICES and value not in _CHOICES[key]:
            raise ConfigError(f"{prefix}{key}: {value!r} is not one of {_CHOICES[key]}")


def build_config(doc, overrides=()):
    """
    Merge a parsed config document and ``key.path=value`` overrides onto the
    task defaults.  Raises :class:`ConfigError` on any problem.
    """
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    doc = copy.deepcopy(doc)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"--set {key}: {exc}") from None
        _set_path(doc, key.strip(), value)
    task = doc.get("task")
    if task not in TASK_DEFAULTS:
        raise ConfigError(f"task must be one of {sorted(TASK_DEFAULTS)}, got {task!r}")
    defaults = {**_COMMON, **TASK_DEFAULTS[task]}
    if task == "sinc_bench":
        bg = doc.get("background", "uniform")
        if bg not in SINC_TABLE:
            raise ConfigError(f"background: {bg!r} is not one of {tuple(SINC_TABLE)}")
        defaults.update(copy.deepcopy(SINC_TABLE[bg]))
    cfg = _merge(defaults, doc)
    _check_choices(cfg)
    if cfg["trials"] < 1:
        raise ConfigError("trials must be >= 1")
    return cfg


def load_config(path, overrides=()):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return build_config(doc, overrides)


# ---------------------------------------------------------------------------
# trials


@dataclass
class TrialResult:
    train: float
    test: float
    trace: list = field(default_factory=list)
    curve: np.ndarray | None = None
    extra: dict = field(default_factory=dict)


def layer_seed(trial_seed, stream):
    """Independent 64-bit seed for hidden layer ``stream`` of a trial."""
    state = np.random.SeedSequence([int(trial_seed), int(stream)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _train_cfg(kernel, lambda_prime, tcfg):
    return elm.TrainConfig(kernel, lambda_prime, tcfg["max_iter"], tcfg["tol"], tcfg["backtrack"])


def _kmpe_run(layer, X, T, kernel, lambda_prime, tcfg):
    beta, trace = elm.train_kmpe(layer, X, T, _train_cfg(kernel, lambda_prime, tcfg))
    return beta, [trace.initial_loss] + trace.losses


def _sinc_trial(cfg, seed):
    noise = kdata.NoiseModel(background=cfg["background"], **cfg["noise"])
    train, test = kdata.gen_sinc(cfg["n_train"], cfg["n_test"], noise, seed)
    hid = cfg["hidden"]

    def layer(stream, L):
        return elm.init_hidden(1, L, hid["activation"], layer_seed(seed, stream),
                               hid["weight_scale"], hid["bias_scale"])

    results = {}
    lay = layer(0, cfg["elm"]["L"])
    results["elm"] = (lay, elm.train_pinv(elm.hidden_matrix(lay, train.X), train.targets), None)
    lay = layer(1, cfg["relm"]["L"])
    results["relm"] = (lay, elm.train_ls(elm.hidden_matrix(lay, train.X), train.targets,
                                         cfg["relm"]["lambda"]), None)
    for stream, name in ((2, "elm_rcc"), (3, "kmpe")):
        row = cfg[name]
        lay = layer(stream, row["L"])
        beta, trace = _kmpe_run(lay, train.X, train.targets, KernelParams(row["sigma"], row["p"]),
                                row["lambda_prime"], cfg["train"])
        results[name] = (lay, beta, trace)

    out = {}
    for name, (lay, beta, trace) in results.items():
        tr = metrics.rmse(train.targets, elm.predict(lay, beta, train.X))
        te_pred = elm.predict(lay, beta, test.X)
        out[name] = (tr, metrics.rmse(test.targets, te_pred), trace, te_pred)
    tr, te, trace, pred = out["kmpe"]
    order = np.argsort(test.X[:, 0], kind="stable")
    curve = np.column_stack([test.X[order, 0], test.targets[order, 0], pred[order, 0]])
    extra = {name: (v[0], v[1]) for name, v in out.items() if name != "kmpe"}
    return TrialResult(tr, te, trace, curve, extra)


def _elm_data(cfg, seed):
    if cfg["source"] == "sinc":
        s = cfg["sinc"]
        noise = kdata.NoiseModel(background=s["background"], **s["noise"])
        return kdata.gen_sinc(s["n_train"], s["n_test"], noise, seed)
    if cfg["source"] != "csv":
        raise ConfigError("elm source must be 'sinc' or 'csv'")
    c = cfg["csv"]
    if not c["path"]:
        raise ConfigError("csv.path is required for source 'csv'")
    ds = kdata.load_csv(c["path"], c["target_columns"])
    if ds.targets is None:
        raise ConfigError("csv.target_columns selects no targets")
    train, test = kdata.split(ds, c["train_frac"], seed)
    if c["normalize"]:
        train, scaler = kdata.normalize01(train)
        test = scaler.apply(test)
    return train, test


def _elm_trial(cfg, seed):
    train, test = _elm_data(cfg, seed)
    hid = cfg["hidden"]
    layer = elm.init_hidden(train.X.shape[1], hid["L"], hid["activation"], layer_seed(seed, 0),
                            hid["weight_scale"], hid["bias_scale"])
    classify = cfg["mode"] == "classification"
    if classify:
        if train.targets.shape[1] != 1:
            raise ConfigError("classification needs a single label column")
        labels_tr = train.targets[:, 0].astype(int)
        labels_te = test.targets[:, 0].astype(int)
        k = int(max(labels_tr.max(), labels_te.max())) + 1
        T = elm.one_hot(labels_tr, k)
    elif cfg["mode"] == "regression":
        T = train.targets
    else:
        raise ConfigError("elm mode must be 'regression' or 'classification'")

    trace = []
    H = elm.hidden_matrix(layer, train.X)
    if cfg["algorithm"] == "kmpe":
        beta, trace = _kmpe_run(layer, train.X, T, KernelParams(cfg["sigma"], cfg["p"]),
                                cfg["lambda_prime"], cfg["train"])
    elif cfg["algorithm"] == "ls":
        beta = elm.train_ls(H, T, cfg["lambda"])
    else:
        beta = elm.train_pinv(H, T)

    if classify:
        acc_tr = float(np.mean(elm.classify(layer, beta, train.X) == labels_tr))
        acc_te = float(np.mean(elm.classify(layer, beta, test.X) == labels_te))
        return TrialResult(acc_tr, acc_te, trace)
    tr = metrics.rmse(train.targets, elm.predict(layer, beta, train.X))
    te = metrics.rmse(test.targets, elm.predict(layer, beta, test.X))
    return TrialResult(tr, te, trace)


def _pca_cfg(cfg):
    sigma = cfg["sigma"]
    if sigma == "auto":
        sigma = None
    elif sigma is not None:
        try:
            sigma = float(sigma)
        except (TypeError, ValueError):
            raise ConfigError(f"sigma: expected a number or 'auto', got {sigma!r}") from None
    m_r = cfg.get("m_r")
    return pca.PcaConfig(int(cfg["m"]), float(cfg["p"]), sigma, int(cfg["max_iter"]), float(cfg["tol"]),
                         None if m_r is None else int(m_r))


def _pca_trial(cfg, seed):
    if cfg["mode"] not in kdata.CORRUPTION_MODES:
        raise ConfigError(f"pca_recon mode must be one of {kdata.CORRUPTION_MODES}")
    clean, corrupted = kdata.gen_lowrank_corrupted(cfg["d"], cfg["n"], cfg["r"], cfg["outlier_frac"],
                                                   cfg["mode"], seed, cfg["noise_std"])
    Xo, X = clean.X.T, corrupted.X.T
    sub, trace = pca.fit_kmpe(X, _pca_cfg(cfg))
    base = pca.fit_l2(X, cfg["m"])
    extra = {"l2": (pca.avg_reconstruction_error(base, X, X), pca.avg_reconstruction_error(base, Xo, X))}
    return TrialResult(pca.avg_reconstruction_error(sub, X, X), pca.avg_reconstruction_error(sub, Xo, X),
                       list(trace.objective), extra=extra)


def _cluster_trial(cfg, seed):
    if cfg["source"] == "synthetic":
        s = cfg["synthetic"]
        inliers, outliers = kdata.gen_clusters(s["d"], s["k"], s["n_per_cluster"], s["n_outliers"], seed,
                                               s["r"], s["separation"], s["outlier_scale"], s["noise_std"])
        X_fit = np.vstack([inliers.X, outliers.X])
        X_eval, labels = inliers.X, inliers.targets[:, 0].astype(int)
    elif cfg["source"] == "csv":
        c = cfg["csv"]
        if not c["path"]:
            raise ConfigError("csv.path is required for source 'csv'")
        ds = kdata.load_csv(c["path"], [c["label_column"]])
        X_fit = X_eval = ds.X
        labels = ds.targets[:, 0].astype(int)
    else:
        raise ConfigError("cluster_eval source must be 'synthetic' or 'csv'")

    trace = []
    if cfg["reduce"] == "none":
        Z = X_eval
    else:
        if cfg["reduce"] == "kmpe":
            sub, tr = pca.fit_kmpe(X_fit.T, _pca_cfg(cfg))
            trace = list(tr.objective)
        else:
            sub = pca.fit_l2(X_fit.T, cfg["m"])
        Z = (sub.W.T @ (X_eval.T - sub.mu[:, None])).T
    pred = metrics.kmeans(Z, cfg["k"], seed, cfg["kmeans_max_iter"])
    return TrialResult(metrics.clustering_accuracy(pred, labels), metrics.nmi(pred, labels), trace)


TRIAL_RUNNERS = {
    "sinc_bench": _sinc_trial,
    "elm": _elm_trial,
    "pca_recon": _pca_trial,
    "cluster_eval": _cluster_trial,
}


def max_workers(trials):
    raw = os.environ.get("KMPE_MAX_WORKERS", "").strip()
    limit = os.cpu_count() or 1
    if raw:
        try:
            limit = int(raw)
        except ValueError:
            raise ConfigError(f"KMPE_MAX_WORKERS must be an integer, got {raw!r}") from None
        if limit < 1:
            raise ConfigError("KMPE_MAX_WORKERS must be >= 1")
    return max(1, min(limit, trials))


def run_trials(cfg):
    """Run every trial of ``cfg``; results are returned in trial order."""
    runner = TRIAL_RUNNERS[cfg["task"]]
    seeds = [cfg["seed"] + t for t in range(cfg["trials"])]

    def one(t):
        try:
            return runner(cfg, seeds[t])
        except (ConfigError, ParseError):
            raise
        except (ArithmeticError, DegenerateWeightsError) as exc:
            raise TrialFailure(t, seeds[t], exc) from exc

    workers = max_workers(len(seeds))
    if workers == 1:
        return seeds, [one(t) for t in range(len(seeds))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return seeds, list(pool.map(one, range(len(seeds))))


# ---------------------------------------------------------------------------
# output


def _fmt(x):
    return "%.17g" % x


def _mean_std(values):
    v = np.asarray(values, dtype=float)
    return float(np.mean(v)), float(np.std(v, ddof=1)) if v.size > 1 else 0.0


def write_summary(path, seeds, train, test):
    lines = [SUMMARY_HEADER]
    for t, (s, a, b) in enumerate(zip(seeds, train, test)):
        lines.append(f"{t},{s},{_fmt(a)},{_fmt(b)}")
    (ma, sa), (mb, sb) = _mean_std(train), _mean_std(test)
    lines.append(f"mean,,{_fmt(ma)},{_fmt(mb)}")
    lines.append(f"std,,{_fmt(sa)},{_fmt(sb)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return (ma, sa), (mb, sb)


def write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def write_reports(cfg, seeds, results, out=None):
    """Write every CSV report for a finished run and print the comparison table."""
    out = sys.stdout if out is None else out
    d = cfg["output_dir"]
    main = {"elm": cfg.get("algorithm"), "cluster_eval": f"{cfg.get('reduce')}_kmeans"}.get(cfg["task"], "kmpe")
    (tm, ts), (em, es) = write_summary(os.path.join(d, "summary.csv"), seeds,
                                       [r.train for r in results], [r.test for r in results])
    comparison = [(main, tm, ts, em, es)]
    for name in results[0].extra:
        tr = [r.extra[name][0] for r in results]
        te = [r.extra[name][1] for r in results]
        (a, b), (c, e) = write_summary(os.path.join(d, f"summary_{name}.csv"), seeds, tr, te)
        comparison.append((name, a, b, c, e))
    write_rows(os.path.join(d, "comparison.csv"), COMPARISON_HEADER, comparison)
    write_rows(os.path.join(d, "trace.csv"), TRACE_HEADER,
               [(str(i), v) for i, v in enumerate(results[-1].trace)])
    if results[-1].curve is not None:
        write_rows(os.path.join(d, "curve.csv"), CURVE_HEADER, results[-1].curve)
    print(COMPARISON_HEADER, file=out)
    for row in comparison:
        print(",".join([row[0]] + ["%.6g" % v for v in row[1:]]), file=out)


def run_props(vectors, seed, length, output_dir, out=None):
    out = sys.stdout if out is None else out
    rows = run_property_suite(vectors, seed, length)
    os.makedirs(output_dir, exist_ok=True)
    write_rows(os.path.join(output_dir, "props.csv"), PROPS_HEADER,
               [(r.name, str(r.checks), r.max_error, r.tolerance, "pass" if r.passed else "FAIL")
                for r in rows])
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}: max error {r.max_error:.3g} (tolerance {r.tolerance:.3g},"
              f" {r.checks} checks)", file=out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_PROPS_FAILED


def run(config_path, overrides=(), out=None, err=None) -> int:
    """Execute a config file; returns the process exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        cfg = load_config(config_path, overrides)
        os.makedirs(cfg["output_dir"], exist_ok=True)
        if cfg["task"] == "props":
            if cfg["vectors"] < 1 or cfg["length"] < 1:
                raise ConfigError("vectors and length must be >= 1")
            return run_props(cfg["vectors"], cfg["seed"], cfg["length"], cfg["output_dir"], out)
        seeds, results = run_trials(cfg)
    except (ConfigError, ParseError, DomainError) as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    except TrialFailure as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    write_reports(cfg, seeds, results, out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kmpe", description="KMPE robust-learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key, dotted for nested keys")
    p_props = sub.add_parser("props", help="run the KMPE property checks")
    p_props.add_argument("--vectors", type=int, default=1000)
    p_props.add_argument("--length", type=int, default=10)
    p_props.add_argument("--seed", type=int, default=0)
    p_props.add_argument("--output-dir", default=".")
    p_schema = sub.add_parser("schema", help="print the CSV report schemas")
    p_schema.add_argument("version")
    args = parser.parse_args(argv)

    if args.command == "run":
        return run(args.config, args.overrides)
    if args.command == "props":
        if args.vectors < 1 or args.length < 1:
            print("config error: --vectors and --length must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        return run_props(args.vectors, args.seed, args.length, args.output_dir)
    try:
        sys.stdout.write(report_format(args.version))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
