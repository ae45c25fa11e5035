"""Experiment pipelines and the `kafcm` command-line interface.

Subcommands: generate, train, evaluate, gridsearch, extract. Each takes
--config <path> plus optional --out <dir> and --seed <int> overrides;
gridsearch also accepts --jobs <k>. Exit codes: 0 success, 2 config error,
3 divergence, 4 I/O error.

A config plus the code version determines every output byte: datasets,
models, histories, and reports all serialize with full round-trip precision
and sorted keys, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
import json
import os
import sys

import numpy as np

from .baselines import MLPParams, default_mlp_config, mlp_forward, mlp_init, mlp_train
from .cognitive_graph import (
    BOUNDING_KINDS,
    DivergenceError,
    KAFCMModel,
    StandardFCM,
    new_kafcm,
)
from .datagen import (
    Dataset,
    MackeyGlassParams,
    gen_mackey_glass,
    gen_sine,
    gen_yerkes,
    lag_embed,
    load_dataset,
    save_dataset,
    split_dataset,
    yerkes_law,
)
from .edge_functions import EdgeFunction
from .metrics_eval import MetricsReport, append_comparison_row, compute_metrics, save_metrics_json
from .spline_core import make_uniform_grid
from .symbolic import curve_to_csv, fit_candidates, fits_to_json, sample_edge
from .training import (
    GridSearchSpace,
    PSOConfig,
    TrainConfig,
    grid_search,
    load_grid_rows,
    loss_rec,
    predict_one_step,
    pso_train_fcm,
    save_grid_csv,
    save_grid_summary,
    train_gd,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "canonical_config",
    "load_config",
    "save_model",
    "load_model",
    "build_dataset",
    "split_for",
    "model_view",
    "build_model",
    "fit_model",
    "predict",
    "eval_targets",
    "run_pipeline",
    "main",
]

MODEL_FILE_VERSION = 1
EXPERIMENTS = ("yerkes", "sine", "mackey")
MODEL_KINDS = ("kafcm", "fcm", "mlp")
FCM_ENCODINGS = ("raw", "unit")
SPLIT_FRACTIONS = (0.64, 0.16, 0.2)

# input/output node counts, spline domain, and default standard-FCM input
# encoding for each experiment
EXPERIMENT_DIMS = {"yerkes": (1, 1), "sine": (1, 1), "mackey": (4, 1)}
EXPERIMENT_DOMAINS = {"yerkes": (-1.0, 1.0), "sine": (-1.0, 1.0), "mackey": (0.0, 1.5)}
DEFAULT_FCM_ENCODING = {"yerkes": "raw", "sine": "unit", "mackey": "raw"}
DEFAULT_DATASET = {
    "yerkes": {"n": 400, "noise_sd": 0.05},
    "sine": {"n": 400, "frequency": 3.0},
    "mackey": {"lag": 4},
}
# best published configuration per experiment
CANONICAL_HYPERPARAMS = {
    "yerkes": {"grid_size": 4, "learning_rate": 0.1, "epochs": 610},
    "sine": {"grid_size": 19, "learning_rate": 0.1, "epochs": 1500},
    "mackey": {"grid_size": 19, "learning_rate": 0.05, "epochs": 1277},
}


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str
    model: str = "kafcm"
    bounding: str = "identity"
    grid_size: int = 4
    degree: int = 3
    train: TrainConfig = field(default_factory=TrainConfig)
    pso: PSOConfig | None = None  # None derives the swarm seed from `seed`
    dataset: dict = field(default_factory=dict)
    fcm_encoding: str | None = None
    out: str = ""
    seed: int = 0
    data_path: str | None = None
    space: dict | None = None
    edge: tuple | None = None
    table: str | None = None
    curve_points: int = 200

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.model!r}; expected one of {MODEL_KINDS}")
        if self.bounding not in BOUNDING_KINDS:
            raise ConfigError(f"unknown bounding {self.bounding!r}; expected one of {BOUNDING_KINDS}")
        if self.grid_size < 1:
            raise ConfigError(f"grid_size must be at least 1, got {self.grid_size}")
        if self.degree < 0:
            raise ConfigError(f"degree must be non-negative, got {self.degree}")
        if self.curve_points < 2:
            raise ConfigError("curve_points must be at least 2")
        if self.fcm_encoding is None:
            self.fcm_encoding = DEFAULT_FCM_ENCODING[self.experiment]
        if self.fcm_encoding not in FCM_ENCODINGS:
            raise ConfigError(f"unknown fcm_encoding {self.fcm_encoding!r}")
        merged = dict(DEFAULT_DATASET[self.experiment])
        merged.update(self.dataset)
        self.dataset = merged
        if not self.out:
            self.out = os.path.join("runs", self.experiment)
        if self.edge is not None:
            self.edge = (int(self.edge[0]), int(self.edge[1]))

    def to_dict(self) -> dict:
        d = {
            "experiment": self.experiment,
            "model": self.model,
            "bounding": self.bounding,
            "grid_size": self.grid_size,
            "degree": self.degree,
            "train": {
                "learning_rate": self.train.learning_rate,
                "epochs": self.train.epochs,
                "lam": self.train.lam,
                "seed": self.train.seed,
            },
            "dataset": self.dataset,
            "fcm_encoding": self.fcm_encoding,
            "out": self.out,
            "seed": self.seed,
        }
        for key in ("data_path", "space", "table"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.pso is not None:
            p = self.pso
            d["pso"] = {
                "swarm_size": p.swarm_size,
                "iterations": p.iterations,
                "inertia": p.inertia,
                "cognitive": p.cognitive,
                "social": p.social,
                "weight_bounds": list(p.weight_bounds),
                "seed": p.seed,
            }
        if self.edge is not None:
            d["edge"] = list(self.edge)
        return d


_CONFIG_KEYS = {
    "experiment",
    "model",
    "bounding",
    "grid_size",
    "degree",
    "train",
    "pso",
    "dataset",
    "fcm_encoding",
    "out",
    "seed",
    "data_path",
    "space",
    "edge",
    "table",
    "curve_points",
}


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in raw:
        raise ConfigError("config is missing the 'experiment' key")
    kwargs = dict(raw)
    try:
        if "train" in kwargs:
            kwargs["train"] = TrainConfig(**kwargs["train"])
        if "pso" in kwargs:
            kwargs["pso"] = PSOConfig(**kwargs["pso"])
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: {err}") from err
    return config_from_dict(raw)


def canonical_config(experiment: str, model: str = "kafcm", seed: int = 0) -> ExperimentConfig:
    """The best published hyperparameters for an experiment."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    hp = CANONICAL_HYPERPARAMS[experiment]
    return ExperimentConfig(
        experiment=experiment,
        model=model,
        grid_size=hp["grid_size"],
        train=TrainConfig(learning_rate=hp["learning_rate"], epochs=hp["epochs"], seed=seed),
        seed=seed,
    )


# ---------------------------------------------------------------- model files


def _grid_to_dict(grid) -> dict:
    return {
        "domain_lo": grid.domain_lo,
        "domain_hi": grid.domain_hi,
        "grid_size": grid.grid_size,
        "degree": grid.degree,
    }


def save_model(model, path) -> None:
    """Serialize a KAFCMModel, StandardFCM, or MLPParams as versioned JSON."""
    if isinstance(model, KAFCMModel):
        payload = {
            "version": MODEL_FILE_VERSION,
            "kind": "kafcm",
            "n_nodes": model.n_nodes,
            "bounding": model.bounding,
            "edges": [
                {
                    "i": i,
                    "j": j,
                    "w_base": e.w_base,
                    "w_spline": e.w_spline,
                    "alpha": [float(v) for v in e.alpha],
                    "base": e.base,
                    "grid": _grid_to_dict(e.grid),
                }
                for i, j, e in model.present_edges()
            ],
        }
    elif isinstance(model, StandardFCM):
        payload = {
            "version": MODEL_FILE_VERSION,
            "kind": "fcm",
            "activation": model.activation,
            "weights": [[float(v) for v in row] for row in model.weights],
        }
    elif isinstance(model, MLPParams):
        payload = {
            "version": MODEL_FILE_VERSION,
            "kind": "mlp",
        }
        for name in ("W1", "W2", "W3"):
            payload[name] = [[float(v) for v in row] for row in getattr(model, name)]
        for name in ("b1", "b2", "b3"):
            payload[name] = [float(v) for v in getattr(model, name)]
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("version")
    if version != MODEL_FILE_VERSION:
        raise ValueError(f"unsupported model file version: {version!r}")
    kind = payload.get("kind")
    if kind == "kafcm":
        n = payload["n_nodes"]
        mask = np.zeros((n, n), dtype=bool)
        edges = [[None] * n for _ in range(n)]
        for rec in payload["edges"]:
            g = rec["grid"]
            grid = make_uniform_grid(g["domain_lo"], g["domain_hi"], g["grid_size"], g["degree"])
            i, j = rec["i"], rec["j"]
            mask[i, j] = True
            edges[i][j] = EdgeFunction(
                w_base=rec["w_base"],
                w_spline=rec["w_spline"],
                alpha=np.array(rec["alpha"], dtype=float),
                grid=grid,
                base=rec["base"],
            )
        return KAFCMModel(n_nodes=n, edges=edges, mask=mask, bounding=payload["bounding"])
    if kind == "fcm":
        return StandardFCM(
            weights=np.array(payload["weights"], dtype=float), activation=payload["activation"]
        )
    if kind == "mlp":
        return MLPParams(
            W1=np.array(payload["W1"]),
            b1=np.array(payload["b1"]),
            W2=np.array(payload["W2"]),
            b2=np.array(payload["b2"]),
            W3=np.array(payload["W3"]),
            b3=np.array(payload["b3"]),
        )
    raise ValueError(f"unknown model kind: {kind!r}")


# ---------------------------------------------------------------- pipelines


def build_dataset(config: ExperimentConfig) -> Dataset:
    """The full (unsplit) dataset for an experiment, regenerable from metadata."""
    ds = config.dataset
    if config.experiment == "yerkes":
        return gen_yerkes(ds["n"], noise_sd=ds["noise_sd"], seed=config.seed)
    if config.experiment == "sine":
        return gen_sine(ds["n"], frequency=ds["frequency"], seed=config.seed)
    extra = {k: v for k, v in ds.items() if k != "lag"}
    try:
        params = MackeyGlassParams(**extra)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err
    series = gen_mackey_glass(params, seed=config.seed)
    series_meta = {"generator": "mackey_glass", "params": params.to_dict(), "seed": config.seed}
    return lag_embed(series, ds["lag"], series_metadata=series_meta)


def split_for(config: ExperimentConfig, data: Dataset):
    """64/16/20 split; chronological for the time series, shuffled otherwise."""
    shuffle = config.experiment != "mackey"
    return split_dataset(data, SPLIT_FRACTIONS, shuffle=shuffle, seed=config.seed)


def model_view(config: ExperimentConfig, data: Dataset) -> Dataset:
    """The dataset as the configured model consumes it.

    The standard FCM reads unit-interval activations; for the sine task its
    inputs are mapped from [-1, 1] onto [0, 1]. Targets are never encoded:
    all models are scored in the original output units.
    """
    if config.model == "fcm" and config.fcm_encoding == "unit":
        return Dataset((data.inputs + 1.0) / 2.0, data.targets, dict(data.metadata))
    return data


def build_model(config: ExperimentConfig):
    n_in, n_out = EXPERIMENT_DIMS[config.experiment]
    n = n_in + n_out
    if config.model == "kafcm":
        lo, hi = EXPERIMENT_DOMAINS[config.experiment]
        grid = make_uniform_grid(lo, hi, config.grid_size, config.degree)
        mask = np.zeros((n, n), dtype=bool)
        mask[n_in:, :n_in] = True
        return new_kafcm(n, grid, mask=mask, bounding=config.bounding, seed=config.seed)
    if config.model == "fcm":
        return StandardFCM(weights=np.zeros((n, n)), activation="tanh")
    return mlp_init(n_in, n_out, seed=config.seed)


def fit_model(config: ExperimentConfig, model, train_data: Dataset):
    """Dispatch to the right trainer; returns (model, loss history)."""
    view = model_view(config, train_data)
    if config.model == "kafcm":
        return train_gd(model, view, config.train)
    if config.model == "fcm":
        pso = config.pso if config.pso is not None else PSOConfig(seed=config.seed)
        return pso_train_fcm(model, view, pso)
    cfg = default_mlp_config(seed=config.seed)
    return mlp_train(model, view, cfg)


def predict(config: ExperimentConfig, model, data: Dataset) -> np.ndarray:
    view = model_view(config, data)
    if isinstance(model, MLPParams):
        return mlp_forward(model, view.inputs)
    return predict_one_step(model, view)


def eval_targets(config: ExperimentConfig, data: Dataset) -> np.ndarray:
    """Scoring targets: the noise-free law for the noisy task, else the data."""
    if config.experiment == "yerkes":
        return yerkes_law(data.inputs)
    return data.targets


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    data: Dataset
    train_data: Dataset
    val_data: Dataset
    test_data: Dataset
    model: object
    history: np.ndarray
    metrics: MetricsReport


def run_pipeline(config: ExperimentConfig, splits=None) -> ExperimentResult:
    """Generate (or reuse) data, train the configured model, score the test set."""
    if splits is None:
        data = build_dataset(config)
        train_data, val_data, test_data = split_for(config, data)
    else:
        train_data, val_data, test_data = splits
        data = train_data
    model = build_model(config)
    model, history = fit_model(config, model, train_data)
    preds = predict(config, model, test_data)
    metrics = compute_metrics(preds, eval_targets(config, test_data))
    return ExperimentResult(
        config, data, train_data, val_data, test_data, model, history, metrics
    )


def make_grid_task(config: ExperimentConfig):
    """Grid-search cell runner: train a KA-FCM and return validation error."""
    n_in, n_out = EXPERIMENT_DIMS[config.experiment]
    n = n_in + n_out
    lo, hi = EXPERIMENT_DOMAINS[config.experiment]
    mask = np.zeros((n, n), dtype=bool)
    mask[n_in:, :n_in] = True

    def task(G, train_config, splits):
        train_data, val_data, _ = splits
        grid = make_uniform_grid(lo, hi, G, config.degree)
        model = new_kafcm(n, grid, mask=mask, bounding=config.bounding, seed=train_config.seed)
        model, _ = train_gd(model, train_data, train_config)
        return loss_rec(predict_one_step(model, val_data), val_data.targets)

    return task


# ---------------------------------------------------------------- commands


def _dataset_path(config: ExperimentConfig) -> str:
    return config.data_path or os.path.join(config.out, "data.csv")


def _load_dataset_checked(config: ExperimentConfig):
    data = load_dataset(_dataset_path(config))
    d_in, d_out = EXPERIMENT_DIMS[config.experiment]
    if data.inputs.shape[1] != d_in or data.targets.shape[1] != d_out:
        raise ConfigError(
            f"dataset at {_dataset_path(config)} has shape "
            f"{data.inputs.shape[1]}-in/{data.targets.shape[1]}-out; "
            f"experiment {config.experiment!r} needs {d_in}-in/{d_out}-out"
        )
    return data


def _model_path(config: ExperimentConfig) -> str:
    return os.path.join(config.out, f"model_{config.model}.json")


def save_history_csv(history, path) -> None:
    with open(path, "w") as fh:
        fh.write("epoch,loss\n")
        for epoch, loss in enumerate(history):
            fh.write(f"{epoch},{float(loss)!r}\n")


def cmd_generate(config: ExperimentConfig) -> int:
    data = build_dataset(config)
    os.makedirs(config.out, exist_ok=True)
    path = _dataset_path(config)
    save_dataset(data, path)
    print(f"wrote {path} ({len(data)} rows)")
    return 0


def cmd_train(config: ExperimentConfig) -> int:
    data = _load_dataset_checked(config)
    train_data, _, _ = split_for(config, data)
    model = build_model(config)
    os.makedirs(config.out, exist_ok=True)
    history_path = os.path.join(config.out, f"history_{config.model}.csv")
    try:
        model, history = fit_model(config, model, train_data)
    except DivergenceError as err:
        partial = getattr(err, "history", None)
        if partial is not None:
            save_history_csv(partial, history_path)
        raise
    model_path = _model_path(config)
    save_model(model, model_path)
    save_history_csv(history, history_path)
    print(f"wrote {model_path} (final loss {history[-1]:.3e})")
    return 0


def cmd_evaluate(config: ExperimentConfig) -> int:
    model = load_model(_model_path(config))
    data = _load_dataset_checked(config)
    _, _, test_data = split_for(config, data)
    preds = predict(config, model, test_data)
    report = compute_metrics(preds, eval_targets(config, test_data))
    os.makedirs(config.out, exist_ok=True)
    metrics_path = os.path.join(config.out, f"metrics_{config.model}.json")
    save_metrics_json(
        report, metrics_path, model_id=config.model, dataset_id=config.experiment
    )
    table_path = config.table or os.path.join(config.out, "comparison.csv")
    append_comparison_row(table_path, config.model, report)
    print(f"wrote {metrics_path} (mse {report.mse:.3e})")
    return 0


def cmd_gridsearch(config: ExperimentConfig, jobs: int = 1) -> int:
    space = GridSearchSpace(**config.space) if config.space else GridSearchSpace()
    data = build_dataset(config)
    splits = split_for(config, data)
    os.makedirs(config.out, exist_ok=True)
    grid_path = os.path.join(config.out, "grid.csv")
    completed = {}
    if os.path.exists(grid_path):
        completed = {(r.G, r.eta, r.epochs): r for r in load_grid_rows(grid_path)}
    task = make_grid_task(config)
    report = grid_search(
        space, splits, task, base_seed=config.seed, jobs=jobs, completed=completed
    )
    save_grid_csv(report.rows, grid_path)
    summary_path = os.path.join(config.out, "grid_summary.json")
    save_grid_summary(report, summary_path)
    best = report.best
    print(
        f"wrote {grid_path} ({len(report.rows)} rows); best G={best['G']} "
        f"eta={best['learning_rate']} epochs={best['epochs']} val={best['val_error']:.3e}"
    )
    return 0


def cmd_extract(config: ExperimentConfig) -> int:
    model = load_model(_model_path(config))
    if not isinstance(model, KAFCMModel):
        raise ConfigError("extract requires a kafcm model file")
    n_in, _ = EXPERIMENT_DIMS[config.experiment]
    i, j = config.edge if config.edge is not None else (n_in, 0)
    if not (0 <= i < model.n_nodes and 0 <= j < model.n_nodes) or model.edges[i][j] is None:
        raise ConfigError(f"edge ({i}, {j}) is masked or out of range")
    curve = sample_edge(model.edges[i][j], config.curve_points, edge_id=(i, j))
    fits = fit_candidates(curve)
    os.makedirs(config.out, exist_ok=True)
    curve_path = os.path.join(config.out, f"edge_{i}_{j}_curve.csv")
    fits_path = os.path.join(config.out, f"edge_{i}_{j}_fits.json")
    curve_to_csv(curve, curve_path)
    fits_to_json(fits, fits_path)
    top = fits[0]
    coeffs = ", ".join(f"{float(v):.6g}" for v in top.coefficients)
    print(f"wrote {fits_path}; top fit {top.form} [{coeffs}] r2={top.r_squared:.6f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kafcm",
        description="Train and analyze fuzzy cognitive maps with learnable spline edges.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("generate", "write the experiment dataset as CSV plus metadata"),
        ("train", "train the configured model on the generated dataset"),
        ("evaluate", "score a trained model on the test split"),
        ("gridsearch", "sweep grid size, learning rate, and epochs"),
        ("extract", "sample a learned edge and fit closed forms to it"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--seed", type=int, help="override every derived seed")
        if name == "gridsearch":
            p.add_argument("--jobs", type=int, default=1, help="parallel grid cells")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.out:
            config.out = args.out
        if args.seed is not None:
            config.seed = args.seed
            config.train.seed = args.seed
        if args.command == "generate":
            return cmd_generate(config)
        if args.command == "train":
            return cmd_train(config)
        if args.command == "evaluate":
            return cmd_evaluate(config)
        if args.command == "gridsearch":
            return cmd_gridsearch(config, jobs=args.jobs)
        return cmd_extract(config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except DivergenceError as err:
        print(f"divergence: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
