"""``harstack`` command line: the PCA sweep, the forest comparison and the stack.

Every command writes ``report.json`` (and CSV side files) to ``--out`` when
given, and prints the JSON report otherwise. Reports carry the full resolved
configuration; wall-clock measurements live in their own ``timings`` section
so the rest of a report is reproducible byte for byte.
"""

import argparse
import csv
import dataclasses
import io
import json
import os
import platform
import sys
from dataclasses import dataclass, field

import numpy as np
from sklearn.pipeline import make_pipeline

from . import __version__
from .data import load_har_split
from .decomposition import PCA
from .evaluation import (
    classification_report,
    confusion_matrix,
    repeated_kfold_cv,
    roc_ovr,
    timed_fit_predict,
)
from .stacking import BaseLearnerSpec, StackedClassifier

SWEEP_MODELS = (
    "bagging",
    "cart",
    "extra_trees",
    "gradient_boosting",
    "knn",
    "logistic_ovr",
    "random_forest",
    "linear_svm",
)
NOT_IMPLEMENTED_MODELS = ("svm_rbf",)


@dataclass
class ExperimentConfig:
    data_dir: str = None
    out: str = None
    seed: int = 0
    pca: list = field(default_factory=lambda: [200, 400, None])
    k: int = 10
    repeats: int = 10
    split_ratio: float = 0.5
    n_jobs: int = None
    cv: bool = False
    models: list = field(default_factory=lambda: list(SWEEP_MODELS))
    forest_estimators: int = 200
    tree_estimators: int = 100
    et_estimators: int = 100
    et_max_depth: int = 4
    gb_estimators: int = 50
    gb_learning_rate: float = 0.2
    gb_max_depth: int = 3
    svm_c: float = 2.0
    svm_epochs: int = 40
    l1_lambda: float = 1e-4
    meta_l1_lambda: float = 1e-4
    knn_k: int = 5

    @classmethod
    def resolve(cls, command, flags, config_file=None):
        """Flags override the config file, which overrides command defaults."""
        values = dataclasses.asdict(cls())
        values.update(_COMMAND_DEFAULTS.get(command, {}))
        if config_file:
            with open(config_file) as fh:
                loaded = json.load(fh)
            unknown = set(loaded) - set(values)
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(loaded)
        values.update({k: v for k, v in flags.items() if v is not None})
        if values["data_dir"] is None:
            values["data_dir"] = os.environ.get("HAR_DATA_DIR")
        if values["data_dir"] is None:
            raise FileNotFoundError(
                "no HAR data directory: pass --data-dir or set HAR_DATA_DIR"
            )
        values["pca"] = [_parse_pca(p) for p in _as_list(values["pca"])]
        values["models"] = _as_list(values["models"])
        return cls(**values)

    def echo(self):
        # paths are machine specific and excluded from the reproducible body
        d = dataclasses.asdict(self)
        d.pop("data_dir")
        d.pop("out")
        d.pop("n_jobs")
        return d

    def spec(self, kind):
        params = {
            "logistic_ovr": {"l1_lambda": self.l1_lambda},
            "linear_svm": {"C": self.svm_c, "epochs": self.svm_epochs},
            "gradient_boosting": {
                "n_estimators": self.gb_estimators,
                "learning_rate": self.gb_learning_rate,
                "max_depth": self.gb_max_depth,
            },
            "knn": {"n_neighbors": self.knn_k},
            "cart": {},
        }.get(kind, {"n_estimators": self.tree_estimators, "max_depth": None})
        return BaseLearnerSpec(kind, params)


_COMMAND_DEFAULTS = {
    "compare-forests": {"pca": [200, None]},
    "stack": {"pca": [200]},
}


def _as_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _parse_pca(value):
    if value is None or str(value).lower() in ("none", "false", "off"):
        return None
    n = int(value)
    if n < 1:
        raise ValueError(f"--pca must be a positive integer or 'none', got {value}")
    return n


def pca_label(k):
    return "False" if k is None else str(k)


def _features(train, test, k):
    if k is None:
        return train.X, test.X
    pca = PCA(n_components=k).fit(train.X)
    return pca.transform(train.X), pca.transform(test.X)


def _with_pca(estimator, k):
    return estimator if k is None else make_pipeline(PCA(n_components=k), estimator)


def _bundle(command, config, results, timings):
    return {
        "command": command,
        "meta": {
            "package": "harstack",
            "version": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "seed": config.seed,
        },
        "config": config.echo(),
        "results": results,
        "timings": timings,
    }


def cmd_pca_sweep(config):
    train = load_har_split(config.data_dir, "train")
    test = load_har_split(config.data_dir, "test")
    grid, timings = [], []
    for k in config.pca:
        X_tr, X_te = _features(train, test, k)
        for name in config.models:
            if name in NOT_IMPLEMENTED_MODELS:
                grid.append({"model": name, "pca": pca_label(k), "accuracy": None,
                             "status": "not-implemented"})
                continue
            model = config.spec(name).build(config.seed)
            timing, acc = timed_fit_predict(model, (X_tr, train.y), (X_te, test.y), label=name)
            row = {"model": name, "pca": pca_label(k), "accuracy": acc, "status": "ok"}
            if config.cv:
                row["cv"] = repeated_kfold_cv(
                    _with_pca(config.spec(name).build(config.seed), k),
                    train.X, train.y, config.k, config.repeats, config.seed,
                    n_jobs=config.n_jobs,
                ).to_dict()
            grid.append(row)
            timings.append({**timing.to_dict(), "pca": pca_label(k)})
        for name in NOT_IMPLEMENTED_MODELS:
            if name not in config.models:
                grid.append({"model": name, "pca": pca_label(k), "accuracy": None,
                             "status": "not-implemented"})
    return _bundle("pca-sweep", config, {"grid": grid}, {"runs": timings})


def cmd_compare_forests(config):
    train = load_har_split(config.data_dir, "train")
    test = load_har_split(config.data_dir, "test")
    results, timings = {}, {}
    for k in config.pca:
        X_tr, X_te = _features(train, test, k)
        setting = "with_pca" if k is not None else "without_pca"
        results[setting] = {"pca": pca_label(k)}
        timings[setting] = {}
        for kind in ("random_forest", "extra_trees"):
            spec = BaseLearnerSpec(kind, {"n_estimators": config.forest_estimators,
                                          "max_depth": None, "n_jobs": config.n_jobs})
            timing, acc = timed_fit_predict(spec.build(config.seed), (X_tr, train.y),
                                            (X_te, test.y), label=kind)
            cv = repeated_kfold_cv(
                _with_pca(spec.build(config.seed), k), train.X, train.y,
                config.k, config.repeats, config.seed,
            )
            results[setting][kind] = {"test_accuracy": acc, "cv": cv.to_dict()}
            timings[setting][kind] = timing.to_dict()
        timings[setting]["extra_trees_fit_faster"] = (
            timings[setting]["extra_trees"]["fit_seconds"]
            < timings[setting]["random_forest"]["fit_seconds"]
        )
    return _bundle("compare-forests", config, results, timings)


def _stack(config):
    return StackedClassifier(
        base_estimators=[
            config.spec("logistic_ovr").build(config.seed),
            config.spec("linear_svm").build(config.seed),
            config.spec("gradient_boosting").build(config.seed),
            BaseLearnerSpec("extra_trees", {
                "n_estimators": config.et_estimators,
                "max_depth": config.et_max_depth,
            }).build(config.seed),
        ],
        meta_estimator=BaseLearnerSpec("logistic_ovr", {"l1_lambda": config.meta_l1_lambda}).build(),
        split_ratio=config.split_ratio,
        random_state=config.seed,
        n_jobs=config.n_jobs,
    )


def cmd_stack(config):
    train = load_har_split(config.data_dir, "train")
    test = load_har_split(config.data_dir, "test")
    k = config.pca[0] if config.pca else None
    X_tr, X_te = _features(train, test, k)
    model = _stack(config)
    timing, acc = timed_fit_predict(model, (X_tr, train.y), (X_te, test.y), label="stack")
    pred = model.predict(X_te)
    cm = confusion_matrix(test.y, pred, n_classes=len(test.class_names))
    roc = roc_ovr(test.y, model.predict_proba(X_te))
    results = {
        "pca": pca_label(k),
        "test_accuracy": acc,
        "confusion_matrix": cm.to_dict(),
        "classification_report": classification_report(cm).to_dict(list(test.class_names)),
        "roc": roc.to_dict(),
        "base_learner_test_accuracy": {
            type(m).__name__: float(np.mean(m.predict(X_te) == test.y))
            for m in model.base_models_
        },
    }
    if config.repeats > 0:
        results["cv"] = repeated_kfold_cv(
            _with_pca(_stack(config), k), train.X, train.y,
            config.k, config.repeats, config.seed,
        ).to_dict()
    return _bundle("stack", config, results, {"stack": timing.to_dict()})


def grid_csv(bundle):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "pca", "accuracy"])
    for row in bundle["results"]["grid"]:
        acc = row["accuracy"]
        writer.writerow([row["model"], row["pca"], "not-implemented" if acc is None else repr(acc)])
    return buf.getvalue()


def roc_csv(bundle, class_names):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["class", "fpr", "tpr"])
    for name, curve in zip(class_names, bundle["results"]["roc"]["curves"]):
        for f, t in zip(curve["fpr"], curve["tpr"]):
            writer.writerow([name, "" if f is None else repr(f), "" if t is None else repr(t)])
    return buf.getvalue()


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_outputs(command, bundle, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    files = {"report.json": dump_json(bundle)}
    if command == "pca-sweep":
        files["accuracy_grid.csv"] = grid_csv(bundle)
    elif command == "stack":
        names = [r["class"] for r in bundle["results"]["classification_report"]["per_class"]]
        files["roc.csv"] = roc_csv(bundle, names)
    for name, text in files.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)
    return sorted(files)


COMMANDS = {
    "pca-sweep": cmd_pca_sweep,
    "compare-forests": cmd_compare_forests,
    "stack": cmd_stack,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="harstack",
        description="Ensemble classifiers on the UCI HAR feature set.",
    )
    parser.add_argument("--version", action="version", version=f"harstack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "pca-sweep": "test accuracy of every model at each PCA setting",
        "compare-forests": "random forest vs extra trees: accuracy, CV variance, timing",
        "stack": "stacked classifier: accuracy, CV, confusion matrix, report, ROC",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON file with configuration keys")
        p.add_argument("--data-dir", help="UCI HAR directory (default: $HAR_DATA_DIR)")
        p.add_argument("--out", help="output directory for report.json and CSV files")
        p.add_argument("--seed", type=int)
        p.add_argument("--pca", help="comma list of component counts or 'none'")
        p.add_argument("--k", type=int, help="CV folds")
        p.add_argument("--repeats", type=int, help="CV repeats (0 skips CV in 'stack')")
        p.add_argument("--split-ratio", type=float, help="share of each class used to fit the base learners")
        p.add_argument("--n-jobs", type=int)
        p.add_argument("--cv", action="store_const", const=True, help="also cross-validate (pca-sweep)")
        p.add_argument("--models", help="comma list of models (pca-sweep)")
        p.add_argument("--forest-estimators", type=int)
        p.add_argument("--tree-estimators", type=int, help="trees for bagging/forests in the sweep")
        p.add_argument("--et-estimators", type=int)
        p.add_argument("--et-max-depth", type=int)
        p.add_argument("--gb-estimators", type=int)
        p.add_argument("--gb-learning-rate", type=float)
        p.add_argument("--gb-max-depth", type=int)
        p.add_argument("--svm-c", type=float)
        p.add_argument("--svm-epochs", type=int)
        p.add_argument("--l1-lambda", type=float)
        p.add_argument("--meta-l1-lambda", type=float)
        p.add_argument("--knn-k", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        config = ExperimentConfig.resolve(args.command, flags, args.config)
        bundle = COMMANDS[args.command](config)
        if config.out:
            for name in write_outputs(args.command, bundle, config.out):
                print(os.path.join(config.out, name))
        else:
            sys.stdout.write(dump_json(bundle))
    except Exception as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(error), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
