"""Cross-validated model evaluation over a dataset snapshot.

Rows with Missing in any feature or the label are excluded and counted,
never silently imputed; fold assignment, encoding and training are all
deterministic functions of (snapshot, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInput, InvalidInput
from ..tabular import MISSING, Dataset
from . import encode as _encode
from .cart import train_cart
from .knn import predict_knn
from .logreg import train_logreg

TASKS = ("classification", "regression")
MODELS = ("logreg", "cart", "knn")
PRIMARY_METRIC = {"classification": "f1_macro", "regression": "rmse"}
# +1: larger is better; -1: smaller is better
METRIC_ORIENTATION = {"f1_macro": 1.0, "rmse": -1.0}
FOLDS_DEFAULT = 5
CLASSIFICATION_LABEL_CARDINALITY = 10   # numeric labels at or below: classify


def infer_task(ds: Dataset) -> str:
    if ds.label_column is None:
        raise InvalidInput("dataset has no label column set")
    schema = ds.schema(ds.label_column)
    if schema.dtype in ("categorical", "text", "boolean"):
        return "classification"
    observed = {v for v in ds.column_values(ds.label_column) if v is not MISSING}
    if not observed:
        raise DegenerateInput("label column has no observed values")
    if len(observed) <= CLASSIFICATION_LABEL_CARDINALITY:
        return "classification"
    return "regression"


@dataclass(frozen=True)
class EvalConfig:
    task: str | None = None       # None: infer from the label column
    model: str = "cart"
    model_params: dict = field(default_factory=dict)
    folds: int = FOLDS_DEFAULT
    seed: int = 0

    def __post_init__(self):
        if self.task is not None and self.task not in TASKS:
            raise InvalidInput(f"unknown task {self.task!r}")
        if self.model not in MODELS:
            raise InvalidInput(f"unknown model {self.model!r}")
        if self.folds < 2:
            raise InvalidInput("folds must be at least 2")

    def to_json(self) -> dict:
        return {"task": self.task, "model": self.model,
                "model_params": dict(self.model_params),
                "folds": self.folds, "seed": self.seed}

    @staticmethod
    def from_json(obj: dict) -> "EvalConfig":
        return EvalConfig(task=obj.get("task"),
                          model=obj.get("model", "cart"),
                          model_params=dict(obj.get("model_params") or {}),
                          folds=int(obj.get("folds", FOLDS_DEFAULT)),
                          seed=int(obj.get("seed", 0)))


@dataclass(frozen=True)
class EvalReport:
    snapshot_id: str
    config: EvalConfig
    task: str
    rows_used: int
    rows_dropped: int
    dropped_rows: tuple
    classes: tuple | None
    per_fold: tuple
    mean: dict
    std: dict
    primary_metric: str

    @property
    def primary_mean(self) -> float:
        return self.mean[self.primary_metric]

    def to_json(self) -> dict:
        return {"snapshot_id": self.snapshot_id,
                "config": self.config.to_json(),
                "task": self.task,
                "rows_used": self.rows_used,
                "rows_dropped": self.rows_dropped,
                "dropped_rows": list(self.dropped_rows),
                "classes": None if self.classes is None
                else [str(c) for c in self.classes],
                "per_fold": [dict(f) for f in self.per_fold],
                "mean": dict(self.mean), "std": dict(self.std),
                "primary_metric": self.primary_metric}


def _fold_assignment(kept: list[int], y_ids, task: str, folds: int,
                     seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    fold = np.empty(len(kept), dtype=int)
    if task == "classification":
        for c in sorted(set(int(v) for v in y_ids)):
            positions = [p for p, v in enumerate(y_ids) if v == c]
            perm = rng.permutation(len(positions))
            for rank, which in enumerate(perm):
                fold[positions[which]] = rank % folds
    else:
        perm = rng.permutation(len(kept))
        for rank, which in enumerate(perm):
            fold[which] = rank % folds
    return fold


def _classification_metrics(cm: np.ndarray) -> dict:
    n = cm.sum()
    accuracy = float(np.trace(cm) / n)
    precisions, recalls, f1s = [], [], []
    for c in range(len(cm)):
        tp = cm[c, c]
        fp = cm[:, c].sum() - tp
        fn = cm[c, :].sum() - tp
        p = float(tp / (tp + fp)) if tp + fp > 0 else 0.0
        r = float(tp / (tp + fn)) if tp + fn > 0 else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(f1)
    return {"accuracy": accuracy,
            "precision_macro": float(np.mean(precisions)),
            "recall_macro": float(np.mean(recalls)),
            "f1_macro": float(np.mean(f1s))}


def _regression_metrics(truth: np.ndarray, preds: np.ndarray) -> tuple[dict, dict]:
    err = preds - truth
    sse = float(np.sum(err ** 2))
    sst = float(np.sum((truth - truth.mean()) ** 2))
    abs_sum = float(np.sum(np.abs(err)))
    n = len(truth)
    rmse = float(np.sqrt(sse / n))
    mae = abs_sum / n
    if sst > 0:
        r2 = 1.0 - sse / sst
    else:
        r2 = 1.0 if sse == 0.0 else 0.0
    return ({"rmse": rmse, "mae": mae, "r2": r2},
            {"sse": sse, "sst": sst, "abs_err_sum": abs_sum})


def _fit_predict(task: str, model: str, params: dict, X_train, y_train,
                 X_test) -> np.ndarray:
    if model == "logreg":
        if task != "classification":
            raise InvalidInput("logreg supports classification only")
        return train_logreg(X_train, y_train, params).predict(X_test)
    if model == "cart":
        p = dict(params)
        p.setdefault("criterion", "gini" if task == "classification" else "mse")
        return train_cart(X_train, y_train, p).predict(X_test)
    k = int(params.get("k", 5))
    return predict_knn(X_train, y_train, X_test, k=k, task=task)


def cross_validate(ds: Dataset, config: EvalConfig | None = None) -> EvalReport:
    config = config or EvalConfig()
    features = _encode.feature_columns(ds)
    if not features:
        raise InvalidInput("dataset has no feature columns besides the label")
    kept = _encode.complete_rows(ds, features + [ds.label_column])
    dropped = [i for i in range(ds.n_rows) if i not in set(kept)]
    task = config.task or infer_task(ds)
    folds = config.folds

    labels = _encode.label_values(ds, kept)
    if task == "classification":
        classes = _encode.class_order(labels)
        if len(classes) < 2:
            raise DegenerateInput("classification needs at least two label "
                                  "classes among fully observed rows")
        y_all = _encode.encode_labels(labels, classes)
        counts = np.bincount(y_all, minlength=len(classes))
        thin = [str(classes[c]) for c in range(len(classes))
                if counts[c] < folds]
        if thin:
            raise DegenerateInput(
                f"classes {thin} have fewer rows than folds={folds}; "
                f"every class needs at least one row per fold")
    else:
        if ds.schema(ds.label_column).dtype not in ("numeric", "timestamp"):
            raise InvalidInput("regression needs a numeric label column")
        if len(kept) < folds:
            raise DegenerateInput(
                f"{len(kept)} usable rows cannot fill folds={folds}")
        classes = None
        y_all = np.array([float(v) for v in labels])

    fold = _fold_assignment(kept, y_all, task, folds, config.seed)
    per_fold = []
    for f in range(folds):
        test_pos = [p for p in range(len(kept)) if fold[p] == f]
        train_pos = [p for p in range(len(kept)) if fold[p] != f]
        train_rows = [kept[p] for p in train_pos]
        test_rows = [kept[p] for p in test_pos]
        encoder = _encode.fit_encoder(ds, train_rows, features)
        X_train = _encode.transform(ds, train_rows, encoder)
        X_test = _encode.transform(ds, test_rows, encoder)
        preds = _fit_predict(task, config.model, dict(config.model_params),
                             X_train, y_all[train_pos], X_test)
        record: dict = {"fold": f, "n_test": len(test_pos),
                        "scaler": encoder.scaler_params()}
        if task == "classification":
            cm = np.zeros((len(classes), len(classes)), dtype=int)
            for t, p in zip(y_all[test_pos], preds):
                cm[int(t), int(p)] += 1
            record["confusion"] = cm.tolist()
            record["metrics"] = _classification_metrics(cm)
        else:
            metrics, sums = _regression_metrics(y_all[test_pos],
                                                np.asarray(preds, dtype=float))
            record["metrics"] = metrics
            record["residual_sums"] = sums
        per_fold.append(record)

    names = list(per_fold[0]["metrics"].keys())
    mean = {m: float(np.mean([r["metrics"][m] for r in per_fold]))
            for m in names}
    std = {m: float(np.std([r["metrics"][m] for r in per_fold]))
           for m in names}
    resolved = EvalConfig(task=task, model=config.model,
                          model_params=dict(config.model_params),
                          folds=folds, seed=config.seed)
    return EvalReport(snapshot_id=ds.snapshot_id, config=resolved, task=task,
                      rows_used=len(kept), rows_dropped=len(dropped),
                      dropped_rows=tuple(dropped),
                      classes=None if classes is None else tuple(classes),
                      per_fold=tuple(per_fold), mean=mean, std=std,
                      primary_metric=PRIMARY_METRIC[task])


def compare_performance(before: EvalReport, after: EvalReport) -> dict:
    """after − before, per metric; sign convention is raw (not oriented)."""
    if before.task != after.task:
        raise InvalidInput(f"cannot compare a {before.task} report against "
                           f"a {after.task} report")
    per_metric = {m: {"delta_mean": after.mean[m] - before.mean[m],
                      "delta_std": after.std[m] - before.std[m]}
                  for m in before.mean if m in after.mean}
    primary = before.primary_metric
    return {"primary_metric": primary,
            "delta_mean": per_metric[primary]["delta_mean"],
            "delta_std": per_metric[primary]["delta_std"],
            "per_metric": per_metric}
