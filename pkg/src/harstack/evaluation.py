"""Repeated stratified k-fold CV, classification metrics, one-vs-rest ROC and timing."""

import time
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import clone

from ._core import rng_stream


@dataclass
class CVReport:
    fold_scores: np.ndarray
    k: int
    repeats: int
    seed: int

    @property
    def mean(self):
        return float(np.mean(self.fold_scores))

    @property
    def variance(self):
        # population variance (divide by the number of folds)
        return float(np.var(self.fold_scores))

    def to_dict(self):
        return {
            "k": self.k,
            "repeats": self.repeats,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "fold_scores": [float(s) for s in self.fold_scores],
        }


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # rows = true class, columns = predicted class

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def supports(self):
        return self.counts.sum(axis=1)

    def to_dict(self):
        return {"counts": self.counts.tolist()}


@dataclass
class ClassificationReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    accuracy: float
    macro: dict
    weighted: dict

    def to_dict(self, class_names=None):
        n = len(self.support)
        names = class_names or [str(i) for i in range(n)]
        return {
            "per_class": [
                {
                    "class": names[i],
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
                for i in range(n)
            ],
            "accuracy": self.accuracy,
            "macro_avg": self.macro,
            "weighted_avg": self.weighted,
        }


@dataclass
class RocCurve:
    fpr: list
    tpr: list
    auc: list  # None where a class has no positives or no negatives
    macro_auc: float

    def to_dict(self):
        return {
            "auc": self.auc,
            "macro_auc": self.macro_auc,
            "curves": [
                {"fpr": _finite_or_none(f), "tpr": _finite_or_none(t)}
                for f, t in zip(self.fpr, self.tpr)
            ],
        }


def _finite_or_none(values):
    return [float(v) if np.isfinite(v) else None for v in values]


@dataclass
class TimingReport:
    model_label: str
    fit_seconds: float
    predict_seconds: float

    def to_dict(self):
        return {
            "model": self.model_label,
            "fit_seconds": self.fit_seconds,
            "predict_seconds": self.predict_seconds,
        }


def stratified_kfold(y, k, seed, repeat=0):
    """Test-index arrays of ``k`` stratified folds for one repeat.

    Rows of each class are shuffled with the stream ``(seed, "cv", repeat)``
    and dealt round-robin, continuing the deal across classes, so per-class
    and total fold sizes differ by at most one.
    """
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be >= 2")
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < k:
        raise ValueError(
            f"class {classes[np.argmin(counts)]} has {counts.min()} samples, fewer than k={k}"
        )
    rng = rng_stream(seed, "cv", repeat)
    dealt = np.concatenate([rng.permutation(np.flatnonzero(y == c)) for c in classes])
    fold_of = np.empty(y.shape[0], dtype=np.intp)
    fold_of[dealt] = np.arange(dealt.size) % k
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def _fold_score(estimator, X, y, test_idx):
    train = np.ones(y.shape[0], dtype=bool)
    train[test_idx] = False
    model = clone(estimator).fit(X[train], y[train])
    return float(np.mean(model.predict(X[test_idx]) == y[test_idx]))


def repeated_kfold_cv(estimator, X, y, k=10, repeats=10, seed=0, n_jobs=None):
    """Accuracy of a fresh clone of ``estimator`` on each of ``k * repeats`` folds.

    Scores are ordered by ``(repeat, fold)`` whatever ``n_jobs`` is.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    folds = [
        test for r in range(repeats) for test in stratified_kfold(y, k, seed, r)
    ]
    scores = Parallel(n_jobs=n_jobs)(
        delayed(_fold_score)(estimator, X, y, test) for test in folds
    )
    return CVReport(np.asarray(scores), k=k, repeats=repeats, seed=seed)


def confusion_matrix(y_true, y_pred, n_classes=None):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if n_classes is None:
        n_classes = int(max(y_true.max(), y_pred.max())) + 1
    if y_true.min() < 0 or y_pred.min() < 0 or max(y_true.max(), y_pred.max()) >= n_classes:
        raise ValueError(f"labels must lie in [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def _safe_div(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def classification_report(cm):
    counts = cm.counts if isinstance(cm, ConfusionMatrix) else np.asarray(cm)
    total = counts.sum()
    if total == 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(counts).astype(np.float64)
    support = counts.sum(axis=1)
    precision = _safe_div(tp, counts.sum(axis=0))
    recall = _safe_div(tp, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    weights = support / total

    def avg(w):
        return {
            "precision": float(np.sum(w * precision)),
            "recall": float(np.sum(w * recall)),
            "f1": float(np.sum(w * f1)),
        }

    n = len(support)
    return ClassificationReport(
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        accuracy=float(tp.sum() / total),
        macro=avg(np.full(n, 1.0 / n)),
        weighted=avg(weights),
    )


def roc_curve_binary(is_positive, scores):
    """ROC points from thresholding at every distinct score (plus +inf).

    A sample counts as positive when its score is ``>=`` the threshold, so
    tied scores move together and produce one diagonal segment.
    """
    is_positive = np.asarray(is_positive, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    pos = is_positive[order]
    tps = np.cumsum(pos)
    fps = np.cumsum(~pos)
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tps = np.r_[0, tps[last_of_group]]
    fps = np.r_[0, fps[last_of_group]]
    n_pos, n_neg = tps[-1], fps[-1]
    fpr = fps / n_neg if n_neg else np.full(fps.shape, np.nan)
    tpr = tps / n_pos if n_pos else np.full(tps.shape, np.nan)
    return fpr, tpr


def trapezoid_auc(fpr, tpr):
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_ovr(y_true, score_matrix):
    y_true = np.asarray(y_true)
    score_matrix = np.asarray(score_matrix, dtype=np.float64)
    if score_matrix.ndim != 2 or score_matrix.shape[0] != y_true.shape[0]:
        raise ValueError("score matrix must have one row per sample")
    fprs, tprs, aucs = [], [], []
    for c in range(score_matrix.shape[1]):
        positive = y_true == c
        fpr, tpr = roc_curve_binary(positive, score_matrix[:, c])
        fprs.append(fpr)
        tprs.append(tpr)
        defined = positive.any() and not positive.all()
        aucs.append(trapezoid_auc(fpr, tpr) if defined else None)
    present = [a for a in aucs if a is not None]
    macro = float(np.mean(present)) if present else None
    return RocCurve(fprs, tprs, aucs, macro)


def timed_fit_predict(estimator, train, test, label=None):
    """Fit on ``train`` and predict ``test``; both are ``Dataset`` or ``(X, y)``.

    Returns ``(TimingReport, test accuracy)``.
    """
    X_tr, y_tr = (train.X, train.y) if hasattr(train, "X") else train
    X_te, y_te = (test.X, test.y) if hasattr(test, "X") else test
    start = time.perf_counter()
    estimator.fit(X_tr, y_tr)
    fit_seconds = time.perf_counter() - start
    start = time.perf_counter()
    pred = estimator.predict(X_te)
    predict_seconds = time.perf_counter() - start
    label = label or type(estimator).__name__
    accuracy = float(np.mean(pred == np.asarray(y_te)))
    return TimingReport(label, fit_seconds, predict_seconds), accuracy
