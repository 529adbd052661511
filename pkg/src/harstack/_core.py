"""Shared classifier contract, input validation and seeded random streams."""

import zlib

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

HAR_CLASS_NAMES = (
    "WALKING",
    "WALKING_UPSTAIRS",
    "WALKING_DOWNSTAIRS",
    "SITTING",
    "STANDING",
    "LAYING",
)

_SEED_MASK = (1 << 64) - 1


def rng_stream(seed, tag, index=0):
    """Independent generator keyed by ``(seed, tag, index)``.

    Streams are counter-based (Philox), so the generator handed to tree ``i``
    of a forest does not depend on how many other trees were fitted before it
    or on which worker fits it.
    """
    tag_key = zlib.crc32(str(tag).encode("utf-8"))
    ss = np.random.SeedSequence([int(seed) & _SEED_MASK, tag_key, int(index)])
    return np.random.Generator(np.random.Philox(ss))


def check_X(X, n_features=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(
            f"X has {X.shape[1]} features, model was fitted with {n_features}"
        )
    return X


def check_X_y(X, y, min_classes=2):
    X = check_X(X)
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError(
            f"y must be 1-D with {X.shape[0]} entries, got shape {y.shape}"
        )
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty dataset")
    if not np.issubdtype(y.dtype, np.integer):
        if np.issubdtype(y.dtype, np.floating) and np.all(y == np.round(y)):
            y = y.astype(np.int64)
        else:
            raise ValueError("class labels must be integers")
    if y.min() < 0:
        raise ValueError("class labels must be non-negative integer ids")
    if np.unique(y).size < min_classes:
        raise ValueError(
            f"need at least {min_classes} distinct classes, got {np.unique(y).size}"
        )
    return X, y.astype(np.int64)


def softmax(scores):
    scores = np.asarray(scores, dtype=np.float64)
    z = scores - scores.max(axis=1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=1, keepdims=True)
    return z


def predict_labels(model, X):
    """Argmax of ``model.predict_proba``; ties go to the lowest class id."""
    n_expected = getattr(model, "n_features_in_", None)
    X = check_X(X, n_expected)
    proba = model.predict_proba(X)
    # np.argmax returns the first maximum, i.e. the lowest id
    return np.argmax(proba, axis=1)


class ProbabilisticClassifier(ClassifierMixin, BaseEstimator):
    """Base for every learner in the package.

    Subclasses implement ``_fit(X, y)`` and ``predict_proba``. Class ids are
    taken to be ``0..max(y)``.
    """

    _min_classes = 2

    def fit(self, X, y):
        X, y = check_X_y(X, y, min_classes=self._min_classes)
        self.n_features_in_ = X.shape[1]
        self.n_classes_ = int(y.max()) + 1
        self.classes_ = np.arange(self.n_classes_)
        self._fit(X, y)
        return self

    def _fit(self, X, y):
        raise NotImplementedError

    def _validate_predict_input(self, X):
        check_is_fitted(self, "n_features_in_")
        return check_X(X, self.n_features_in_)

    def predict(self, X):
        return predict_labels(self, X)

    @property
    def n_features_expected(self):
        return self.n_features_in_
