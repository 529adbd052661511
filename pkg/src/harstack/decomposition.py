"""Principal component analysis by SVD of the centred data."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._core import check_X


class PCA(TransformerMixin, BaseEstimator):
    """Project onto the top ``n_components`` principal axes.

    Variances use the ``n - 1`` denominator. Each axis is oriented so that
    its largest-magnitude entry is positive. No whitening is applied.

    Attributes
    ----------
    mean_ : ndarray of shape (d,)
    components_ : ndarray of shape (k, d)
        Orthonormal rows, ordered by decreasing explained variance.
    explained_variance_ : ndarray of shape (k,)
    total_variance_ : float
        Sum of the per-feature sample variances.
    """

    def __init__(self, n_components=200):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_X(X)
        n, d = X.shape
        k = self.n_components
        if n < 2:
            raise ValueError("PCA needs at least 2 samples")
        if not 1 <= k <= min(n - 1, d):
            raise ValueError(f"n_components must lie in [1, {min(n - 1, d)}], got {k}")
        self.mean_ = X.mean(axis=0)
        _, s, Vt = np.linalg.svd(X - self.mean_, full_matrices=False)
        Vt = Vt[:k]
        pivot = np.argmax(np.abs(Vt), axis=1)
        Vt *= np.sign(Vt[np.arange(k), pivot])[:, None]
        var = s**2 / (n - 1)
        self.components_ = Vt
        self.explained_variance_ = var[:k]
        self.total_variance_ = float(var.sum())
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_X(X, self.n_features_in_)
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        return np.asarray(Z) @ self.components_ + self.mean_

    @property
    def explained_variance_ratio_(self):
        return self.explained_variance_ / self.total_variance_

    def proportion_of_variance(self):
        """Cumulative share of total variance captured by the leading axes."""
        return np.cumsum(self.explained_variance_) / self.total_variance_


def fit_pca(X, k):
    return PCA(n_components=k).fit(X)


def pca_transform(model, X):
    return model.transform(X)


def proportion_of_variance(model):
    return model.proportion_of_variance()
