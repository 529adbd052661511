import numpy as np

from ._core import ProbabilisticClassifier

_QUERY_BLOCK = 512


class KNeighborsClassifier(ProbabilisticClassifier):
    """Brute-force Euclidean k-nearest-neighbour voting.

    Class probabilities are the class frequencies among the ``n_neighbors``
    closest training rows. Distance ties at the cut-off go to the training
    row with the lower index.
    """

    _min_classes = 1

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def _fit(self, X, y):
        if not 1 <= self.n_neighbors <= X.shape[0]:
            raise ValueError(
                f"n_neighbors must lie in [1, {X.shape[0]}], got {self.n_neighbors}"
            )
        self.X_train_ = X.copy()
        self.y_train_ = y.copy()
        self._sq_norms = (X * X).sum(axis=1)

    def kneighbors(self, X):
        X = self._validate_predict_input(X)
        k = self.n_neighbors
        out = np.empty((X.shape[0], k), dtype=np.intp)
        for start in range(0, X.shape[0], _QUERY_BLOCK):
            Q = X[start:start + _QUERY_BLOCK]
            d2 = self._sq_norms[None, :] - 2.0 * Q @ self.X_train_.T
            # stable sort keeps lower training indices first among equal distances
            out[start:start + _QUERY_BLOCK] = np.argsort(d2, axis=1, kind="stable")[:, :k]
        return out

    def predict_proba(self, X):
        neigh = self.kneighbors(X)
        votes = self.y_train_[neigh]
        proba = np.zeros((neigh.shape[0], self.n_classes_))
        rows = np.repeat(np.arange(neigh.shape[0]), neigh.shape[1])
        np.add.at(proba, (rows, votes.ravel()), 1.0)
        return proba / self.n_neighbors


def train_knn(X, y, k=5):
    return KNeighborsClassifier(n_neighbors=k).fit(X, y)


def knn_predict_proba(model, X):
    return model.predict_proba(X)
