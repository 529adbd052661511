"""Multi-class gradient boosting on multinomial deviance."""

import dataclasses

import numpy as np

from ._core import ProbabilisticClassifier, check_X_y, softmax
from .tree import Presorted, build_tree

_DENOM_EPS = 1e-10


def multinomial_deviance(y, scores):
    """Mean negative log-likelihood of ``y`` under ``softmax(scores)``."""
    scores = np.asarray(scores, dtype=np.float64)
    z = scores - scores.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    return float(np.mean(log_norm - z[np.arange(len(y)), y]))


def newton_leaf_values(residual, leaves, n_leaves, n_classes):
    """One-step Newton update per leaf: ``(K-1)/K * sum(r) / sum(|r|(1-|r|))``."""
    num = np.bincount(leaves, weights=residual, minlength=n_leaves)
    a = np.abs(residual)
    den = np.bincount(leaves, weights=a * (1.0 - a), minlength=n_leaves)
    return (n_classes - 1) / n_classes * num / np.maximum(den, _DENOM_EPS)


class GradientBoostingClassifier(ProbabilisticClassifier):
    """Additive softmax model built from one regression tree per class per stage.

    Each stage fits a regression tree to the residual ``1{y=c} - p_c`` of
    every class ``c``, replaces the tree's leaf means with a Newton step and
    adds the tree scaled by ``learning_rate``. Fitting uses no subsampling,
    so ``random_state`` has no effect on the result; it is kept for API
    uniformity with the other learners.
    """

    def __init__(self, n_estimators=50, learning_rate=0.2, max_depth=3, random_state=0):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.random_state = random_state

    def _fit(self, X, y):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must lie in (0, 1]")
        n, K = X.shape[0], self.n_classes_
        Y = np.eye(K)[y]
        prior = np.bincount(y, minlength=K) / n
        self.initial_scores_ = np.log(np.maximum(prior, 1e-12))
        scores = np.tile(self.initial_scores_, (n, 1))
        presorted = Presorted(X)
        everyone = np.arange(n)
        self.stages_ = []
        for _ in range(self.n_estimators):
            residual = Y - softmax(scores)
            stage = []
            for c in range(K):
                r = residual[:, c]
                tree = build_tree(
                    X,
                    r[:, None],
                    everyone,
                    max_depth=self.max_depth,
                    splitter="best",
                    regression=True,
                    presorted=presorted,
                )
                leaves = tree.apply(X)
                gamma = newton_leaf_values(r, leaves, tree.node_count, K)
                tree = dataclasses.replace(tree, value=gamma[:, None])
                scores[:, c] += self.learning_rate * gamma[leaves]
                stage.append(tree)
            self.stages_.append(stage)

    def staged_decision_function(self, X):
        """Raw scores after 0, 1, ..., n_estimators stages (prior-only first)."""
        X = self._validate_predict_input(X)
        scores = np.tile(self.initial_scores_, (X.shape[0], 1))
        yield scores.copy()
        for stage in self.stages_:
            for c, tree in enumerate(stage):
                scores[:, c] += self.learning_rate * tree.value[tree.apply(X), 0]
            yield scores.copy()

    def decision_function(self, X):
        for scores in self.staged_decision_function(X):
            pass
        return scores

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def staged_train_loss(self, X, y):
        X, y = check_X_y(X, y, min_classes=1)
        return [multinomial_deviance(y, s) for s in self.staged_decision_function(X)]


def train_gradient_boosting(X, y, n_estimators=50, learning_rate=0.2, max_depth=3, seed=0):
    return GradientBoostingClassifier(
        n_estimators=n_estimators,
        learning_rate=learning_rate,
        max_depth=max_depth,
        random_state=seed,
    ).fit(X, y)


def staged_train_loss(model, X, y):
    return model.staged_train_loss(X, y)
