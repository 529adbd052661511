"""Bagging, random forests and extremely randomized trees."""

import numpy as np
from joblib import Parallel, delayed

from ._core import ProbabilisticClassifier, rng_stream
from .tree import Presorted, build_tree, leaf_distributions

FOREST_KINDS = ("bagging", "random_forest", "extra_trees")

# kind -> (bootstrap, candidate features, splitter)
_KIND_RULES = {
    "bagging": (True, None, "best"),
    "random_forest": (True, "sqrt", "best"),
    "extra_trees": (False, "sqrt", "random"),
}


def draw_samples(kind, n_samples, rng):
    """Row indices a tree is grown on: a bootstrap replicate, or every row once."""
    bootstrap = _KIND_RULES[kind][0]
    if bootstrap:
        return rng.integers(0, n_samples, size=n_samples)
    return np.arange(n_samples)


def _grow(X, Y, kind, index, seed, max_depth, min_samples_leaf, max_features, presorted):
    rng = rng_stream(seed, kind, index)
    _, default_features, splitter = _KIND_RULES[kind]
    if max_features is None:
        max_features = default_features
    return build_tree(
        X,
        Y,
        draw_samples(kind, X.shape[0], rng),
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        max_features=max_features,
        splitter=splitter,
        rng=rng,
        presorted=presorted,
    )


class ForestClassifier(ProbabilisticClassifier):
    """Ensemble of Gini trees whose leaf class frequencies are averaged.

    ``kind`` selects the randomisation:

    - ``"bagging"``: bootstrap replicate, exhaustive split over all features
    - ``"random_forest"``: bootstrap replicate, exhaustive split over
      ``ceil(sqrt(d))`` random candidate features per node
    - ``"extra_trees"``: full training set, one random threshold for each
      of ``ceil(sqrt(d))`` random candidate features per node

    Tree ``i`` draws from the stream ``(random_state, kind, i)``, so results
    do not depend on ``n_jobs``.
    """

    _min_classes = 1

    def __init__(
        self,
        kind="extra_trees",
        n_estimators=100,
        max_depth=None,
        min_samples_leaf=1,
        max_features=None,
        random_state=0,
        n_jobs=None,
    ):
        self.kind = kind
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _fit(self, X, y):
        if self.kind not in FOREST_KINDS:
            raise ValueError(f"unknown forest kind {self.kind!r}; expected one of {FOREST_KINDS}")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        Y = np.eye(self.n_classes_)[y]
        splitter = _KIND_RULES[self.kind][2]
        presorted = Presorted(X, with_order=splitter == "best")
        self.trees_ = Parallel(n_jobs=self.n_jobs)(
            delayed(_grow)(
                X,
                Y,
                self.kind,
                i,
                self.random_state,
                self.max_depth,
                self.min_samples_leaf,
                self.max_features,
                presorted,
            )
            for i in range(self.n_estimators)
        )
        self._leaf_proba = [leaf_distributions(t) for t in self.trees_]

    def predict_proba(self, X):
        X = self._validate_predict_input(X)
        proba = np.zeros((X.shape[0], self.n_classes_))
        for tree, leaf_proba in zip(self.trees_, self._leaf_proba):
            proba += leaf_proba[tree.apply(X)]
        proba /= len(self.trees_)
        return proba


class ExtraTreesClassifier(ForestClassifier):
    def __init__(
        self,
        n_estimators=100,
        max_depth=None,
        min_samples_leaf=1,
        max_features=None,
        random_state=0,
        n_jobs=None,
    ):
        super().__init__(
            "extra_trees", n_estimators, max_depth, min_samples_leaf,
            max_features, random_state, n_jobs,
        )


class RandomForestClassifier(ForestClassifier):
    def __init__(
        self,
        n_estimators=100,
        max_depth=None,
        min_samples_leaf=1,
        max_features=None,
        random_state=0,
        n_jobs=None,
    ):
        super().__init__(
            "random_forest", n_estimators, max_depth, min_samples_leaf,
            max_features, random_state, n_jobs,
        )


class BaggingClassifier(ForestClassifier):
    def __init__(
        self,
        n_estimators=100,
        max_depth=None,
        min_samples_leaf=1,
        max_features=None,
        random_state=0,
        n_jobs=None,
    ):
        super().__init__(
            "bagging", n_estimators, max_depth, min_samples_leaf,
            max_features, random_state, n_jobs,
        )


def train_forest(X, y, kind, n_estimators=100, max_depth=None, seed=0, n_jobs=None):
    if kind not in FOREST_KINDS:
        raise ValueError(f"unknown forest kind {kind!r}; expected one of {FOREST_KINDS}")
    return ForestClassifier(
        kind=kind,
        n_estimators=n_estimators,
        max_depth=max_depth,
        random_state=seed,
        n_jobs=n_jobs,
    ).fit(X, y)


def forest_predict_proba(model, X):
    return model.predict_proba(X)
