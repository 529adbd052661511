"""Two-level stacked generalization on a hold-out split.

The training data is split (stratified) into ``D1`` and ``D2``. Every base
learner is fitted on ``D1``; their class-probability rows on ``D2``,
concatenated in learner order, form the meta-features on which the
meta-learner is fitted.
"""

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import clone

from ._core import ProbabilisticClassifier
from .boosting import GradientBoostingClassifier
from .data import stratified_split_indices
from .forest import BaggingClassifier, ExtraTreesClassifier, RandomForestClassifier
from .linear import LinearSVMOvR, LogisticRegressionOvR
from .neighbors import KNeighborsClassifier
from .tree import DecisionTreeClassifier

LEARNERS = {
    "logistic_ovr": (LogisticRegressionOvR, {"l1_lambda": 1e-4}),
    "linear_svm": (LinearSVMOvR, {"C": 2.0}),
    "gradient_boosting": (GradientBoostingClassifier, {"n_estimators": 50, "learning_rate": 0.2}),
    "extra_trees": (ExtraTreesClassifier, {"n_estimators": 100, "max_depth": 4}),
    "knn": (KNeighborsClassifier, {"n_neighbors": 5}),
    "random_forest": (RandomForestClassifier, {"n_estimators": 100}),
    "bagging": (BaggingClassifier, {"n_estimators": 100}),
    "cart": (DecisionTreeClassifier, {}),
}


class BaseLearnerError(RuntimeError):
    def __init__(self, index, learner, cause):
        self.index = index
        super().__init__(f"base learner {index} ({type(learner).__name__}) failed: {cause}")


@dataclass
class BaseLearnerSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in LEARNERS:
            raise ValueError(f"unknown learner kind {self.kind!r}; expected one of {sorted(LEARNERS)}")

    def build(self, seed=None):
        cls, defaults = LEARNERS[self.kind]
        est = cls(**{**defaults, **self.params})
        if seed is not None and "random_state" in est.get_params() and "random_state" not in self.params:
            est.set_params(random_state=seed)
        return est


def default_roster():
    """The four stacked learners with their tuned settings."""
    return [
        BaseLearnerSpec("logistic_ovr"),
        BaseLearnerSpec("linear_svm"),
        BaseLearnerSpec("gradient_boosting"),
        BaseLearnerSpec("extra_trees"),
    ]


def meta_features(base_models, X):
    """``(n, T * n_classes)`` matrix of base-learner probability blocks."""
    widths = {m.n_classes_ for m in base_models}
    if len(widths) != 1:
        raise ValueError(f"base learners disagree on the number of classes: {sorted(widths)}")
    return np.hstack([m.predict_proba(X) for m in base_models])


def _fit_base(index, estimator, X, y):
    try:
        return clone(estimator).fit(X, y)
    except Exception as exc:
        raise BaseLearnerError(index, estimator, exc) from exc


class StackedClassifier(ProbabilisticClassifier):
    """Stacked generalization with a held-out meta-training split.

    Parameters
    ----------
    base_estimators : list of estimators
        Cloned and fitted on ``D1``. Each must expose ``predict_proba``.
    meta_estimator : estimator or None
        Fitted on the meta-features of ``D2``; defaults to one-vs-rest L1
        logistic regression.
    split_ratio : float
        Fraction of every class assigned to ``D1``.
    levels : int
        Only two-level stacks are supported.
    """

    def __init__(
        self,
        base_estimators=None,
        meta_estimator=None,
        split_ratio=0.5,
        levels=2,
        random_state=0,
        n_jobs=None,
    ):
        self.base_estimators = base_estimators
        self.meta_estimator = meta_estimator
        self.split_ratio = split_ratio
        self.levels = levels
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _fit(self, X, y):
        if self.levels != 2:
            raise ValueError(f"only two-level stacks are supported, got levels={self.levels}")
        bases = self.base_estimators
        if bases is None:
            bases = [spec.build() for spec in default_roster()]
        if not bases:
            raise ValueError("at least one base estimator is required")
        meta = self.meta_estimator
        if meta is None:
            meta = BaseLearnerSpec("logistic_ovr").build()

        d1, d2 = stratified_split_indices(y, self.split_ratio, self.random_state, tag="stack")
        self.d1_indices_, self.d2_indices_ = d1, d2
        self.base_models_ = Parallel(n_jobs=self.n_jobs)(
            delayed(_fit_base)(t, est, X[d1], y[d1]) for t, est in enumerate(bases)
        )
        for t, model in enumerate(self.base_models_):
            if model.n_classes_ != self.n_classes_:
                raise BaseLearnerError(t, model, "did not see every class in D1")
        M = meta_features(self.base_models_, X[d2])
        self.meta_model_ = clone(meta).fit(M, y[d2])
        self.n_meta_features_ = M.shape[1]

    def transform(self, X):
        """Meta-features of ``X``."""
        X = self._validate_predict_input(X)
        M = meta_features(self.base_models_, X)
        if M.shape[1] != self.n_meta_features_:
            raise ValueError(
                f"meta-feature width {M.shape[1]} != {self.n_meta_features_} seen at fit"
            )
        return M

    def predict_proba(self, X):
        return self.meta_model_.predict_proba(self.transform(X))


def train_stacked(X, y, specs=None, meta_spec=None, split_ratio=0.5, seed=0, n_jobs=None):
    specs = default_roster() if specs is None else specs
    meta_spec = meta_spec or BaseLearnerSpec("logistic_ovr")
    return StackedClassifier(
        base_estimators=[s.build(seed) for s in specs],
        meta_estimator=meta_spec.build(),
        split_ratio=split_ratio,
        random_state=seed,
        n_jobs=n_jobs,
    ).fit(X, y)


def stacked_predict(model, X):
    return model.predict(X)


def stacked_predict_proba(model, X):
    return model.predict_proba(X)
