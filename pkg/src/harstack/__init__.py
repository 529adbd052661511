"""Ensemble classifiers (extra trees, stacked generalization and their base
learners) with the evaluation tooling to run them on the UCI HAR features."""

__version__ = "0.1.0"

from ._core import HAR_CLASS_NAMES, predict_labels, rng_stream
from .boosting import GradientBoostingClassifier
from .decomposition import PCA
from .forest import BaggingClassifier, ExtraTreesClassifier, ForestClassifier, RandomForestClassifier
from .linear import LinearSVMOvR, LogisticRegressionOvR, sigmoid
from .neighbors import KNeighborsClassifier
from .stacking import BaseLearnerSpec, StackedClassifier, default_roster
from .tree import DecisionTreeClassifier

__all__ = [
    "HAR_CLASS_NAMES",
    "BaggingClassifier",
    "BaseLearnerSpec",
    "DecisionTreeClassifier",
    "ExtraTreesClassifier",
    "ForestClassifier",
    "GradientBoostingClassifier",
    "KNeighborsClassifier",
    "LinearSVMOvR",
    "LogisticRegressionOvR",
    "PCA",
    "RandomForestClassifier",
    "StackedClassifier",
    "default_roster",
    "predict_labels",
    "rng_stream",
    "sigmoid",
]
