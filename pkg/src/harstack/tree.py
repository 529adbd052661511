"""Top-down decision trees with exhaustive (CART) or random (Extra Trees) splits.

Trees are stored as flat node arrays. A node ``i`` is a leaf when
``feature[i] == -1``; otherwise a sample goes to ``left[i]`` iff
``x[feature[i]] < threshold[i]``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._core import ProbabilisticClassifier, rng_stream
from ._splitting import (
    best_split_sorted,
    best_split_sorted_labels,
    filter_sorted,
    partition_sorted,
    presort,
    random_split,
    sample_features,
)

LEAF = -1


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    depth: np.ndarray
    n_node_samples: np.ndarray

    @property
    def node_count(self):
        return self.feature.shape[0]

    @property
    def max_depth(self):
        return int(self.depth.max())

    @property
    def n_leaves(self):
        return int(np.count_nonzero(self.feature == LEAF))

    def node(self, i):
        """Readable view of node ``i``."""
        if self.feature[i] == LEAF:
            return {"leaf": True, "value": self.value[i].tolist()}
        return {
            "leaf": False,
            "feature_index": int(self.feature[i]),
            "threshold": float(self.threshold[i]),
            "left": int(self.left[i]),
            "right": int(self.right[i]),
        }

    def apply(self, X):
        """Leaf index reached by every row of ``X``."""
        n = X.shape[0]
        node = np.zeros(n, dtype=np.intp)
        active = np.arange(n)
        while active.size:
            cur = node[active]
            feat = self.feature[cur]
            internal = feat != LEAF
            active, cur, feat = active[internal], cur[internal], feat[internal]
            if not active.size:
                break
            go_left = X[active, feat] < self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return node


def draw_candidate_features(n_features, max_features, rng):
    """Sorted ids of ``max_features`` distinct features drawn uniformly."""
    if max_features >= n_features:
        return np.arange(n_features)
    return sample_features(n_features, rng.random(max_features))


def extra_trees_node_split(X, y, candidate_features, rng, min_samples_leaf=1):
    """Extra Trees split rule for a single node.

    Draws ``candidate_features`` distinct features, then one uniform
    ``u`` per candidate, giving the threshold ``min + (max - min) * u`` on
    the node. Constant candidates are skipped. Returns the
    ``(feature, threshold)`` pair with the lowest weighted child Gini, or
    ``None`` when every drawn feature is constant on the node.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    Y = np.eye(int(y.max()) + 1)[y]
    feats = draw_candidate_features(X.shape[1], candidate_features, rng)
    f, thr, _ = random_split(
        np.arange(X.shape[0]),
        np.ascontiguousarray(X.T),
        Y,
        np.ones(X.shape[0]),
        feats,
        rng.random(feats.size),
        min_samples_leaf,
    )
    if f < 0:
        return None
    return int(f), float(thr)


def resolve_max_features(max_features, n_features):
    if max_features is None or max_features == "all":
        return n_features
    if max_features == "sqrt":
        return max(1, math.ceil(math.sqrt(n_features)))
    if isinstance(max_features, float):
        if not 0 < max_features <= 1:
            raise ValueError("float max_features must lie in (0, 1]")
        return max(1, int(max_features * n_features))
    max_features = int(max_features)
    if max_features < 1:
        raise ValueError("max_features must be >= 1")
    return min(max_features, n_features)


class Presorted:
    """Column-major copy of ``X`` plus (optionally) its per-feature sort order.

    Built once and shared by every tree grown on the same matrix.
    """

    def __init__(self, X, with_order=True):
        self.Xt = np.ascontiguousarray(X.T)
        self.order = presort(X) if with_order else None


def build_tree(
    X,
    Y,
    sample_indices,
    *,
    max_depth=None,
    min_samples_leaf=1,
    max_features=None,
    splitter="best",
    rng=None,
    regression=False,
    presorted=None,
):
    """Grow one tree on ``X[sample_indices]``.

    ``Y`` holds one target row per sample: one-hot class indicators for
    classification (leaf values become class counts) or real targets for
    regression (leaf values become means). ``sample_indices`` may repeat
    entries; repeats act as integer sample weights, which is how bootstrap
    replicates are expressed. ``min_samples_leaf`` counts distinct rows.
    """
    if splitter not in ("best", "random"):
        raise ValueError(f"unknown splitter {splitter!r}")
    sample_indices = np.asarray(sample_indices, dtype=np.intp)
    if sample_indices.size == 0:
        raise ValueError("cannot grow a tree on zero samples")
    if max_depth is not None and max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be >= 1")
    n, n_features = X.shape
    n_candidates = resolve_max_features(max_features, n_features)
    if rng is None:
        rng = rng_stream(0, "tree")
    depth_limit = math.inf if max_depth is None else max_depth

    w = np.bincount(sample_indices, minlength=n).astype(np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    Yw = np.ascontiguousarray(Y * w[:, None])
    inbag = w > 0
    labels = None if regression else np.argmax(Y, axis=1)
    if presorted is None or (splitter == "best" and presorted.order is None):
        presorted = Presorted(X, with_order=splitter == "best")
    Xt = presorted.Xt
    if splitter == "best":
        root = filter_sorted(presorted.order, inbag)
        go_left = np.zeros(n, dtype=np.bool_)
    else:
        root = np.flatnonzero(inbag)

    feature, threshold, left, right = [], [], [], []
    value, depth, n_samples = [], [], []

    def new_node(d, m):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(None)
        depth.append(d)
        n_samples.append(m)
        return len(feature) - 1

    n_root = root.shape[-1]
    stack = [(new_node(0, n_root), root, 0)]
    while stack:
        node, payload, d = stack.pop()
        rows = payload[0] if splitter == "best" else payload
        m = rows.size
        total = Yw[rows].sum(0)
        if regression:
            value[node] = total / w[rows].sum()
            pure = np.ptp(Y[rows], axis=0).max() == 0.0
        else:
            value[node] = total
            pure = np.count_nonzero(total) <= 1
        if pure or d >= depth_limit or m < 2 * min_samples_leaf:
            continue
        feats = draw_candidate_features(n_features, n_candidates, rng)
        if splitter == "best":
            if regression:
                f, thr, _ = best_split_sorted(
                    payload, Xt, Yw, w, feats, min_samples_leaf
                )
            else:
                f, thr, _ = best_split_sorted_labels(
                    payload, Xt, labels, w, Y.shape[1], feats, min_samples_leaf
                )
            if f < 0:
                continue
            go_left[rows] = Xt[f, rows] < thr
            left_part, right_part = partition_sorted(payload, go_left)
            m_left = left_part.shape[1]
        else:
            f, thr, _ = random_split(
                rows, Xt, Yw, w, feats, rng.random(feats.size), min_samples_leaf
            )
            if f < 0:
                continue
            mask = Xt[f, rows] < thr
            left_part, right_part = rows[mask], rows[~mask]
            m_left = left_part.size
        feature[node] = int(f)
        threshold[node] = float(thr)
        left[node] = new_node(d + 1, m_left)
        right[node] = new_node(d + 1, m - m_left)
        stack.append((right[node], right_part, d + 1))
        stack.append((left[node], left_part, d + 1))

    return Tree(
        feature=np.asarray(feature, dtype=np.intp),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.intp),
        right=np.asarray(right, dtype=np.intp),
        value=np.vstack(value),
        depth=np.asarray(depth, dtype=np.intp),
        n_node_samples=np.asarray(n_samples, dtype=np.intp),
    )


def leaf_distributions(tree):
    """Per-node class frequencies (rows of ``tree.value`` normalised)."""
    v = tree.value
    return v / v.sum(axis=1, keepdims=True)


class DecisionTreeClassifier(ProbabilisticClassifier):
    """Single Gini classification tree.

    Parameters
    ----------
    max_depth : int or None
        ``None`` grows until leaves are pure or cannot be split.
    min_samples_leaf : int
    max_features : int, float, "sqrt" or None
        Candidate features drawn at each node; ``None`` means all.
    splitter : {"best", "random"}
        ``"random"`` draws one uniform threshold per candidate feature.
    random_state : int
    """

    _min_classes = 1

    def __init__(
        self,
        max_depth=None,
        min_samples_leaf=1,
        max_features=None,
        splitter="best",
        random_state=0,
    ):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.splitter = splitter
        self.random_state = random_state

    def _fit(self, X, y):
        Y = np.eye(self.n_classes_)[y]
        self.tree_ = build_tree(
            X,
            Y,
            np.arange(X.shape[0]),
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            max_features=self.max_features,
            splitter=self.splitter,
            rng=rng_stream(self.random_state, "cart"),
        )
        self._leaf_proba = leaf_distributions(self.tree_)

    def predict_proba(self, X):
        X = self._validate_predict_input(X)
        return self._leaf_proba[self.tree_.apply(X)]

    def apply(self, X):
        X = self._validate_predict_input(X)
        return self.tree_.apply(X)


def train_cart(
    X,
    y,
    max_depth=None,
    min_leaf_samples=1,
    candidate_features=None,
    splitter="best",
    seed=0,
):
    return DecisionTreeClassifier(
        max_depth=max_depth,
        min_samples_leaf=min_leaf_samples,
        max_features=candidate_features,
        splitter=splitter,
        random_state=seed,
    ).fit(X, y)
