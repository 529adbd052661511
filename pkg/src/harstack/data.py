"""Loading the UCI HAR feature files and stratified splitting."""

import os
from dataclasses import dataclass

import numpy as np

from ._core import HAR_CLASS_NAMES, rng_stream

HAR_N_FEATURES = 561
HAR_DOWNLOAD_URL = (
    "https://archive.ics.uci.edu/dataset/240/"
    "human+activity+recognition+using+smartphones"
)


class HarParseError(ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    class_names: tuple = HAR_CLASS_NAMES

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise ValueError(
                f"X {self.X.shape} and y {self.y.shape} do not describe the same samples"
            )
        if not np.all(np.isfinite(self.X)):
            raise ValueError("X contains non-finite values")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise ValueError("labels fall outside the known classes")

    def __len__(self):
        return self.X.shape[0]

    def subset(self, indices):
        return Dataset(self.X[indices], self.y[indices], self.class_names)


@dataclass
class SplitPair:
    part_a: Dataset
    part_b: Dataset
    indices_a: np.ndarray
    indices_b: np.ndarray


def _locate(data_dir, name, split):
    for candidate in (
        os.path.join(data_dir, name),
        os.path.join(data_dir, split, name),
    ):
        if os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(
        f"{name} not found in {data_dir} (or {os.path.join(data_dir, split)}); "
        f"download and unzip the UCI HAR dataset from {HAR_DOWNLOAD_URL}"
    )


def _read_matrix(path, n_features):
    try:
        X = np.loadtxt(path, dtype=np.float64, ndmin=2)
        if X.shape[1] == n_features:
            return X
    except ValueError:
        pass
    # slow path, only to name the offending line
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if len(fields) != n_features:
                raise HarParseError(
                    path, lineno, f"expected {n_features} fields, found {len(fields)}"
                )
            try:
                [float(v) for v in fields]
            except ValueError as exc:
                raise HarParseError(path, lineno, str(exc)) from None
    raise HarParseError(path, 1, "could not parse feature matrix")


def _read_labels(path):
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise HarParseError(path, lineno, f"not an integer label: {text!r}") from None
            if not 1 <= value <= len(HAR_CLASS_NAMES):
                raise ValueError(
                    f"{path}:{lineno}: label {value} outside 1..{len(HAR_CLASS_NAMES)}"
                )
            labels.append(value - 1)
    return np.asarray(labels, dtype=np.int64)


def read_activity_labels(path):
    names = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise HarParseError(path, lineno, "expected 'id name'")
            names[int(parts[0])] = parts[1]
    ids = sorted(names)
    if ids != list(range(1, len(HAR_CLASS_NAMES) + 1)):
        raise ValueError(f"{path}: expected activity ids 1..{len(HAR_CLASS_NAMES)}, got {ids}")
    return tuple(names[i] for i in ids)


def load_har_split(data_dir, split, n_features=HAR_N_FEATURES):
    """Read ``X_<split>.txt``, ``y_<split>.txt`` and ``activity_labels.txt``.

    Files are looked up directly in ``data_dir`` and in ``data_dir/<split>``
    (the layout of the published archive). Labels 1..6 become 0..5.
    """
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    if not os.path.isdir(data_dir):
        raise FileNotFoundError(
            f"HAR data directory {data_dir!r} does not exist; download and unzip "
            f"the UCI HAR dataset from {HAR_DOWNLOAD_URL}"
        )
    X = _read_matrix(_locate(data_dir, f"X_{split}.txt", split), n_features)
    y_path = _locate(data_dir, f"y_{split}.txt", split)
    y = _read_labels(y_path)
    class_names = read_activity_labels(_locate(data_dir, "activity_labels.txt", split))
    if y.shape[0] != X.shape[0]:
        raise HarParseError(
            y_path, y.shape[0], f"{y.shape[0]} labels for {X.shape[0]} feature rows"
        )
    return Dataset(X, y, class_names)


def save_har_split(dataset, data_dir, split):
    """Write a split in the published plain-text layout (flat directory)."""
    os.makedirs(data_dir, exist_ok=True)
    np.savetxt(os.path.join(data_dir, f"X_{split}.txt"), dataset.X, fmt="%.15e")
    np.savetxt(os.path.join(data_dir, f"y_{split}.txt"), dataset.y + 1, fmt="%d")
    with open(os.path.join(data_dir, "activity_labels.txt"), "w") as fh:
        for i, name in enumerate(dataset.class_names, start=1):
            fh.write(f"{i} {name}\n")


def stratified_split_indices(y, fraction_a, seed, tag="split"):
    """Per-class shuffled split; part A gets ``round(fraction_a * count)`` of each class."""
    if not 0 < fraction_a < 1:
        raise ValueError(f"fraction must lie strictly between 0 and 1, got {fraction_a}")
    y = np.asarray(y)
    rng = rng_stream(seed, tag)
    part_a, part_b = [], []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        if members.size < 2:
            raise ValueError(f"class {c} has fewer than 2 samples; cannot split")
        members = rng.permutation(members)
        n_a = int(np.floor(fraction_a * members.size + 0.5))
        n_a = min(max(n_a, 1), members.size - 1)
        part_a.append(members[:n_a])
        part_b.append(members[n_a:])
    return np.sort(np.concatenate(part_a)), np.sort(np.concatenate(part_b))


def stratified_split(dataset, fraction_a, seed):
    idx_a, idx_b = stratified_split_indices(dataset.y, fraction_a, seed)
    return SplitPair(dataset.subset(idx_a), dataset.subset(idx_b), idx_a, idx_b)
