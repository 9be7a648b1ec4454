"""CSV ingestion, min-max normalization and stratified splitting.

Rows containing missing-value markers are dropped on load. Labels are
remapped to contiguous class indices in order of first-sorted label
value. A copy of the UCI Iris table ships with the package for the
built-in experiments.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "Sample",
    "Dataset",
    "CsvSchema",
    "load_csv",
    "load_iris",
    "normalize",
    "split",
]


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class Dataset:
    name: str
    samples: tuple
    num_classes: int
    num_features: int

    def __post_init__(self):
        for s in self.samples:
            if len(s.features) != self.num_features:
                raise ValueError("sample feature count mismatch")
            if not np.all(np.isfinite(s.features)):
                raise ValueError("non-finite feature value")
            if not 0 <= s.label < self.num_classes:
                raise ValueError("label out of range")
        present = {s.label for s in self.samples}
        if self.samples and present != set(range(self.num_classes)):
            raise ValueError("every class must appear at least once")

    def __len__(self):
        return len(self.samples)

    @property
    def features(self) -> np.ndarray:
        """(N, F) feature matrix."""
        if not self.samples:
            return np.zeros((0, self.num_features))
        return np.stack([s.features for s in self.samples])

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)


@dataclass(frozen=True)
class CsvSchema:
    """Column mapping for :func:`load_csv`.

    Columns are named when the file has a header, else 0-based indices
    given as strings. ``feature_cols`` of None means every column except
    the label.
    """

    label_col: str
    feature_cols: tuple = None
    missing: str = "?"
    has_header: bool = None  # None: sniff from the first row


def _sniff_header(first_row, schema):
    if schema.has_header is not None:
        return schema.has_header
    # A header row is assumed when any cell is non-numeric and the
    # label column was given by name rather than index.
    for cell in first_row:
        try:
            float(cell)
        except ValueError:
            return not schema.label_col.isdigit()
    return False


def load_csv(path, schema: CsvSchema, name: str = None) -> Dataset:
    """Read a delimited file into a Dataset, dropping incomplete rows."""
    with open(path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: zero usable rows")

    has_header = _sniff_header(rows[0], schema)
    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        col_index = {h: i for i, h in enumerate(header)}
    else:
        col_index = {str(i): i for i in range(len(rows[0]))}

    if schema.label_col not in col_index:
        raise ValueError(f"label column {schema.label_col!r} not found")
    label_i = col_index[schema.label_col]
    if schema.feature_cols is None:
        feat_is = [i for i in sorted(col_index.values()) if i != label_i]
    else:
        missing_cols = [c for c in schema.feature_cols if c not in col_index]
        if missing_cols:
            raise ValueError(f"feature columns not found: {missing_cols}")
        feat_is = [col_index[c] for c in schema.feature_cols]

    feats, raw_labels = [], []
    for row in rows:
        cells = [row[i].strip() for i in feat_is + [label_i]]
        if any(c == schema.missing or c == "" for c in cells):
            continue
        try:
            feats.append([float(row[i]) for i in feat_is])
        except ValueError:
            continue
        raw_labels.append(row[label_i].strip())
    if not feats:
        raise ValueError(f"{path}: zero usable rows")

    classes = sorted(set(raw_labels))
    class_of = {c: i for i, c in enumerate(classes)}
    samples = tuple(
        Sample(np.asarray(f, dtype=float), class_of[l])
        for f, l in zip(feats, raw_labels)
    )
    return Dataset(
        name=name or str(path),
        samples=samples,
        num_classes=len(classes),
        num_features=len(feat_is),
    )


def load_iris() -> Dataset:
    """The bundled 150-row Iris table (4 features, 3 classes)."""
    ref = resources.files("rramsnn") / "data" / "iris.csv"
    with resources.as_file(ref) as path:
        return load_csv(path, CsvSchema(label_col="species"), name="iris")


def normalize(d: Dataset) -> Dataset:
    """Min-max scale each feature to [0, 1]; constant features map to 0.5."""
    if not d.samples:
        raise ValueError("cannot normalize an empty dataset")
    x = d.features
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = hi - lo
    const = span == 0
    span[const] = 1.0
    scaled = (x - lo) / span
    scaled[:, const] = 0.5
    samples = tuple(
        Sample(scaled[i], s.label) for i, s in enumerate(d.samples)
    )
    return Dataset(d.name, samples, d.num_classes, d.num_features)


def split(d: Dataset, train_fraction: float, seed: int):
    """Deterministic stratified split into (train, test) datasets."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    labels = d.labels
    train_idx, test_idx = [], []
    for c in range(d.num_classes):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(len(idx))]
        n_train = int(round(train_fraction * len(idx)))
        if n_train == 0 or n_train == len(idx):
            raise ValueError(
                f"train_fraction {train_fraction} empties class {c} on one side"
            )
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])

    def subset(indices, suffix):
        indices = sorted(indices)
        return Dataset(
            f"{d.name}/{suffix}",
            tuple(d.samples[i] for i in indices),
            d.num_classes,
            d.num_features,
        )

    return subset(train_idx, "train"), subset(test_idx, "test")
