"""Euclidean k-nearest-neighbour classification and split protocols."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class KNNResult:
    labels: list
    accuracy: float | None
    confusion: dict | None  # (true, predicted) -> count

    def confusion_matrix(self, classes: Sequence) -> np.ndarray:
        idx = {c: k for k, c in enumerate(classes)}
        out = np.zeros((len(classes), len(classes)), dtype=int)
        for (t, p), n in (self.confusion or {}).items():
            out[idx[t], idx[p]] += n
        return out


def _squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # explicit differences keep identical points at exactly zero
    return np.array([np.sum((b - row) ** 2, axis=1) for row in a]).reshape(len(a), len(b))


def knn_classify(train_x, train_y: Sequence, test_x, k: int = 1,
                 test_y: Sequence | None = None) -> KNNResult:
    """Majority vote among the ``k`` nearest training rows.

    A tied vote goes to the tied label whose closest member is nearest.
    """
    train_x = np.atleast_2d(np.asarray(train_x, dtype=float))
    test_x = np.atleast_2d(np.asarray(test_x, dtype=float))
    train_y = list(train_y)
    if len(train_y) == 0:
        raise ValueError("empty training set")
    if k < 1:
        raise ValueError("k must be >= 1")
    if train_x.shape[1] != test_x.shape[1]:
        raise ValueError("train and test feature lengths differ")
    k = min(k, len(train_y))
    dist = _squared_distances(test_x, train_x)
    predictions = []
    for row in dist:
        nearest = np.argsort(row, kind="stable")[:k]
        votes = Counter(train_y[i] for i in nearest)
        top = max(votes.values())
        tied = {lab for lab, v in votes.items() if v == top}
        # nearest is sorted by distance, so the first tied label hit is the closest
        predictions.append(next(train_y[i] for i in nearest if train_y[i] in tied))
    if test_y is None:
        return KNNResult(predictions, None, None)
    test_y = list(test_y)
    confusion = Counter(zip(test_y, predictions))
    acc = sum(t == p for t, p in zip(test_y, predictions)) / len(test_y) if test_y else 0.0
    return KNNResult(predictions, acc, dict(confusion))


def stratified_splits(labels: Sequence, n_splits: int, seed: int,
                      train_fraction: float = 0.5) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded per-class shuffles, ``train_fraction`` of every class to training."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_splits):
        train, test = [], []
        for cls in sorted(set(labels.tolist()), key=str):
            members = np.flatnonzero(labels == cls)
            rng.shuffle(members)
            cut = int(round(len(members) * train_fraction))
            train.extend(members[:cut])
            test.extend(members[cut:])
        out.append((np.sort(np.array(train, dtype=int)), np.sort(np.array(test, dtype=int))))
    return out


def evaluate_splits(features, labels, n_splits: int = 10, seed: int = 0, k: int = 1,
                    test_features=None) -> list[float]:
    """Accuracy per split; ``test_features`` (e.g. noisy copies) replace the test rows if given."""
    features = np.asarray(features, dtype=float)
    test_features = features if test_features is None else np.asarray(test_features, dtype=float)
    labels = list(labels)
    accs = []
    for tr, te in stratified_splits(labels, n_splits, seed):
        res = knn_classify(features[tr], [labels[i] for i in tr], test_features[te], k,
                           [labels[i] for i in te])
        accs.append(res.accuracy)
    return accs


def write_feature_csv(path: str | Path | None, labels: Sequence, features) -> str:
    features = np.atleast_2d(np.asarray(features, dtype=float))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label"] + [f"f{i}" for i in range(features.shape[1])])
    for lab, row in zip(labels, features):
        writer.writerow([lab] + [repr(float(v)) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_feature_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(Path(path).read_text())))
    if not rows or rows[0][:1] != ["label"]:
        raise ValueError(f"{path}: expected a 'label' column first")
    labels = [r[0] for r in rows[1:]]
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)
    return labels, values.reshape(len(labels), len(rows[0]) - 1)
