"""Open-set evaluation: accuracy, macro F1 over all / known classes, F1 of
the unknown class, and the full (K+1) x (K+1) confusion matrix."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class EvalReport:
    acc: float
    f1_all: float
    f1_known: float
    f1_unknown: float
    confusion: np.ndarray          # rows gold, cols predicted, labels 1..K+1
    per_class_f1: np.ndarray       # (K+1,)
    n_boundaries: int = 0

    def to_json(self) -> dict:
        return {
            "acc": self.acc,
            "f1_all": self.f1_all,
            "f1_known": self.f1_known,
            "f1_unknown": self.f1_unknown,
            "per_class_f1": [float(v) for v in self.per_class_f1],
            "confusion": self.confusion.tolist(),
            "n_boundaries": self.n_boundaries,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    def csv_cells(self) -> list[str]:
        """Metric cells in report column order: Acc, F1-All, F1-U, F1-K."""
        return [f"{100 * v:.4f}" for v in (self.acc, self.f1_all, self.f1_unknown, self.f1_known)]


def evaluate(predictions, gold_labels, n_known: int, n_boundaries: int = 0) -> EvalReport:
    """Score open-set predictions against gold labels.

    Labels must lie in 1..K+1 where K+1 is the unknown class. Accuracy is
    the exact-match fraction over all samples. ``f1_all`` macro-averages the
    per-class F1 over all K+1 classes (classes absent from both gold and
    predictions contribute 0), ``f1_known`` over classes 1..K only, and
    ``f1_unknown`` is the F1 of class K+1 alone.
    """
    pred = np.asarray(predictions, dtype=np.int64)
    gold = np.asarray(gold_labels, dtype=np.int64)
    if pred.shape != gold.shape or pred.ndim != 1:
        raise ValueError(f"predictions and gold labels must be equal-length 1-D "
                         f"sequences, got {pred.shape} vs {gold.shape}")
    if pred.size == 0:
        raise ValueError("cannot evaluate zero samples")
    n_all = n_known + 1
    for name, arr in (("predictions", pred), ("gold labels", gold)):
        if arr.min() < 1 or arr.max() > n_all:
            raise ValueError(f"{name} outside 1..{n_all}")

    confusion = np.zeros((n_all, n_all), dtype=np.int64)
    np.add.at(confusion, (gold - 1, pred - 1), 1)

    tp = np.diag(confusion).astype(np.float64)
    fp = confusion.sum(axis=0) - tp
    fn = confusion.sum(axis=1) - tp
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(precision + recall > 0,
                      2 * precision * recall / (precision + recall), 0.0)

    return EvalReport(
        acc=float(tp.sum() / pred.size),
        f1_all=float(f1.mean()),
        f1_known=float(f1[:n_known].mean()),
        f1_unknown=float(f1[n_known]),
        confusion=confusion,
        per_class_f1=f1,
        n_boundaries=n_boundaries,
    )
