"""Confusion matrices, ROC/AUC and k-fold cross-validation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import classify, dataset
from .errors import BispeechError, LengthMismatch, SingleClassLabels, UnknownClass

__all__ = [
    "ConfusionMatrix",
    "RocReport",
    "CvSummary",
    "confusion",
    "accuracy",
    "roc_auc",
    "macro_auc",
    "scores_auc",
    "cross_validate",
    "FoldError",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows: true class, columns: predicted class
    classes: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def format(self) -> str:
        width = max(8, max(len(c) for c in self.classes) + 1)
        lines = ["true\\pred".ljust(width) + "".join(c.rjust(width) for c in self.classes)]
        for c, row in zip(self.classes, self.counts):
            lines.append(c.ljust(width) + "".join(str(v).rjust(width) for v in row))
        return "\n".join(lines)


@dataclass(frozen=True)
class RocReport:
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    mode: str = "binary"  # "binary" | "macro-ovr"


def confusion(true_labels, predicted_labels, classes) -> ConfusionMatrix:
    classes = tuple(classes)
    if len(true_labels) != len(predicted_labels):
        raise LengthMismatch(f"{len(true_labels)} true labels vs {len(predicted_labels)} predictions")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        if t not in index or p not in index:
            raise UnknownClass(f"label {t if t not in index else p!r} not in {classes}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(counts, classes)


def accuracy(true_labels, predicted_labels) -> float:
    t = np.asarray(true_labels, dtype=object)
    p = np.asarray(predicted_labels, dtype=object)
    return float(np.mean(t == p))


def roc_auc(true_labels, scores, positive_class) -> RocReport:
    """ROC curve by sweeping thresholds over the unique scores, AUC by trapezoid.

    Equal scores form a single threshold step, which credits ties with half
    a concordant pair.
    """
    y = np.asarray([l == positive_class for l in true_labels])
    s = np.asarray(scores, dtype=np.float64)
    if len(y) != len(s):
        raise LengthMismatch(f"{len(y)} labels vs {len(s)} scores")
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClassLabels("ROC needs both positive and negative samples")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    # last index of every run of equal scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tp = np.cumsum(y)[ends]
    fp = np.cumsum(~y)[ends]
    tpr = np.r_[0.0, tp / n_pos]
    fpr = np.r_[0.0, fp / n_neg]
    thresholds = np.r_[np.inf, s[ends]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocReport(thresholds, fpr, tpr, auc, "binary")


def macro_auc(true_labels, score_matrix, classes) -> float:
    """Unweighted mean of one-vs-rest AUCs over classes present in the labels."""
    score_matrix = np.asarray(score_matrix, dtype=np.float64)
    present = [i for i, c in enumerate(classes) if c in set(true_labels)]
    aucs = [roc_auc(true_labels, score_matrix[:, i], classes[i]).auc for i in present]
    return float(np.mean(aucs))


def scores_auc(true_labels, score_matrix, classes, positive_class=None) -> float:
    """Binary AUC on the positive column, or macro one-vs-rest for k > 2."""
    classes = tuple(classes)
    score_matrix = np.asarray(score_matrix, dtype=np.float64)
    if len(classes) == 2:
        pos = classes[1] if positive_class is None else positive_class
        return roc_auc(true_labels, score_matrix[:, classes.index(pos)], pos).auc
    return macro_auc(true_labels, score_matrix, classes)


class FoldError(BispeechError):
    """Training failed on one fold; ``fold`` is the zero-based fold index."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")
        self.fold = fold
        self.cause = cause


@dataclass
class CvSummary:
    fold_accuracy: list
    fold_sizes: list
    confusion: ConfusionMatrix
    auc: float
    models: list = field(default_factory=list, repr=False)
    validation_scores: np.ndarray = field(default=None, repr=False)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracy))

    def report_text(self) -> str:
        lines = [
            f"fold {i + 1}: n={n} accuracy={a:.4f}"
            for i, (n, a) in enumerate(zip(self.fold_sizes, self.fold_accuracy))
        ]
        lines.append(f"mean accuracy: {self.mean_accuracy:.4f}")
        lines.append(f"pooled accuracy: {self.confusion.accuracy:.4f}")
        lines.append(f"AUC: {self.auc:.4f}")
        lines.append(self.confusion.format())
        return "\n".join(lines)

    def report_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fold", "n_validate", "accuracy", "auc"])
        for i, (n, a) in enumerate(zip(self.fold_sizes, self.fold_accuracy)):
            w.writerow([i + 1, n, repr(a), ""])
        w.writerow(["summary", sum(self.fold_sizes), repr(self.mean_accuracy), repr(self.auc)])
        return buf.getvalue()


def cross_validate(kind, X, labels, k: int = 5, seed: int = 0, params=None, columns=None,
                   positive_class=None) -> CvSummary:
    """k-fold CV; each fold fits its own standardizer and model on its train part.

    Validation scores are pooled across folds for the AUC (SVM margins from
    different folds are pooled as-is).
    """
    X = np.asarray(X, dtype=np.float64)
    labels = [str(l) for l in labels]
    classes = tuple(sorted(set(labels)))
    folds = dataset.kfold(range(len(labels)), k, seed)
    pooled_scores = np.full((len(labels), len(classes)), np.nan)
    predicted = [None] * len(labels)
    fold_acc, fold_sizes, models = [], [], []
    for f, (tr, va) in enumerate(folds):
        tr, va = list(tr), list(va)
        try:
            model = classify.train(kind, X[tr], [labels[i] for i in tr], params, columns)
        except BispeechError as exc:
            raise FoldError(f, exc) from exc
        s = classify.predict_scores(model, X[va])
        # align fold columns with the global class list
        for j, c in enumerate(model.classes):
            pooled_scores[va, classes.index(c)] = s[:, j]
        preds = [model.classes[i] for i in np.argmax(s, axis=1)]
        for i, p in zip(va, preds):
            predicted[i] = p
        fold_acc.append(accuracy([labels[i] for i in va], preds))
        fold_sizes.append(len(va))
        models.append(model)
    cm = confusion(labels, predicted, classes)
    # a class absent from a fold's training part ranks below every real score
    filled = np.where(np.isnan(pooled_scores), np.nanmin(pooled_scores) - 1.0, pooled_scores)
    auc = scores_auc(labels, filled, classes, positive_class)
    return CvSummary(fold_acc, fold_sizes, cm, auc, models, pooled_scores)
