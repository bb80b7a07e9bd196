"""
Corpus manifests, stratified train/test splits and k-fold index generation.

All shuffling is a seeded Fisher-Yates pass driven by numpy's PCG64
generator, so a plan is a pure function of its inputs and seed.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ClassTooSmall,
    DuplicatePath,
    EmptyManifest,
    FormatError,
    TooFewSamples,
    UnknownLabel,
)
from .features import BINARY_LABELS, LABELS

__all__ = [
    "VALID_LABELS",
    "Manifest",
    "SplitPlan",
    "load_manifest",
    "write_manifest",
    "to_binary",
    "shuffle",
    "split",
    "split_labels",
    "kfold",
    "save_split",
    "load_split",
]

# the four source classes plus the pooled "Synthetic" tag of the binary scenario
VALID_LABELS = LABELS + (BINARY_LABELS[1],)


@dataclass(frozen=True)
class Manifest:
    entries: tuple  # of (path, label)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(p), str(c)) for p, c in self.entries))
        if not self.entries:
            raise EmptyManifest("manifest has no entries")
        seen = set()
        for i, (p, c) in enumerate(self.entries):
            if c not in VALID_LABELS:
                raise UnknownLabel(f"row {i + 1}: unknown label {c!r} for {p}")
            if p in seen:
                raise DuplicatePath(f"row {i + 1}: duplicate path {p}")
            seen.add(p)

    def __len__(self):
        return len(self.entries)

    @property
    def paths(self):
        return [p for p, _ in self.entries]

    @property
    def labels(self):
        return [c for _, c in self.entries]

    def histogram(self) -> dict:
        return dict(Counter(self.labels))


@dataclass(frozen=True)
class SplitPlan:
    train_indices: tuple
    test_indices: tuple
    seed: int


def load_manifest(path) -> Manifest:
    """Read a ``path,label`` CSV.  Relative paths resolve against its folder."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["path", "label"]:
            raise FormatError(f"{path}: header must be 'path,label', got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            p, c = row[0].strip(), row[1].strip()
            if c not in VALID_LABELS:
                raise UnknownLabel(f"{path}:{lineno}: unknown label {c!r}")
            full = Path(p) if Path(p).is_absolute() else path.parent / p
            rows.append((str(full), c))
    return Manifest(tuple(rows))


def write_manifest(manifest: Manifest, path, relative_to=None) -> None:
    lines = ["path,label"]
    for p, c in manifest.entries:
        if relative_to is not None:
            p = Path(p).relative_to(relative_to).as_posix()
        lines.append(f"{p},{c}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def to_binary(labels):
    """Collapse every synthetic source into the single ``Synthetic`` class."""
    human, synthetic = BINARY_LABELS
    return [human if c == human else synthetic for c in labels]


def shuffle(items, rng: np.random.Generator) -> list:
    """Fisher-Yates shuffle returning a new list."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out


def _allocate(sizes, total):
    # largest-remainder apportionment of `total` test slots over the classes
    exact = np.asarray(sizes, dtype=float) * total / sum(sizes)
    counts = np.floor(exact).astype(int)
    order = sorted(range(len(sizes)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[: total - counts.sum()]:
        counts[i] += 1
    return counts


def split(manifest: Manifest, test_fraction: float, seed: int) -> SplitPlan:
    """Stratified random split.

    The test size is ``round(test_fraction * N)``, apportioned over classes
    by largest remainder so each class is within one sample of the fraction.
    """
    return split_labels(manifest.labels, test_fraction, seed)


def split_labels(labels, test_fraction: float, seed: int) -> SplitPlan:
    """:func:`split` on a bare label sequence."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    labels = list(labels)
    classes = sorted(set(labels), key=labels.index)
    members = {c: [i for i, l in enumerate(labels) if l == c] for c in classes}
    for c, idx in members.items():
        if len(idx) < 2:
            raise ClassTooSmall(f"class {c!r} has {len(idx)} entries, need at least 2")
    total = int(round(test_fraction * len(labels)))
    counts = _allocate([len(members[c]) for c in classes], total)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c, n_test in zip(classes, counts):
        idx = shuffle(members[c], rng)
        n_test = min(max(int(n_test), 1), len(idx) - 1)
        test += idx[:n_test]
        train += idx[n_test:]
    return SplitPlan(tuple(sorted(train)), tuple(sorted(test)), seed)


def kfold(indices, k: int, seed: int):
    """Shuffle and partition ``indices`` into k folds of near-equal size.

    Returns a list of ``(train, validate)`` pairs of sorted tuples; the
    first ``len % k`` folds hold one extra element.
    """
    indices = list(indices)
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(indices) < k:
        raise TooFewSamples(f"{len(indices)} samples cannot fill {k} folds")
    order = shuffle(indices, np.random.default_rng(seed))
    base, extra = divmod(len(order), k)
    folds, start = [], 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(order[start : start + size])
        start += size
    out = []
    for f in range(k):
        val = set(folds[f])
        out.append((tuple(sorted(i for i in indices if i not in val)), tuple(sorted(val))))
    return out


def save_split(plan: SplitPlan, path) -> None:
    doc = {"seed": plan.seed, "train": list(plan.train_indices), "test": list(plan.test_indices)}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_split(path) -> SplitPlan:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return SplitPlan(tuple(doc["train"]), tuple(doc["test"]), int(doc["seed"]))
