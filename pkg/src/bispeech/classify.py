"""
Classifiers: weighted kNN, LDA, QDA, logistic regression and kernel SVMs.

Every model is trained on z-scored features (a :class:`Standardizer` fitted
on the training rows travels with the model).  SVMs are solved with SMO
using maximal-violating-pair working-set selection.  Multi-class SVM and
logistic models use one-vs-one reduction; SVM can also run one-vs-rest.

Scores returned by :func:`predict_scores`:

* logistic, LDA, QDA: class probabilities (rows sum to 1)
* kNN: inverse-distance weight share per class (rows sum to 1)
* SVM, two classes: ``[-f(x), f(x)]`` with f the signed margin
* SVM one-vs-one: votes + 0.5 * tanh(mean margin toward the class), so the
  vote winner always has the top score and margins break vote ties
* SVM one-vs-rest: the per-class margins

``predict`` is the argmax of the scores; ties go to the earlier class in
``model.classes`` (sorted label order).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    IoFailure,
    SingleClass,
    SingularCovariance,
    TooFewRows,
    UnreadableModel,
)

__all__ = [
    "KINDS",
    "Standardizer",
    "SvmParams",
    "TrainedModel",
    "fit_standardizer",
    "kernel_matrix",
    "smo",
    "logistic_objective",
    "train",
    "predict",
    "predict_scores",
    "save_model",
    "load_model",
]

KINDS = ("knn", "lda", "qda", "logistic", "svm-linear", "svm-quad")
MODEL_FORMAT = "bispeech-model"
MODEL_VERSION = 1

_STD_FLOOR = 1e-12
_KNN_WEIGHT_CAP = 1e12


# --------------------------------------------------------------------------
# standardization


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale

    apply = transform

    def inverse_transform(self, Z):
        return np.asarray(Z, dtype=np.float64) * self.scale + self.mean

    def to_dict(self):
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["scale"], dtype=np.float64))


def fit_standardizer(X) -> Standardizer:
    """Column z-scoring; columns with std < 1e-12 pass through untouched."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TooFewRows("standardizer needs at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    flat = std < _STD_FLOOR
    return Standardizer(np.where(flat, 0.0, mean), np.where(flat, 1.0, std))


# --------------------------------------------------------------------------
# SVM


@dataclass(frozen=True)
class SvmParams:
    kernel: str = "poly"  # "linear" | "poly"
    degree: int = 2
    kernel_scale: float = 1.0
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 1000
    strategy: str = "ovo"  # "ovo" | "ovr"

    def __post_init__(self):
        if self.kernel not in ("linear", "poly"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.kernel_scale <= 0 or self.C <= 0 or self.tol <= 0:
            raise ValueError("kernel_scale, C and tol must be positive")
        if self.degree < 1 or self.max_passes < 1:
            raise ValueError("degree and max_passes must be >= 1")
        if self.strategy not in ("ovo", "ovr"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def kernel_matrix(A, B, params: SvmParams) -> np.ndarray:
    """Linear: (a.b)/s^2.  Polynomial: (1 + (a.b)/s^2)^degree."""
    g = np.atleast_2d(A) @ np.atleast_2d(B).T / params.kernel_scale ** 2
    if params.kernel == "linear":
        return g
    return (1.0 + g) ** params.degree


def smo(K, y, C: float, tol: float = 1e-3, max_iter: int = 100000):
    """Solve the soft-margin SVM dual for a precomputed kernel.

    Minimizes 0.5 a'Qa - sum(a) with Q = yy'K, 0 <= a <= C, y'a = 0.  Each
    step moves the maximal violating pair; stops when the KKT gap
    m(a) - M(a) drops below ``tol``.  Returns ``(alpha, b, n_iter)`` for the
    decision function f(x) = sum_t alpha_t y_t K(x_t, x) + b.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective
    diag = np.diag(K)
    it = 0
    while it < max_iter:
        viol = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(viol[up])])
        j = int(np.flatnonzero(low)[np.argmin(viol[low])])
        gap = viol[i] - viol[j]
        if gap < tol:
            break
        eta = max(diag[i] + diag[j] - 2.0 * K[i, j], 1e-12)
        step = gap / eta
        step = min(step, C - alpha[i] if y[i] > 0 else alpha[i])
        step = min(step, alpha[j] if y[j] > 0 else C - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += step * y * (K[:, i] - K[:, j])
        it += 1

    viol = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(viol[free].mean())
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        hi = viol[up].max() if up.any() else 0.0
        lo = viol[low].min() if low.any() else 0.0
        b = float(0.5 * (hi + lo))
    return alpha, b, it


class _BinarySvm:
    """Signed-margin SVM; y = +1 is the positive (second) class."""

    def __init__(self, sv, coef, b):
        self.sv, self.coef, self.b = sv, coef, b

    @classmethod
    def fit(cls, X, y, params: SvmParams):
        K = kernel_matrix(X, X, params)
        alpha, b, _ = smo(K, y, params.C, params.tol, params.max_passes * len(y))
        keep = alpha > 0
        return cls(X[keep].copy(), (alpha * y)[keep], b)

    def decision(self, X, params):
        if len(self.coef) == 0:
            return np.full(len(X), self.b)
        return kernel_matrix(X, self.sv, params) @ self.coef + self.b

    def to_dict(self):
        return {"sv": self.sv.tolist(), "coef": self.coef.tolist(), "b": self.b}

    @classmethod
    def from_dict(cls, d):
        sv = np.asarray(d["sv"], dtype=np.float64)
        return cls(sv, np.asarray(d["coef"], dtype=np.float64), float(d["b"]))


# --------------------------------------------------------------------------
# logistic regression


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_objective(theta, X, y, l2: float = 1e-3):
    """Mean cross-entropy + (l2/2)|w|^2 and its gradient.

    ``theta = [w..., b]``; ``y`` holds 0/1 targets.
    """
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    # log(1 + e^z) - y z, computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w)
    r = (_sigmoid(z) - y) / len(y)
    grad = np.concatenate([X.T @ r + l2 * w, [r.sum()]])
    return loss, grad


class _BinaryLogistic:
    def __init__(self, theta):
        self.theta = theta

    @classmethod
    def fit(cls, X, y01, l2=1e-3, max_iter=5000, grad_tol=1e-6):
        theta = np.zeros(X.shape[1] + 1)
        loss, grad = logistic_objective(theta, X, y01, l2)
        step = 1.0
        for _ in range(max_iter):
            gnorm2 = grad @ grad
            if np.sqrt(gnorm2) < grad_tol:
                break
            # Armijo backtracking from a step that grows after easy accepts
            step = min(step * 2.0, 1e3)
            while True:
                cand = theta - step * grad
                new_loss, new_grad = logistic_objective(cand, X, y01, l2)
                if new_loss <= loss - 0.5 * step * gnorm2 or step < 1e-12:
                    break
                step *= 0.5
            theta, loss, grad = cand, new_loss, new_grad
        return cls(theta)

    def prob(self, X):
        return _sigmoid(X @ self.theta[:-1] + self.theta[-1])

    def to_dict(self):
        return {"theta": self.theta.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["theta"], dtype=np.float64))


# --------------------------------------------------------------------------
# discriminant analysis and kNN


def _softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _fit_lda(X, yi, k, reg):
    d = X.shape[1]
    means = np.array([X[yi == c].mean(axis=0) for c in range(k)])
    centered = X - means[yi]
    cov = centered.T @ centered / max(len(X) - k, 1) + reg * np.eye(d)
    priors = np.bincount(yi, minlength=k) / len(yi)
    prec = np.linalg.inv(cov)
    return {"means": means, "prec": prec, "log_priors": np.log(priors)}


def _lda_logits(p, X):
    W = p["means"] @ p["prec"]  # k x d
    const = -0.5 * np.sum(W * p["means"], axis=1) + p["log_priors"]
    return X @ W.T + const


def _fit_qda(X, yi, k, reg, classes):
    d = X.shape[1]
    means, precs, logdets = [], [], []
    for c in range(k):
        Xc = X[yi == c]
        if len(Xc) < d + 1:
            raise SingularCovariance(
                f"class {classes[c]!r} has {len(Xc)} samples; QDA needs at least {d + 1}"
            )
        mu = Xc.mean(axis=0)
        cov = (Xc - mu).T @ (Xc - mu) / (len(Xc) - 1) + reg * np.eye(d)
        try:
            L = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise SingularCovariance(f"covariance of class {classes[c]!r} is not positive definite") from None
        means.append(mu)
        precs.append(np.linalg.inv(cov))
        logdets.append(2.0 * np.sum(np.log(np.diag(L))))
    priors = np.bincount(yi, minlength=k) / len(yi)
    return {
        "means": np.array(means),
        "precs": np.array(precs),
        "logdets": np.array(logdets),
        "log_priors": np.log(priors),
    }


def _qda_logits(p, X):
    out = np.empty((len(X), len(p["means"])))
    for c, (mu, prec, ld) in enumerate(zip(p["means"], p["precs"], p["logdets"])):
        D = X - mu
        out[:, c] = -0.5 * np.einsum("ij,jk,ik->i", D, prec, D) - 0.5 * ld + p["log_priors"][c]
    return out


def _knn_scores(p, X, k_classes):
    Xt, yt, k = p["X"], p["y"], int(p["k"])
    d2 = np.sum(X ** 2, axis=1)[:, None] - 2.0 * X @ Xt.T + np.sum(Xt ** 2, axis=1)[None, :]
    dist = np.sqrt(np.maximum(d2, 0.0))
    k = min(k, len(yt))
    # stable sort keeps training order among equal distances
    nn = np.argsort(dist, axis=1, kind="stable")[:, :k]
    nd = np.take_along_axis(dist, nn, axis=1)
    with np.errstate(divide="ignore"):
        w = np.minimum(1.0 / nd, _KNN_WEIGHT_CAP)
    scores = np.zeros((len(X), k_classes))
    for col in range(k):
        np.add.at(scores, (np.arange(len(X)), yt[nn[:, col]]), w[:, col])
    return scores / scores.sum(axis=1, keepdims=True)


# --------------------------------------------------------------------------
# model container


@dataclass
class TrainedModel:
    kind: str
    classes: tuple
    standardizer: Standardizer
    params: dict
    hyper: dict = field(default_factory=dict)
    columns: tuple = ()
    n_features: int = 0
    meta: dict = field(default_factory=dict)

    def svm_params(self) -> SvmParams:
        return SvmParams(**self.hyper["svm"])

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kind": self.kind,
            "classes": list(self.classes),
            "columns": list(self.columns),
            "n_features": self.n_features,
            "standardizer": self.standardizer.to_dict(),
            "hyper": self.hyper,
            "params": _encode(self.params),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d) -> "TrainedModel":
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise UnreadableModel(f"not a {MODEL_FORMAT} v{MODEL_VERSION} document")
        if d["kind"] not in KINDS:
            raise UnreadableModel(f"unknown model kind {d['kind']!r}")
        return cls(
            kind=d["kind"],
            classes=tuple(d["classes"]),
            standardizer=Standardizer.from_dict(d["standardizer"]),
            params=_decode(d["params"]),
            hyper=d["hyper"],
            columns=tuple(d["columns"]),
            n_features=int(d["n_features"]),
            meta=d.get("meta", {}),
        )


def _encode(obj):
    if isinstance(obj, np.ndarray):
        return {"__array__": obj.tolist(), "dtype": str(obj.dtype)}
    if isinstance(obj, (_BinarySvm, _BinaryLogistic)):
        return {"__" + type(obj).__name__.lstrip("_") + "__": obj.to_dict()}
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if "__array__" in obj:
            return np.asarray(obj["__array__"], dtype=obj["dtype"])
        if "__BinarySvm__" in obj:
            return _BinarySvm.from_dict(obj["__BinarySvm__"])
        if "__BinaryLogistic__" in obj:
            return _BinaryLogistic.from_dict(obj["__BinaryLogistic__"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


_DEFAULT_HYPER = {
    "knn": {"k": 10},
    "lda": {"reg": 1e-6},
    "qda": {"reg": 1e-6},
    "logistic": {"l2": 1e-3, "max_iter": 5000, "grad_tol": 1e-6},
}


def train(kind: str, X, labels, params: dict | None = None, columns=None, meta=None) -> TrainedModel:
    """Fit a model of ``kind`` (one of :data:`KINDS`).

    ``params`` overrides hyperparameters; for SVMs the keys are the fields
    of :class:`SvmParams` (``svm-linear``/``svm-quad`` pick the kernel).
    ``columns`` restricts the model to a subset of input columns.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {KINDS}")
    X = np.asarray(X, dtype=np.float64)
    labels = [str(l) for l in labels]
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise DimensionMismatch(f"{X.shape[0]} rows but {len(labels)} labels")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise SingleClass(f"training data holds a single class {classes}")
    n_features = X.shape[1]
    columns = tuple(range(n_features)) if columns is None else tuple(int(c) for c in columns)
    std = fit_standardizer(X[:, columns])
    Z = std.transform(X[:, columns])
    yi = np.array([classes.index(l) for l in labels])
    k = len(classes)
    params = dict(params or {})

    if kind.startswith("svm"):
        svm = SvmParams(**{"kernel": "linear" if kind == "svm-linear" else "poly", **params})
        hyper = {"svm": asdict(svm)}
        fitted = {"machines": _fit_svm_machines(Z, yi, k, svm)}
    elif kind == "logistic":
        hyper = {**_DEFAULT_HYPER["logistic"], **params}
        machines = []
        for a, b in itertools.combinations(range(k), 2):
            rows = (yi == a) | (yi == b)
            machines.append(_BinaryLogistic.fit(Z[rows], (yi[rows] == b).astype(float), **hyper))
        fitted = {"machines": machines}
    elif kind == "lda":
        hyper = {**_DEFAULT_HYPER["lda"], **params}
        fitted = _fit_lda(Z, yi, k, hyper["reg"])
    elif kind == "qda":
        hyper = {**_DEFAULT_HYPER["qda"], **params}
        fitted = _fit_qda(Z, yi, k, hyper["reg"], classes)
    else:
        hyper = {**_DEFAULT_HYPER["knn"], **params}
        fitted = {"X": Z, "y": yi, "k": int(hyper["k"])}

    return TrainedModel(kind, classes, std, fitted, hyper, columns, n_features, dict(meta or {}))


def _fit_svm_machines(Z, yi, k, svm: SvmParams):
    if k == 2:
        return [_BinarySvm.fit(Z, np.where(yi == 1, 1.0, -1.0), svm)]
    if svm.strategy == "ovr":
        return [_BinarySvm.fit(Z, np.where(yi == c, 1.0, -1.0), svm) for c in range(k)]
    machines = []
    for a, b in itertools.combinations(range(k), 2):
        rows = (yi == a) | (yi == b)
        machines.append(_BinarySvm.fit(Z[rows], np.where(yi[rows] == b, 1.0, -1.0), svm))
    return machines


def _prepare(model: TrainedModel, X):
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got {X.shape[1]}")
    return model.standardizer.transform(X[:, list(model.columns)]), single


def predict_scores(model: TrainedModel, X) -> np.ndarray:
    """Per-class scores, columns ordered as ``model.classes``."""
    Z, single = _prepare(model, X)
    k = len(model.classes)
    p = model.params
    if model.kind.startswith("svm"):
        out = _svm_scores(p["machines"], Z, k, model.svm_params())
    elif model.kind == "logistic":
        out = np.zeros((len(Z), k))
        for (a, b), m in zip(itertools.combinations(range(k), 2), p["machines"]):
            pb = m.prob(Z)
            out[:, b] += pb
            out[:, a] += 1.0 - pb
        out /= k * (k - 1) / 2
    elif model.kind == "lda":
        out = _softmax(_lda_logits(p, Z))
    elif model.kind == "qda":
        out = _softmax(_qda_logits(p, Z))
    else:
        out = _knn_scores(p, Z, k)
    return out[0] if single else out


def _svm_scores(machines, Z, k, svm: SvmParams):
    if k == 2:
        f = machines[0].decision(Z, svm)
        return np.column_stack([-f, f])
    if svm.strategy == "ovr":
        return np.column_stack([m.decision(Z, svm) for m in machines])
    votes = np.zeros((len(Z), k))
    margin = np.zeros((len(Z), k))
    for (a, b), m in zip(itertools.combinations(range(k), 2), machines):
        f = m.decision(Z, svm)
        votes[:, b] += f > 0
        votes[:, a] += f <= 0
        margin[:, b] += f
        margin[:, a] -= f
    return votes + 0.5 * np.tanh(margin / (k - 1))


def predict(model: TrainedModel, X):
    """Predicted class for one vector, or a list for a matrix."""
    s = predict_scores(model, X)
    if s.ndim == 1:
        return model.classes[int(np.argmax(s))]
    return [model.classes[i] for i in np.argmax(s, axis=1)]


def save_model(model: TrainedModel, path) -> None:
    text = json.dumps(model.to_dict(), sort_keys=True, indent=1)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def load_model(path) -> TrainedModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
        return TrainedModel.from_dict(doc)
    except UnreadableModel:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UnreadableModel(f"{path}: {exc}") from None
