"""
Classifiers and cross-validation
================================

Six model kinds share one interface: weighted kNN, LDA, QDA, logistic
regression and SVMs with linear or quadratic kernels.  Each is scored
by 5-fold cross-validation with per-fold standardization.
"""

import numpy as np

from bispeech import classify, evaluation

rng = np.random.default_rng(3)

# two overlapping Gaussian clouds in 14 dimensions
n = 80
X = np.vstack([rng.standard_normal((n, 14)), rng.standard_normal((n, 14)) + 0.6])
y = ["Human"] * n + ["Synthetic"] * n

for kind in classify.KINDS:
    params = {"kernel_scale": 2.0} if kind.startswith("svm") else None
    s = evaluation.cross_validate(kind, X, y, k=5, seed=0, params=params)
    print(f"{kind:10s}  accuracy {s.mean_accuracy:.3f}  AUC {s.auc:.3f}")

# XOR needs the quadratic kernel
Xx = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
yx = ["A", "A", "B", "B"]
for kind in ("svm-linear", "svm-quad"):
    m = classify.train(kind, Xx, yx, {"kernel_scale": 1.0, "C": 100.0})
    print(kind, "on XOR:", classify.predict(m, Xx))

# one-vs-one over three classes: scores are votes plus a bounded margin term
X3 = np.vstack([rng.standard_normal((30, 2)) + c for c in ([0, 0], [4, 0], [0, 4])])
y3 = ["Human"] * 30 + ["SpikAI"] * 30 + ["Replica"] * 30
m = classify.train("svm-quad", X3, y3, {"kernel_scale": 2.0})
print("binary machines:", len(m.params["machines"]))
print("scores for (4, 0):", dict(zip(m.classes, np.round(classify.predict_scores(m, [4.0, 0.0]), 3))))

s = evaluation.cross_validate("svm-quad", X3, y3, params={"kernel_scale": 2.0})
print(s.report_text())
