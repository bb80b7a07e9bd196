"""
Command-line front end.

    bispeech synth    --out DIR [--n 30] [--seed 0]
    bispeech extract  --manifest CSV --out FEATURES.csv
    bispeech train    FEATURES.csv --model MODEL.json [--out REPORT.csv]
    bispeech evaluate FEATURES.csv --model MODEL.json [--out REPORT.csv]
    bispeech predict  INPUT --model MODEL.json
    bispeech plot     WAV --kind {bicoherence,melspec} --out IMAGE

Exit codes: 0 success, 1 domain error (including partial extraction
failure), 2 unreadable input, I/O failure or bad usage.

``BISPEECH_THREADS`` caps the number of worker threads used by ``extract``
(default: CPU count).  Output rows always follow manifest order.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import audio_io, bispectrum, cepstral, classify, dataset, evaluation, features, synthgen, viz
from .errors import BispeechError, FormatError, IoFailure

FEATURE_SETS = {"bico": features.BICO_COLUMNS, "full": tuple(range(len(features.FEATURE_NAMES)))}
SCENARIOS = ("binary", "multiclass")
THREADS_ENV = "BISPEECH_THREADS"


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _add_extraction_flags(p):
    p.add_argument("--segments", type=_positive_int, default=100, help="target segment count K")
    p.add_argument("--fft-size", type=_positive_int, default=64, help="segment FFT size (power of two)")
    p.add_argument("--max-seconds", type=_positive_float, default=audio_io.DEFAULT_MAX_SECONDS,
                   help="head-trim cap applied to every clip")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bispeech", description="Bispectral synthetic-speech detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic two-class corpus and its manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=_positive_int, default=30, help="clips per class")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("extract", help="compute the feature CSV for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="feature CSV to write")
    p.add_argument("--estimator", choices=("normalized", "classic"), default="normalized")
    _add_extraction_flags(p)

    p = sub.add_parser("train", help="cross-validate and fit a model on a feature CSV")
    p.add_argument("features_csv")
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--out", help="CSV file for the cross-validation report")
    p.add_argument("--kind", choices=classify.KINDS, default="svm-quad")
    p.add_argument("--scenario", choices=SCENARIOS, default="binary")
    p.add_argument("--features", choices=tuple(FEATURE_SETS), default="full")
    p.add_argument("--kernel-scale", type=_positive_float, default=1.0)
    p.add_argument("--box", type=_positive_float, default=1.0, help="SVM box constraint C")
    p.add_argument("--neighbors", type=_positive_int, default=10, help="k for weighted kNN")
    p.add_argument("--folds", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=None,
                   help="hold out a stratified test split and report accuracy on it")
    _add_extraction_flags(p)

    p = sub.add_parser("evaluate", help="score a trained model on a labelled feature CSV")
    p.add_argument("features_csv")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="CSV file for the evaluation report")

    p = sub.add_parser("predict", help="classify a WAV file, a feature CSV or an inline feature row")
    p.add_argument("input", help="WAV path, feature CSV path, or 14 comma-separated numbers")
    p.add_argument("--model", required=True)

    p = sub.add_parser("plot", help="render a bicoherence grid or mel spectrogram")
    p.add_argument("wav")
    p.add_argument("--kind", choices=("bicoherence", "melspec"), default="bicoherence")
    p.add_argument("--out", required=True, help="image path (.ppm or .png)")
    p.add_argument("--scale", type=_positive_int, default=1)
    p.add_argument("--colormap", choices=tuple(viz.COLORMAPS), default="viridis")
    _add_extraction_flags(p)
    return parser


def _bisp_config(args) -> bispectrum.BispectralConfig:
    try:
        return bispectrum.BispectralConfig(args.segments, args.fft_size)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


class _UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise _UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    manifest = synthgen.make_corpus(args.out, args.n, args.seed)
    hist = manifest.histogram()
    print(f"wrote {len(manifest)} clips to {args.out} "
          + " ".join(f"{k}={hist[k]}" for k in sorted(hist)))
    print(f"manifest: {Path(args.out) / 'manifest.csv'}")
    return 0


def _extract_one(entry, bisp, max_seconds, estimator):
    path, label = entry
    try:
        clip = audio_io.prepare(path, max_seconds)
        return features.extract_features(clip, bisp, cepstral.CepstralConfig(), label, estimator), None
    except BispeechError as exc:
        return None, exc


def cmd_extract(args) -> int:
    bisp = _bisp_config(args)
    manifest = dataset.load_manifest(args.manifest)
    work = list(manifest.entries)
    n_threads = min(_threads(), len(work))
    run = lambda e: _extract_one(e, bisp, args.max_seconds, args.estimator)  # noqa: E731
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(run, work))
    else:
        results = [run(e) for e in work]

    rows, failures = [], 0
    for (path, _), (fv, err) in zip(work, results):
        if err is None:
            rows.append(fv)
        else:
            failures += 1
            print(f"error: {path}: {type(err).__name__}: {err}", file=sys.stderr)
    try:
        features.write_feature_csv(rows, args.out)
    except OSError as exc:
        raise IoFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None
    print(f"extracted {len(rows)} of {len(work)} clips -> {args.out}")
    if failures:
        print(f"{failures} clip(s) failed", file=sys.stderr)
        return 1
    return 0


def _scenario_labels(labels, scenario):
    return dataset.to_binary(labels) if scenario == "binary" else list(labels)


def _positive_class(classes, scenario):
    if scenario == "binary" and features.BINARY_LABELS[1] in classes:
        return features.BINARY_LABELS[1]
    return None


def _write_text(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_train(args) -> int:
    bisp = _bisp_config(args)
    X, labels = features.read_feature_csv(args.features_csv)
    labels = _scenario_labels(labels, args.scenario)
    columns = FEATURE_SETS[args.features]
    if args.kind.startswith("svm"):
        params = {"kernel_scale": args.kernel_scale, "C": args.box}
    elif args.kind == "knn":
        params = {"k": args.neighbors}
    else:
        params = {}

    train_idx = list(range(len(labels)))
    test_idx = []
    if args.test_fraction is not None:
        if not 0.0 < args.test_fraction < 1.0:
            raise _UsageError("--test-fraction must lie in (0, 1)")
        plan = dataset.split_labels(labels, args.test_fraction, args.seed)
        train_idx, test_idx = list(plan.train_indices), list(plan.test_indices)

    X_tr = X[train_idx]
    y_tr = [labels[i] for i in train_idx]
    classes = tuple(sorted(set(y_tr)))
    if len(classes) < 2:
        raise classify.SingleClass(f"training data holds a single class {classes}")
    pos = _positive_class(classes, args.scenario)
    cv = evaluation.cross_validate(args.kind, X_tr, y_tr, args.folds, args.seed, params, columns, pos)

    meta = {
        "scenario": args.scenario,
        "features": args.features,
        "seed": args.seed,
        "folds": args.folds,
        "n_train": len(train_idx),
        "extraction": {
            "segments": bisp.target_segments,
            "fft_size": bisp.segment_fft_size,
            "window": bisp.window,
            "max_seconds": args.max_seconds,
        },
        "cv": {"mean_accuracy": cv.mean_accuracy, "auc": cv.auc},
    }
    model = classify.train(args.kind, X_tr, y_tr, params, columns, meta)

    print(f"kind: {args.kind}  scenario: {args.scenario}  features: {args.features} "
          f"({len(columns)} columns)  folds: {args.folds}  seed: {args.seed}")
    print(cv.report_text())
    report = cv.report_csv()
    if test_idx:
        y_te = [labels[i] for i in test_idx]
        pred = classify.predict(model, X[test_idx])
        acc = evaluation.accuracy(y_te, pred)
        print(f"held-out test: n={len(test_idx)} accuracy={acc:.4f}")
        report += f"test,{len(test_idx)},{acc!r},\n"
    try:
        classify.save_model(model, args.model)
    except OSError as exc:
        raise IoFailure(f"cannot write {args.model}: {exc.strerror or exc}") from None
    if args.out:
        _write_text(args.out, report)
    print(f"model written to {args.model}")
    return 0


def cmd_evaluate(args) -> int:
    model = classify.load_model(args.model)
    X, labels = features.read_feature_csv(args.features_csv)
    scenario = model.meta.get("scenario", "binary")
    labels = _scenario_labels(labels, scenario)
    unknown = sorted(set(labels) - set(model.classes))
    if unknown:
        raise evaluation.UnknownClass(f"labels {unknown} were not seen in training {model.classes}")
    scores = classify.predict_scores(model, X)
    pred = [model.classes[i] for i in np.argmax(scores, axis=1)]
    cm = evaluation.confusion(labels, pred, model.classes)
    auc = float("nan")
    if len(set(labels)) >= 2:
        auc = evaluation.scores_auc(labels, scores, model.classes, _positive_class(model.classes, scenario))
    print(f"kind: {model.kind}  scenario: {scenario}  n={cm.total}")
    print(f"accuracy: {cm.accuracy:.4f}")
    print(f"AUC: {auc:.4f}")
    print(cm.format())
    if args.out:
        _write_text(args.out, f"n,accuracy,auc\n{cm.total},{cm.accuracy!r},{auc!r}\n")
    return 0


def _model_bisp_config(model) -> tuple:
    ex = model.meta.get("extraction", {})
    cfg = bispectrum.BispectralConfig(int(ex.get("segments", 100)), int(ex.get("fft_size", 64)),
                                      ex.get("window", "hann"))
    return cfg, float(ex.get("max_seconds", audio_io.DEFAULT_MAX_SECONDS))


def _inline_row(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(features.FEATURE_NAMES):
        return None
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        return None


def cmd_predict(args) -> int:
    model = classify.load_model(args.model)
    row = _inline_row(args.input)
    if row is not None:
        names, X = ["row"], row[None, :]
    elif Path(args.input).suffix.lower() == ".csv":
        X, _ = features.read_feature_csv(args.input)
        names = [f"row {i + 1}" for i in range(len(X))]
    else:
        bisp, max_seconds = _model_bisp_config(model)
        clip = audio_io.prepare(args.input, max_seconds)
        X = features.extract_features(clip, bisp).as_array()[None, :]
        names = [args.input]
    scores = np.atleast_2d(classify.predict_scores(model, X))
    for name, s in zip(names, scores):
        best = model.classes[int(np.argmax(s))]
        detail = "  ".join(f"{c}={v:.6f}" for c, v in zip(model.classes, s))
        print(f"{name}: {best}  {detail}")
    return 0


def cmd_plot(args) -> int:
    clip = audio_io.prepare(args.wav, args.max_seconds)
    if args.kind == "bicoherence":
        grid = bispectrum.bispectral_grid(clip, _bisp_config(args))
        data, lo, hi = grid.magnitude, 0.0, 1.0
        axes = "k1 (x) by k2 (y)"
    else:
        # time along x, mel band (low at the bottom) along y
        data = cepstral.mel_spectrogram(clip).T
        lo, hi = float(data.min()), float(data.max())
        if not hi > lo:
            hi = lo + 1.0
        axes = "time (x) by mel band (y)"
    w, h = viz.render_heatmap(viz.Heatmap(data, (lo, hi), args.colormap), args.out, args.scale)
    print(f"value range: [{lo:.6g}, {hi:.6g}]")
    print(f"grid: {data.shape[1]} x {data.shape[0]} ({axes}), scale {args.scale}")
    print(f"image: {w} x {h} pixels -> {args.out}")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "extract": cmd_extract,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"bispeech: error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"bispeech: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except evaluation.FoldError as exc:
        cause = exc.cause
        print(f"bispeech: {type(cause).__name__} in fold {exc.fold + 1}: {cause}", file=sys.stderr)
        return 2 if isinstance(cause, FormatError) else 1
    except BispeechError as exc:
        print(f"bispeech: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"bispeech: I/O error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"bispeech: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
