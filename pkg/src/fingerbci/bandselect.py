"""Score frequency subbands with cross-validated LDA and pick the best ones.

Each band gets a score: mean held-out accuracy of a Fisher discriminant on
CSP log-variance features, with the CSP refit inside every training fold
(no leakage).  Bands scoring at least ``max(score) - std(score)`` are kept;
the argmax band always clears its own threshold, so the selection is never
empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crossval import stratified_folds
from .csp import CspModel, extract_features_batch, fit_csp_from_covariances, trial_covariance
from .dsp import BandDecomposition
from .rng import stream
from .trialstore import Trial

DEFAULT_SHRINKAGE = 1e-3


@dataclass
class LdaModel:
    """Fisher discriminant: label 1 iff ``weights . x + bias > 0``."""

    weights: np.ndarray
    bias: float


@dataclass
class BandScore:
    band: tuple[float, float]
    score: float


@dataclass
class SelectionResult:
    scores: list[BandScore]
    threshold: float
    selected: list[int]


def lda_fit(features: np.ndarray, labels: np.ndarray, shrinkage: float = DEFAULT_SHRINKAGE) -> LdaModel:
    """Fit a two-class Fisher discriminant.

    ``w = (S_pooled + shrinkage * mean(diag) * I)^-1 (mu_1 - mu_0)`` with the
    bias placing the decision point at the midpoint of the projected means.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    mask1 = labels == 1
    x0, x1 = features[~mask1], features[mask1]
    if len(x0) == 0 or len(x1) == 0:
        raise ValueError("both classes must be present")
    mu0, mu1 = x0.mean(axis=0), x1.mean(axis=0)
    centered = np.concatenate([x0 - mu0, x1 - mu1])
    denominator = max(len(features) - 2, 1)
    pooled = centered.T @ centered / denominator
    if shrinkage > 0:
        pooled = pooled + shrinkage * np.mean(np.diag(pooled)) * np.eye(pooled.shape[0])
    try:
        weights = np.linalg.solve(pooled, mu1 - mu0)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"pooled covariance is singular after shrinkage: {exc}") from exc
    if not np.isfinite(weights).all():
        raise ValueError("non-finite discriminant weights")
    bias = -float(weights @ ((mu0 + mu1) / 2.0))
    return LdaModel(weights=weights, bias=bias)


def lda_predict(model: LdaModel, features: np.ndarray) -> np.ndarray:
    """Binary labels; a point exactly on the boundary goes to class 0."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape[-1] != len(model.weights):
        raise ValueError(f"feature dimension {features.shape[-1]} != model dimension {len(model.weights)}")
    return (features @ model.weights + model.bias > 0.0).astype(np.int64)


def _fit_fold_model(
    trials: list[Trial],
    labels: np.ndarray,
    covariances: np.ndarray,
    train_mask: np.ndarray,
    n_pairs: int,
    shrinkage: float,
    band: tuple[float, float],
) -> tuple[CspModel, LdaModel]:
    # Fits see training-fold trials only; held-out data cannot leak in.
    cov_a = covariances[train_mask & (labels == 0)].mean(axis=0)
    cov_b = covariances[train_mask & (labels == 1)].mean(axis=0)
    csp = fit_csp_from_covariances(cov_a, cov_b, n_pairs, band)
    train_trials = [t for t, keep in zip(trials, train_mask) if keep]
    lda = lda_fit(extract_features_batch(train_trials, csp), labels[train_mask], shrinkage)
    return csp, lda


def _cv_band_score(
    trials: list[Trial],
    labels: np.ndarray,
    band: tuple[float, float],
    n_pairs: int,
    folds: int,
    rng: np.random.Generator,
    shrinkage: float,
    covariances: np.ndarray | None = None,
) -> float:
    if covariances is None:
        covariances = np.stack([trial_covariance(t) for t in trials])
    fold_ids = stratified_folds(labels, folds, rng)
    accuracies = []
    for k in range(folds):
        test_mask = fold_ids == k
        csp, lda = _fit_fold_model(trials, labels, covariances, ~test_mask, n_pairs, shrinkage, band)
        test_trials = [t for t, held in zip(trials, test_mask) if held]
        predictions = lda_predict(lda, extract_features_batch(test_trials, csp))
        accuracies.append(float(np.mean(predictions == labels[test_mask])))
    return float(np.mean(accuracies))


def _score_band_lists(
    band_trials: list[list[Trial]],
    bands: list[tuple[float, float]],
    labels: np.ndarray,
    n_pairs: int,
    folds: int,
    seed: int,
    shrinkage: float,
    band_covariances: list[np.ndarray] | None = None,
) -> list[BandScore]:
    labels = np.asarray(labels)
    if set(np.unique(labels)) != {0, 1}:
        raise ValueError("labels must be binary (0/1) with both classes present")
    scores = []
    for i, band in enumerate(bands):
        covs = band_covariances[i] if band_covariances is not None else None
        score = _cv_band_score(band_trials[i], labels, band, n_pairs, folds, stream(seed, i), shrinkage, covs)
        scores.append(BandScore(band=band, score=score))
    return scores


def score_bands_for_labels(
    decomp: BandDecomposition,
    labels: np.ndarray,
    n_pairs: int = 2,
    folds: int = 5,
    seed: int = 0,
    shrinkage: float = DEFAULT_SHRINKAGE,
    band_covariances: list[np.ndarray] | None = None,
) -> list[BandScore]:
    """Per-band CV accuracy for an arbitrary binary labeling of the trials.

    ``band_covariances`` may carry precomputed per-trial covariance stacks
    (one (n_trials, N, N) array per band) to avoid recomputation when many
    labelings are scored on one decomposition.
    """
    return _score_band_lists(
        decomp.band_trials(), decomp.bands, labels, n_pairs, folds, seed, shrinkage, band_covariances
    )


def score_bands(
    decomp: BandDecomposition,
    class_a: int,
    class_b: int,
    n_pairs: int = 2,
    folds: int = 5,
    seed: int = 0,
    shrinkage: float = DEFAULT_SHRINKAGE,
) -> list[BandScore]:
    """Score every band for the binary problem ``class_a`` vs ``class_b``."""
    all_labels = decomp.labels()
    keep = [i for i, y in enumerate(all_labels) if y in (class_a, class_b)]
    if not any(all_labels[i] == class_a for i in keep) or not any(all_labels[i] == class_b for i in keep):
        raise ValueError(f"classes {class_a} and {class_b} must both be present")
    labels = np.array([1 if all_labels[i] == class_b else 0 for i in keep])
    band_trials = [[ds.trials[i] for i in keep] for ds in decomp.datasets]
    return _score_band_lists(band_trials, decomp.bands, labels, n_pairs, folds, seed, shrinkage)


def select_bands(scores: list[BandScore]) -> SelectionResult:
    """Keep bands scoring at least ``max - sample_std`` (never empty)."""
    if not scores:
        raise ValueError("no band scores to select from")
    values = np.array([s.score for s in scores], dtype=np.float64)
    spread = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    threshold = float(values.max() - spread)
    selected = [i for i, v in enumerate(values) if v >= threshold]
    return SelectionResult(scores=list(scores), threshold=threshold, selected=selected)
