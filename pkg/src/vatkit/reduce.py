"""Dimensionality reduction: exact t-SNE, Gaussian random projection and
normalized-Laplacian spectral embedding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data_io import EmbeddingSet
from .dissimilarity import DissimilarityMatrix
from .errors import TsneError, VatkitError
from .rng import SplitMix64


def _matrix(X) -> np.ndarray:
    return X.data if isinstance(X, EmbeddingSet) else np.asarray(X, dtype=np.float64)


def _with_labels(X, data: np.ndarray) -> EmbeddingSet:
    labels = X.labels if isinstance(X, EmbeddingSet) else None
    return EmbeddingSet(data, labels)


# --------------------------------------------------------------------------
# t-SNE
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    output_dims: int = 2
    iterations: int = 1000
    learning_rate: float = 200.0
    initial_momentum: float = 0.5
    final_momentum: float = 0.8
    momentum_switch_iter: int = 250
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0

    def validate(self, n: int) -> None:
        if n < 4:
            raise TsneError(f"t-SNE needs at least 4 objects, got {n}")
        if not self.perplexity > 0 or not self.perplexity < (n - 1) / 3:
            raise TsneError(f"perplexity {self.perplexity} infeasible for {n} objects "
                            f"(needs 0 < perplexity < {(n - 1) / 3:.3f})")
        if self.iterations < 1:
            raise TsneError("iterations must be >= 1")
        if self.output_dims < 1:
            raise TsneError("output_dims must be >= 1")
        if not self.learning_rate > 0:
            raise TsneError("learning_rate must be positive")


@dataclass(frozen=True)
class TsneResult:
    embedding: np.ndarray
    P: np.ndarray
    perplexities: np.ndarray
    kl_initial: float
    kl_final: float


def conditional_probabilities(dist2: np.ndarray, perplexity: float, tol: float = 1e-3,
                              max_steps: int = 64):
    """Row-wise Gaussian conditionals p_{j|i} matched to ``perplexity``.

    Bisects log-precision per row (all rows at once) within +-60 nats of
    ``1 / mean distance``; stops after ``max_steps`` halvings or once every
    row's perplexity is within ``tol``. Returns ``(P_cond, perplexities)``.
    """
    n = dist2.shape[0]
    off = ~np.eye(n, dtype=bool)
    d = np.where(off, dist2, np.inf)
    d = d - d.min(axis=1, keepdims=True)
    d[~off] = 0.0
    mean = np.sum(d, axis=1) / max(n - 1, 1)
    centre = -np.log(np.where(mean > 0, mean, 1.0))
    lo = centre - 60.0
    hi = centre + 60.0
    target = np.log(perplexity)

    def evaluate(log_beta):
        beta = np.exp(log_beta)[:, None]
        p = np.exp(-beta * d)
        p[~off] = 0.0
        s = p.sum(axis=1)
        h = np.log(s) + beta[:, 0] * np.sum(d * p, axis=1) / s
        return p / s[:, None], h

    log_beta = 0.5 * (lo + hi)
    p, h = evaluate(log_beta)
    for _ in range(max_steps):
        if np.all(np.abs(np.exp(h) - perplexity) <= tol):
            break
        too_flat = h > target  # entropy too high -> sharpen
        lo = np.where(too_flat, log_beta, lo)
        hi = np.where(too_flat, hi, log_beta)
        log_beta = 0.5 * (lo + hi)
        p, h = evaluate(log_beta)
    return p, np.exp(h)


def joint_probabilities(X, perplexity: float):
    """Symmetrized P with p_ij = (p_{j|i} + p_{i|j}) / 2N, plus row perplexities."""
    Xm = _matrix(X)
    dist2 = squareform(pdist(Xm, "sqeuclidean"), checks=False)
    cond, perp = conditional_probabilities(dist2, perplexity)
    n = Xm.shape[0]
    return (cond + cond.T) / (2.0 * n), perp


def _student_t(Y: np.ndarray):
    sq = np.sum(Y * Y, axis=1)
    num = -2.0 * (Y @ Y.T)
    num += sq[:, None]
    num += sq[None, :]
    np.maximum(num, 0.0, out=num)
    num += 1.0
    np.reciprocal(num, out=num)
    np.fill_diagonal(num, 0.0)
    return num, num / num.sum()


def kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    _, Q = _student_t(Y)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def kl_gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """dKL/dY_i = 4 sum_j (p_ij - q_ij)(y_i - y_j) / (1 + |y_i - y_j|^2)."""
    num, Q = _student_t(Y)
    W = (P - Q) * num
    return 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)


def run_tsne(X, config: TsneConfig = TsneConfig()) -> TsneResult:
    Xm = _matrix(X)
    n = Xm.shape[0]
    config.validate(n)
    P, perp = joint_probabilities(Xm, config.perplexity)

    Y = 1e-4 * SplitMix64(config.seed).normal(n * config.output_dims).reshape(n, config.output_dims)
    kl_initial = kl_divergence(P, Y)
    with np.errstate(over="ignore", invalid="ignore"):
        Y = _descend(P, Y, config)
    return TsneResult(Y, P, perp, kl_initial, kl_divergence(P, Y))


def _descend(P: np.ndarray, Y: np.ndarray, config: TsneConfig) -> np.ndarray:
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    for it in range(config.iterations):
        exaggerate = it < config.exaggeration_iters
        momentum = config.initial_momentum if it < config.momentum_switch_iter else config.final_momentum
        grad = kl_gradient(P * config.early_exaggeration if exaggerate else P, Y)
        # delta-bar-delta gains as in the reference implementation
        same_sign = np.sign(grad) == np.sign(update)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - config.learning_rate * gains * grad
        Y = Y + update
        Y -= Y.mean(axis=0)
        if not np.all(np.isfinite(Y)):
            raise TsneError(f"non-finite embedding at iteration {it}", iteration=it)
    return Y


def tsne(X, config: TsneConfig = TsneConfig()) -> EmbeddingSet:
    return _with_labels(X, run_tsne(X, config).embedding)


# --------------------------------------------------------------------------
# Random projection
# --------------------------------------------------------------------------

def random_project(X, target_dim: int, seed: int) -> EmbeddingSet:
    """``X @ R / sqrt(target_dim)`` with R ~ N(0, 1) from a seeded stream (row-major)."""
    Xm = _matrix(X)
    p = Xm.shape[1]
    if not 1 <= target_dim <= p:
        raise VatkitError(f"target_dim must be in [1, {p}], got {target_dim}")
    R = SplitMix64(seed).normal(p * target_dim).reshape(p, target_dim)
    return _with_labels(X, Xm @ R / np.sqrt(target_dim))


# --------------------------------------------------------------------------
# Spectral embedding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralConfig:
    r: int = 2
    affinity_gamma: Optional[float] = None  # None -> 1 / (2 * median(d)^2)


def median_gamma(D: np.ndarray) -> float:
    n = D.shape[0]
    off = D[~np.eye(n, dtype=bool)]
    med = float(np.median(off)) if off.size else 0.0
    if med <= 0:
        raise VatkitError("median dissimilarity is zero; pass an explicit affinity gamma")
    return 1.0 / (2.0 * med * med)


def normalized_laplacian(D, gamma: Optional[float] = None) -> np.ndarray:
    d = D.values if isinstance(D, DissimilarityMatrix) else np.asarray(D, dtype=np.float64)
    if gamma is None:
        gamma = median_gamma(d)
    if not gamma > 0:
        raise VatkitError(f"affinity gamma must be positive, got {gamma}")
    W = np.exp(-gamma * d * d)
    np.fill_diagonal(W, 0.0)
    deg = W.sum(axis=1)
    isolated = np.flatnonzero(deg <= 0)
    if isolated.size:
        raise VatkitError(f"vertex {isolated[0]} has zero degree")
    s = 1.0 / np.sqrt(deg)
    L = -(s[:, None] * W * s[None, :])
    L[np.diag_indices_from(L)] += 1.0
    return (L + L.T) / 2.0


def spectral_decomposition(D, config: SpectralConfig):
    """``(L, eigenvalues, eigenvectors)`` for the ``r`` smallest eigenvalues."""
    n = D.n if isinstance(D, DissimilarityMatrix) else np.asarray(D).shape[0]
    if not 1 <= config.r <= n:
        raise VatkitError(f"r must be in [1, {n}], got {config.r}")
    L = normalized_laplacian(D, config.affinity_gamma)
    vals, vecs = np.linalg.eigh(L)
    vals = vals[: config.r]
    vecs = vecs[:, : config.r].copy()
    for k in range(config.r):
        nz = np.flatnonzero(np.abs(vecs[:, k]) > 1e-12)
        if nz.size and vecs[nz[0], k] < 0:
            vecs[:, k] = -vecs[:, k]
    return L, vals, vecs


def spectral_embed(D, config: SpectralConfig) -> EmbeddingSet:
    _, _, vecs = spectral_decomposition(D, config)
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return EmbeddingSet(np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0))
