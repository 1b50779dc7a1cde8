"""Dimensionality reduction of embedding sequences before clustering.

PCA is the deterministic default.  A self-contained t-SNE is provided
behind a mandatory seed; it exposes its KL objective and analytic
gradient so the optimizer can be checked against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .embedio import EmbeddingSequence
from .errors import InsufficientDataError, ParameterError

DEFAULT_PCA_DIM = 32


@dataclass(frozen=True)
class ReducedEmbedding:
    """Low-dimensional frame representation handed to the clustering stage."""

    vectors: np.ndarray  # (T, d) float64
    method: str          # "pca" or "tsne"
    explained_variance_ratio: Optional[np.ndarray] = None  # pca only
    kl_trace: Optional[tuple[float, ...]] = None           # tsne only

    def __len__(self) -> int:
        return int(self.vectors.shape[0])


def _l2_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return x / safe


def default_pca_dim(n_samples: int, n_features: int) -> int:
    """Default target dimension: 32, shrunk to fit rank and feature limits."""
    return max(1, min(DEFAULT_PCA_DIM, n_features, n_samples - 1))


def reduce_pca(seq: EmbeddingSequence, d: int, l2_normalize: bool = False) -> ReducedEmbedding:
    """Project onto the top-d principal axes of the mean-centered data.

    Components are computed by SVD of the centered matrix; each axis is
    sign-fixed so its largest-magnitude loading is positive, making the
    result deterministic and prefix-consistent across choices of d.
    """
    x = np.asarray(seq.vectors, dtype=np.float64)
    t, dim = x.shape
    if t < 2:
        raise InsufficientDataError("PCA needs at least 2 samples")
    if not (1 <= d <= min(dim, t)):
        raise ParameterError(f"d must be in [1, {min(dim, t)}], got {d}")
    if l2_normalize:
        x = _l2_rows(x)

    centered = x - x.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:d]
    # sign convention: largest-|loading| entry of each axis is positive
    flip = np.empty(d)
    for i in range(d):
        j = int(np.argmax(np.abs(components[i])))
        flip[i] = -1.0 if components[i, j] < 0 else 1.0
    components = components * flip[:, None]

    projections = centered @ components.T
    eigvals = (singular ** 2) / (t - 1)
    total_var = float(np.sum(centered.var(axis=0, ddof=1)))
    if total_var > 0:
        ratio = eigvals[:d] / total_var
    else:
        ratio = np.zeros(d)
    return ReducedEmbedding(
        vectors=projections,
        method="pca",
        explained_variance_ratio=ratio,
    )


# --- t-SNE -----------------------------------------------------------------


def _pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _conditional_probs(d2: np.ndarray, perplexity: float) -> np.ndarray:
    """Per-point Gaussian conditionals calibrated to the target perplexity."""
    n = d2.shape[0]
    target_entropy = math.log(perplexity)
    p = np.zeros((n, n))
    for i in range(n):
        lo, hi = 0.0, math.inf
        beta = 1.0
        di = np.delete(d2[i], i)
        for _ in range(64):
            w = np.exp(-di * beta)
            total = np.sum(w)
            if total <= 0:
                entropy = 0.0
                probs = np.zeros_like(w)
            else:
                probs = w / total
                nz = probs > 0
                entropy = -np.sum(probs[nz] * np.log(probs[nz]))
            if abs(entropy - target_entropy) < 1e-7:
                break
            if entropy > target_entropy:
                lo = beta
                beta = beta * 2.0 if hi == math.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (lo + beta) / 2.0
        row = np.insert(probs, i, 0.0)
        p[i] = row
    return p


def joint_probabilities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized, normalized neighbor probabilities P for t-SNE."""
    cond = _conditional_probs(_pairwise_sq_dists(x), perplexity)
    n = x.shape[0]
    p = (cond + cond.T) / (2.0 * n)
    return np.maximum(p, 1e-12)


def kl_divergence_and_grad(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """KL(P || Q) under the Student-t kernel, with its analytic gradient."""
    d2 = _pairwise_sq_dists(y)
    num = 1.0 / (1.0 + d2)
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / np.sum(num), 1e-12)
    mask = ~np.eye(p.shape[0], dtype=bool)
    kl = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    pq = (p - q) * num
    grad = 4.0 * ((np.diag(pq.sum(axis=1)) - pq) @ y)
    return kl, grad


def reduce_tsne(
    seq: EmbeddingSequence,
    d: int,
    perplexity: float,
    iterations: int,
    rng_seed: int,
    l2_normalize: bool = False,
) -> ReducedEmbedding:
    """Seeded stochastic neighbor embedding into d in {2, 3} dimensions.

    Runs momentum gradient descent with early exaggeration, then a
    monotone tail: over the final 10% of iterations each step is
    backtracked until the KL divergence does not increase.
    """
    x = np.asarray(seq.vectors, dtype=np.float64)
    t = x.shape[0]
    if t < 4:
        raise InsufficientDataError("t-SNE needs at least 4 samples")
    if d not in (2, 3):
        raise ParameterError("t-SNE output dimension must be 2 or 3")
    if iterations < 10:
        raise ParameterError("iterations must be >= 10")
    if not (0 < perplexity < (t - 1) / 3):
        raise ParameterError(f"perplexity must be in (0, {(t - 1) / 3:.2f})")
    if l2_normalize:
        x = _l2_rows(x)

    p = joint_probabilities(x, perplexity)
    rng = np.random.default_rng(rng_seed)
    y = rng.standard_normal((t, d)) * 1e-4

    exaggeration = 4.0
    lr = max(t / exaggeration / 4.0, 50.0)
    exaggeration_iters = min(100, max(1, iterations // 4))
    momentum_switch = min(250, max(1, iterations // 2))
    tail_start = iterations - max(1, iterations // 10)

    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    trace: list[float] = []
    for it in range(iterations):
        p_eff = p * exaggeration if it < exaggeration_iters else p
        if it < tail_start:
            kl, grad = kl_divergence_and_grad(p_eff, y)
            momentum = 0.5 if it < momentum_switch else 0.8
            same_sign = np.sign(grad) == np.sign(velocity)
            gains = np.where(same_sign, gains * 0.8, gains + 0.2)
            gains = np.maximum(gains, 0.01)
            velocity = momentum * velocity - lr * gains * grad
            y = y + velocity
            y = y - y.mean(axis=0)
        else:
            # monotone tail: accept a plain gradient step only if KL does
            # not increase, halving the step otherwise
            kl, grad = kl_divergence_and_grad(p, y)
            step = lr
            accepted = y
            for _ in range(30):
                candidate = y - step * grad
                cand_kl, _ = kl_divergence_and_grad(p, candidate)
                if cand_kl <= kl:
                    accepted = candidate
                    break
                step *= 0.5
            y = accepted
        trace.append(kl)

    final_kl, _ = kl_divergence_and_grad(p, y)
    trace.append(final_kl)
    return ReducedEmbedding(
        vectors=y - y.mean(axis=0),
        method="tsne",
        kl_trace=tuple(trace),
    )
