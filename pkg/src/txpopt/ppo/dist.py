"""Distribution math for the hybrid action heads.

Continuous components use a Gaussian squashed through a sigmoid onto [0, 1];
log-densities carry the change-of-variables correction. Categorical
components are softmax over logits. All functions are vectorized and pure.
"""

from __future__ import annotations

import numpy as np

LOG_2PI = float(np.log(2.0 * np.pi))
LOGSTD_MIN = -5.0
LOGSTD_MAX = 2.0


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softplus(z: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, z)


def clamp_logstd(logstd: np.ndarray) -> np.ndarray:
    return np.clip(logstd, LOGSTD_MIN, LOGSTD_MAX)


def gaussian_logpdf(z: np.ndarray, mean: np.ndarray, logstd: np.ndarray) -> np.ndarray:
    """Per-dimension log N(z; mean, exp(logstd)), summed over the last axis."""
    std = np.exp(logstd)
    t = (z - mean) / std
    return (-0.5 * t * t - logstd - 0.5 * LOG_2PI).sum(axis=-1)


def squash_correction(z: np.ndarray) -> np.ndarray:
    """-log |da/dz| for a = sigmoid(z), summed over the last axis; >= 0."""
    return (softplus(z) + softplus(-z)).sum(axis=-1)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=-1, keepdims=True)
    shifted = logits - m
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def categorical_sample(logits: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw per row; ``u`` is one uniform per row."""
    p = np.exp(log_softmax(logits))
    cdf = np.cumsum(p, axis=-1)
    return (u[..., None] > cdf).sum(axis=-1)


def categorical_entropy(logits: np.ndarray) -> np.ndarray:
    lp = log_softmax(logits)
    return -(np.exp(lp) * lp).sum(axis=-1)
