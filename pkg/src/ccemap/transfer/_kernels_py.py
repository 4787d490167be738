"""Pure-numpy kernels: the fallback backend for distance and weighting.

Mirrors the compiled module in ccemap/transfer/_kernels.pyx.  Both
backends must implement the same formulas with the same overflow guard
so that results agree to floating-point noise.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# exp ceiling below which w**p cannot overflow a double (log(DBL_MAX) ~ 709.78)
MAX_SAFE_EXP = 690.0


def sq_euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, (T, D) x (S, D) -> (T, S).

    Computed from explicit differences (chunked to bound memory) rather
    than the x^2+y^2-2xy expansion, which loses precision for close pairs.
    """
    t, d = x.shape
    s = y.shape[0]
    out = np.empty((t, s), dtype=np.float64)
    chunk = max(1, 8_000_000 // max(1, s * d))
    for lo in range(0, t, chunk):
        diff = x[lo : lo + chunk, None, :] - y[None, :, :]
        out[lo : lo + chunk] = np.einsum("tsd,tsd->ts", diff, diff)
    return out


def cosine_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairwise cosine distances 1 - x.y/(|x||y|), clamped into [0, 2].

    Callers must reject zero-norm rows beforehand.
    """
    nx = np.sqrt(np.einsum("td,td->t", x, x))
    ny = np.sqrt(np.einsum("sd,sd->s", y, y))
    sim = (x @ y.T) / (nx[:, None] * ny[None, :])
    return np.clip(1.0 - sim, 0.0, 2.0)


def powered_weights(dist: np.ndarray, p: float, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair weights (1/(d+eps))**p with an overflow guard.

    Returns (weights, log_scale) where log_scale has one entry per target
    row.  When the direct power fits in a double everywhere, weights are
    the absolute values and log_scale is all zero.  Otherwise each row is
    scaled by its maximum weight before powering: the true weight is
    weights * exp(log_scale[row]), and the scaling cancels under l-inf
    normalization.
    """
    w = 1.0 / (dist + epsilon)
    t = w.shape[0]
    wmax_global = float(w.max()) if w.size else 0.0
    if w.size == 0 or wmax_global <= 0.0 or p * max(0.0, math.log(wmax_global)) < MAX_SAFE_EXP:
        return w**p, np.zeros(t, dtype=np.float64)
    wmax = w.max(axis=1, keepdims=True)
    scaled = (w / wmax) ** p
    return scaled, (p * np.log(wmax[:, 0])).astype(np.float64)
