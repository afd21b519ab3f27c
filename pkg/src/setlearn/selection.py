"""Data-driven parameter choices: kernel width, regularization strength.

These are the working heuristics used in the experiments plus the
theory-backed rate schedule; none of them claims optimality.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import DataError, UsageError
from .kernels import _as_points

__all__ = ["width_heuristic", "lambda_curvature", "rate_lambda"]

# Eigenvalues at or below this floor do not count as positive for the
# curvature heuristic.
POSITIVE_FLOOR = 1e-12


def width_heuristic(points, k=10):
    """Median distance to the k-th nearest neighbour (self excluded).

    Permutation- and translation-invariant, scales linearly with the
    data.  Even-count medians average the two central order statistics.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    k = int(k)
    if not 1 <= k <= n - 1:
        raise UsageError(f"need 1 <= k < n for the width heuristic, got k={k}, n={n}")
    tree = cKDTree(pts)
    # query returns the point itself at rank 0, so the k-th neighbour sits
    # at column k
    dist, _ = tree.query(pts, k=k + 1)
    sigma = float(np.median(dist[:, k]))
    if sigma <= 0.0:
        raise DataError(
            "width heuristic degenerated to 0 (duplicated points); sigma must be positive")
    return sigma


def lambda_curvature(eigenvalues):
    """Eigenvalue at the sharpest bend of the log-spectrum.

    Over the descending positive spectrum, pick the interior index
    maximizing the discrete second difference of log10(sigma_j); ties go
    to the smallest index.  The returned lambda is always one of the
    input eigenvalues.
    """
    s = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    s = s[s > POSITIVE_FLOOR]
    if s.size < 3:
        raise UsageError(
            f"curvature heuristic needs at least 3 positive eigenvalues, got {s.size}")
    logs = np.log10(s)
    curvature = logs[:-2] - 2.0 * logs[1:-1] + logs[2:]
    # exact ties (e.g. a geometric spectrum, curvature 0 everywhere) come
    # out of log10 with last-ulp wobble, so compare with slack before
    # taking the smallest tied index
    tie_slack = 64.0 * np.finfo(float).eps * max(1.0, float(np.abs(logs).max()))
    j = int(np.argmax(curvature >= curvature.max() - tie_slack)) + 1
    return float(s[j])


def rate_lambda(n, s=1.0, b=1.0):
    """Schedule lambda_n = n^(-1/(2s + b + 1)) for smoothness s and decay b."""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n!r}")
    if not 0.0 < s <= 1.0:
        raise UsageError(f"s must lie in (0, 1], got {s!r}")
    if not 0.0 <= b <= 1.0:
        raise UsageError(f"b must lie in [0, 1], got {b!r}")
    return float(n) ** (-1.0 / (2.0 * s + b + 1.0))
