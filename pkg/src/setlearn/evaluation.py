"""Quality metrics for set estimates and the classical baselines.

Sets are compared through finite discretizations (grids for volume,
sample clouds for Hausdorff); the discretization error is one grid step.
The ROC/AUC harness compares score functions without committing to a
threshold, which also makes it invariant to monotone rescalings, so the
unnormalized Parzen baseline competes on equal footing.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from .errors import DataError, UsageError
from .kernels import _as_points, metric_matrix

__all__ = [
    "hausdorff", "symdiff_measure", "roc_auc",
    "parzen_score", "devroye_wise_member",
]


def hausdorff(A, B, kernel=None):
    """Hausdorff distance max(sup_a d(a, B), sup_b d(b, A)) on finite sets.

    Euclidean by default; pass a kernel spec to use the metric it induces.
    Both sets must be nonempty.
    """
    A = _as_points(A, "A")
    B = _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise DataError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    D = cdist(A, B) if kernel is None else metric_matrix(kernel, A, B)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def symdiff_measure(inside_a, inside_b, cell_volume):
    """Measure of the symmetric difference of two indicator grids.

    ``cell_volume`` times the number of cells where the indicators
    disagree; both indicators must live on the same grid.
    """
    a = np.asarray(inside_a, dtype=bool)
    b = np.asarray(inside_b, dtype=bool)
    if a.shape != b.shape:
        raise DataError(f"indicator grids differ in shape: {a.shape} vs {b.shape}")
    if not cell_volume > 0:
        raise UsageError(f"cell volume must be positive, got {cell_volume!r}")
    return float(cell_volume) * int(np.count_nonzero(a != b))


def roc_auc(scores, labels):
    """ROC points and the area under the curve for labeled scores.

    Returns (points, auc).  ``points`` is a (k, 2) array of (false
    positive rate, true positive rate) pairs, one per distinct threshold
    plus the origin.  The AUC is the Mann-Whitney rank statistic with
    ties counted half, so it is exact under ties rather than an
    integration artifact.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.ndim != 1 or scores.shape != labels.shape:
        raise DataError("scores and labels must be matching vectors")
    if not np.all(np.isfinite(scores)):
        raise DataError("scores contain non-finite values")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs at least one positive and one negative label")

    ranks = rankdata(scores)
    u_stat = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    auc = float(u_stat / (n_pos * n_neg))

    order = np.argsort(-scores, kind="stable")
    tp = np.cumsum(labels[order])
    fp = np.cumsum(~labels[order])
    # one ROC point per distinct threshold: the last index of each tie group
    last = np.flatnonzero(np.r_[np.diff(scores[order]) != 0, True])
    points = np.empty((last.size + 1, 2))
    points[0] = (0.0, 0.0)
    points[1:, 0] = fp[last] / n_neg
    points[1:, 1] = tp[last] / n_pos
    return points, auc


def parzen_score(train, h, x):
    """Plug-in estimate (1/(n h^d)) sum_i exp(-||x - x_i|| / h).

    Deliberately unnormalized (the profile exp(-||u||) does not integrate
    to one); ROC comparisons are unaffected.  A 1-d ``x`` gives a float,
    a 2-d batch gives a vector.
    """
    train = _as_points(train, "train")
    if not h > 0:
        raise UsageError(f"bandwidth must be positive, got {h!r}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = _as_points(x[None, :] if single else x, "x")
    if X.shape[1] != train.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {train.shape[1]}")
    n, d = train.shape
    vals = np.exp(-cdist(X, train) / h).sum(axis=1) / (n * h ** d)
    return float(vals[0]) if single else vals


def devroye_wise_member(train, eps, x):
    """Union-of-balls membership: min_i ||x - x_i|| <= eps (closed balls).

    A 1-d ``x`` gives a bool, a 2-d batch gives a bool vector.
    """
    train = _as_points(train, "train")
    if not eps > 0:
        raise UsageError(f"radius must be positive, got {eps!r}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = _as_points(x[None, :] if single else x, "x")
    if X.shape[1] != train.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {train.shape[1]}")
    member = cdist(X, train).min(axis=1) <= eps
    return bool(member[0]) if single else member
