"""Support estimation from an i.i.d. sample.

The estimator scores a point x by

    F_n(x) = (1/n) * K_x' g(K_n / n) K_x,      K_x = (K(x_1, x), ..., K(x_n, x))

where g is the gain of a spectral filter.  F_n lies in [0, 1]; it
approaches 1 on the support of the sampling distribution and falls off
away from it when the kernel separates the support.  The estimated set is
the superlevel set {x : F_n(x) >= 1 - tau}.

Three score paths compute the same quantity:

``spectral``
    one eigendecomposition of K_n/n, then any filter and any
    regularization strength is a cheap reweighting.  The default.
``cholesky``
    Tikhonov only: solve (K_n + n*lam*I) alpha = K_x by Cholesky.
``landweber``
    Landweber only: m+1 gradient steps, never factorizing K_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DataError, NumericError, UsageError
from .filters import (Filter, KpcaTruncation, Landweber, SpectralCutoff,
                      SpectralDecomposition, Tikhonov, _g, decompose)
from .kernels import GramMatrix, _as_points, cross_gram, gram

__all__ = [
    "SupportModel", "fit", "score", "score_batch", "predict_member",
    "member_mask", "tikhonov_coefficients", "landweber_coefficients",
    "regularization_path", "kpca_lambda_from_rank",
]

ALGORITHMS = ("spectral", "cholesky", "landweber")

# Eigenvalues of K_n/n at or below this are treated as exact nulls by the
# cutoff scoring path; otherwise round-off eigenvalues of a singular Gram
# would enter the 1/sigma branch with huge gains.  Matches the lambda -> 0
# limit being the pseudo-inverse score.
NULL_EIG = 1e-12

# Round-off guard on the membership threshold.  Training points under a
# full-rank projection filter score 1 only up to arithmetic error, so a
# strict score >= 1 - tau comparison would flip on the last ulp at tau=0.
MEMBER_SLACK = 1e-9


def _check_tau(tau):
    if not np.isfinite(tau) or not 0.0 <= tau < 1.0:
        raise UsageError(f"tau must lie in [0, 1), got {tau!r}")
    return float(tau)


@dataclass(frozen=True, eq=False)
class SupportModel:
    """Fitted state: training points, kernel, filter and cached factorizations.

    Immutable after fit; the arrays are marked read-only.  The lazy caches
    (eigendecomposition, Cholesky factor) are derived state and do not
    change what the model computes.
    """

    points: np.ndarray
    kernel: object
    filter: Filter
    algorithm: str
    tau: float
    gram: GramMatrix
    _decomposition: SpectralDecomposition = field(default=None, repr=False)
    _cho: tuple = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def decomposition(self):
        """Eigendecomposition of K_n/n, computed on first use and cached."""
        if self._decomposition is None:
            object.__setattr__(self, "_decomposition", decompose(self.gram))
        return self._decomposition

    def _cho_factor(self):
        if self._cho is None:
            n = self.n
            M = self.gram.entries + (n * self.filter.lam) * np.eye(n)
            try:
                object.__setattr__(self, "_cho", cho_factor(M, lower=True))
            except np.linalg.LinAlgError as exc:
                raise NumericError(f"Cholesky factorization failed: {exc}") from None
        return self._cho


def default_algorithm(filter):
    """Cheapest score path for a filter: direct solve for Tikhonov, the
    iteration for Landweber, the eigendecomposition otherwise."""
    if isinstance(filter, Tikhonov):
        return "cholesky"
    if isinstance(filter, Landweber):
        return "landweber"
    return "spectral"


def fit(points, kernel, filter, algorithm=None, tau=0.0):
    """Fit a support model to a sample.

    Parameters
    ----------
    points : (n, d) array
        Training sample.
    kernel : Kernel
        Must be unit-diagonal; wrap others with ``normalize``.
    filter : Filter
        Spectral filter spec.  A kPCA truncation given by component count
        is resolved here to a concrete threshold against the spectrum.
    algorithm : str, optional
        "spectral" (any filter), "cholesky" (Tikhonov only) or
        "landweber" (Landweber only).  Defaults per filter via
        :func:`default_algorithm`; the regularization path always goes
        through the decomposition whatever the model's score path.
    tau : float
        Default membership margin in [0, 1); ``predict_member`` may
        override it per call.
    """
    pts = np.array(_as_points(points), copy=True)
    if not kernel.unit_diagonal:
        raise UsageError(
            "support estimation needs a unit-diagonal kernel; wrap it with normalize()")
    if algorithm is None:
        algorithm = default_algorithm(filter)
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    if algorithm == "cholesky" and not isinstance(filter, Tikhonov):
        raise UsageError("the cholesky path applies only to the Tikhonov filter")
    if algorithm == "landweber" and not isinstance(filter, Landweber):
        raise UsageError("the landweber path applies only to the Landweber filter")
    tau = _check_tau(tau)
    G = gram(kernel, pts)
    decomp = None
    if isinstance(filter, KpcaTruncation) and filter.lam is None:
        decomp = decompose(G)
        filter = KpcaTruncation(lam=kpca_lambda_from_rank(decomp, filter.components))
    pts.setflags(write=False)
    G.entries.setflags(write=False)
    return SupportModel(points=pts, kernel=kernel, filter=filter,
                        algorithm=algorithm, tau=tau, gram=G,
                        _decomposition=decomp)


def _check_query(model, X):
    X = _as_points(X, "query points")
    if X.shape[1] != model.dim:
        raise DataError(
            f"query dimension {X.shape[1]} does not match model dimension {model.dim}")
    return X


def score_batch(model, X):
    """Scores F_n for a batch of query points, clamped to [0, 1]."""
    X = _check_query(model, X)
    Kx = cross_gram(model.kernel, model.points, X)
    n = model.n
    if model.algorithm == "spectral":
        D = model.decomposition()
        W = D.eigenvectors.T @ Kx
        gv = _scoring_gains(model.filter, D.eigenvalues)
        F = (gv[:, None] * W * W).sum(axis=0) / n
    elif model.algorithm == "cholesky":
        alpha = cho_solve(model._cho_factor(), Kx)
        F = np.einsum("ij,ij->j", alpha, Kx)
    else:
        alpha = landweber_coefficients(model.gram, Kx, model.filter.iterations)
        F = np.einsum("ij,ij->j", alpha, Kx)
    return np.clip(F, 0.0, 1.0)


def score(model, x):
    """Score F_n(x) for a single query point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DataError("score expects a single point, use score_batch for batches")
    return float(score_batch(model, x[None, :])[0])


def member_mask(scores, tau):
    """Threshold scores at 1 - tau with the ``MEMBER_SLACK`` round-off guard."""
    tau = _check_tau(tau)
    return np.asarray(scores, dtype=float) >= 1.0 - tau - MEMBER_SLACK


def predict_member(model, x, tau=None):
    """Membership x in {F_n >= 1 - tau}.  1-d input gives a bool, 2-d a bool array."""
    tau = model.tau if tau is None else _check_tau(tau)
    x = np.asarray(x, dtype=float)
    member = member_mask(score_batch(model, x[None, :] if x.ndim == 1 else x), tau)
    return bool(member[0]) if x.ndim == 1 else member


def _scoring_gains(f, eigenvalues):
    gv = _g(f, eigenvalues)
    if isinstance(f, SpectralCutoff):
        gv = gv.copy()
        gv[eigenvalues <= NULL_EIG] = 0.0
    return gv


def tikhonov_coefficients(g, kx, lam):
    """Solve (K_n + n*lam*I) alpha = kx by Cholesky.

    ``kx`` may be a vector or a matrix of stacked right-hand sides.
    """
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise UsageError(f"lam must be positive and finite, got {lam!r}")
    n = g.n
    M = g.entries + (n * lam) * np.eye(n)
    try:
        c = cho_factor(M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Cholesky factorization failed: {exc}") from None
    return cho_solve(c, np.asarray(kx, dtype=float))


def landweber_coefficients(g, kx, iterations):
    """Landweber recursion alpha <- alpha + (kx - K_n alpha)/n, run m+1 times.

    After m+1 updates alpha equals (1/n) * g_m(K_n/n) kx exactly as a
    polynomial identity, so the iterative and spectral paths agree to
    round-off.
    """
    K = g.entries
    n = g.n
    alpha = np.zeros_like(np.asarray(kx, dtype=float))
    for _ in range(iterations + 1):
        alpha += (kx - K @ alpha) / n
    return alpha


def regularization_path(model, X, grid):
    """Scores for every regularization strength in ``grid``, one decomposition.

    ``grid`` holds lam values (Tikhonov, cutoff, kPCA threshold) or
    iteration counts (Landweber), matching the model's filter family.
    Returns an array of shape (len(grid), len(X)).
    """
    grid = list(grid)
    if not grid:
        raise UsageError("empty regularization grid")
    X = _check_query(model, X)
    D = model.decomposition()
    Kx = cross_gram(model.kernel, model.points, X)
    W2 = (D.eigenvectors.T @ Kx) ** 2
    out = np.empty((len(grid), X.shape[0]))
    for i, value in enumerate(grid):
        gv = _scoring_gains(_reparameterize(model.filter, value), D.eigenvalues)
        out[i] = np.clip((gv[:, None] * W2).sum(axis=0) / model.n, 0.0, 1.0)
    return out


def _reparameterize(f, value):
    if isinstance(f, Tikhonov):
        return Tikhonov(float(value))
    if isinstance(f, SpectralCutoff):
        return SpectralCutoff(float(value))
    if isinstance(f, Landweber):
        return Landweber(int(value))
    if isinstance(f, KpcaTruncation):
        return KpcaTruncation(lam=float(value))
    raise UsageError(f"unknown filter {f!r}")


def kpca_lambda_from_rank(decomposition, components):
    """Threshold keeping exactly ``components`` distinct positive eigenvalues.

    Returns the midpoint of the M-th and (M+1)-th distinct positive
    eigenvalues, so small perturbations of the spectrum do not flip the
    truncation.
    """
    M = int(components)
    if M < 1:
        raise UsageError(f"component count must be >= 1, got {components!r}")
    distinct = np.unique(decomposition.eigenvalues)[::-1]
    distinct = distinct[distinct > 0.0]
    if distinct.size < M + 1:
        raise UsageError(
            f"component count {M} needs at least {M + 1} distinct positive "
            f"eigenvalues, the spectrum has {distinct.size}")
    return float((distinct[M - 1] + distinct[M]) / 2.0)
