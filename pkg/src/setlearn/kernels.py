"""Kernel specifications, the metric they induce, and Gram matrix assembly.

A kernel spec is an immutable value describing a positive definite function
on pairs of dense real vectors.  Specs carry two documented properties:

``unit_diagonal``
    whether K(x, x) = 1 for every x.  Support estimation requires this;
    wrap other kernels with :func:`normalize`.
``separating``
    which class of closed sets the kernel is known to separate, one of
    ``"complete"`` (all closed subsets), ``"linear"`` (affine subspaces
    only) or ``"none"`` (no guarantee).  The exponential kernels are
    completely separating; the Gaussian kernel is not, which is why it is
    a poor default for set estimation even though it is a fine smoother.

All evaluation is elementwise-deterministic: the same pair of points gives
bit-identical values regardless of batch shape or argument order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, NumericError, UsageError

# PSD slack for Gram matrices, relative to the matrix 1-norm.
EPS_PSD = 1e-10

# Dense Gram matrices above this point count are refused (memory guard).
MAX_GRAM_POINTS = 10000

SEPARATES_ALL = "complete"
SEPARATES_LINEAR = "linear"
SEPARATES_NONE = "none"

__all__ = [
    "Kernel", "Abel", "L1Exponential", "Gaussian", "Linear", "Normalized",
    "Product", "GramMatrix", "kernel_eval", "induced_metric", "metric_matrix",
    "normalize", "product_kernel", "gram", "cross_gram", "parse_kernel",
    "format_kernel", "EPS_PSD", "MAX_GRAM_POINTS",
    "SEPARATES_ALL", "SEPARATES_LINEAR", "SEPARATES_NONE",
]


def _check_width(sigma):
    if not np.isfinite(sigma) or sigma <= 0:
        raise UsageError(f"kernel width must be positive and finite, got {sigma!r}")
    return float(sigma)


def _as_points(points, name="points"):
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DataError(f"{name} must be a nonempty 2-d array, got shape {np.shape(points)}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Kernel:
    """Base class for kernel specs.  Subclasses implement ``_pairwise``/``_diag``."""

    def _pairwise(self, X, Y):
        raise NotImplementedError

    def _diag(self, X):
        raise NotImplementedError


@dataclass(frozen=True)
class Abel(Kernel):
    """exp(-||x - y|| / sigma), completely separating."""

    sigma: float

    unit_diagonal = True
    separating = SEPARATES_ALL

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_width(self.sigma))

    def _pairwise(self, X, Y):
        return np.exp(-cdist(X, Y, "euclidean") / self.sigma)

    def _diag(self, X):
        return np.ones(X.shape[0])


@dataclass(frozen=True)
class L1Exponential(Kernel):
    """exp(-||x - y||_1 / sigma), completely separating."""

    sigma: float

    unit_diagonal = True
    separating = SEPARATES_ALL

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_width(self.sigma))

    def _pairwise(self, X, Y):
        return np.exp(-cdist(X, Y, "cityblock") / self.sigma)

    def _diag(self, X):
        return np.ones(X.shape[0])


@dataclass(frozen=True)
class Gaussian(Kernel):
    """exp(-||x - y||^2 / sigma^2).  Smooth but not separating."""

    sigma: float

    unit_diagonal = True
    separating = SEPARATES_NONE

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_width(self.sigma))

    def _pairwise(self, X, Y):
        return np.exp(-cdist(X, Y, "sqeuclidean") / (self.sigma * self.sigma))

    def _diag(self, X):
        return np.ones(X.shape[0])


@dataclass(frozen=True)
class Linear(Kernel):
    """x . y, separates affine subspaces only.  Not unit-diagonal."""

    unit_diagonal = False
    separating = SEPARATES_LINEAR

    def _pairwise(self, X, Y):
        return X @ Y.T

    def _diag(self, X):
        return np.einsum("ij,ij->i", X, X)


@dataclass(frozen=True)
class Normalized(Kernel):
    """inner(x, y) / sqrt(inner(x, x) * inner(y, y))."""

    inner: Kernel

    unit_diagonal = True

    @property
    def separating(self):
        return self.inner.separating

    def _normalizer(self, X):
        d = self.inner._diag(X)
        if np.any(d <= 0):
            raise NumericError("cannot normalize: K(x, x) <= 0 at an evaluation point")
        return d

    def _pairwise(self, X, Y):
        dx = self._normalizer(X)
        dy = self._normalizer(Y)
        return self.inner._pairwise(X, Y) / np.sqrt(np.outer(dx, dy))

    def _diag(self, X):
        self._normalizer(X)
        return np.ones(X.shape[0])


@dataclass(frozen=True)
class Product(Kernel):
    """Product of factor kernels applied to disjoint coordinate slices.

    ``factors`` is a tuple of (kernel, (start, stop)) pairs whose half-open
    ranges tile 0..dim.  Build instances with :func:`product_kernel`, which
    validates the tiling.
    """

    factors: tuple

    @property
    def dim(self):
        return self.factors[-1][1][1]

    @property
    def unit_diagonal(self):
        return all(k.unit_diagonal for k, _ in self.factors)

    @property
    def separating(self):
        if all(k.separating == SEPARATES_ALL for k, _ in self.factors):
            return SEPARATES_ALL
        return SEPARATES_NONE

    def _check_dim(self, X):
        if X.shape[1] != self.dim:
            raise DataError(
                f"product kernel expects dimension {self.dim}, got {X.shape[1]}")

    def _pairwise(self, X, Y):
        self._check_dim(X)
        self._check_dim(Y)
        out = np.ones((X.shape[0], Y.shape[0]))
        for k, (a, b) in self.factors:
            out *= k._pairwise(X[:, a:b], Y[:, a:b])
        return out

    def _diag(self, X):
        self._check_dim(X)
        out = np.ones(X.shape[0])
        for k, (a, b) in self.factors:
            out *= k._diag(X[:, a:b])
        return out


def product_kernel(factors):
    """Combine (kernel, (start, stop)) factor pairs into a product kernel.

    The slices must tile the coordinate range 0..d with no gap or overlap
    (any order is accepted and factors are sorted by start).  ``slice``
    objects with explicit start and stop are accepted too.  A single
    factor spanning all coordinates is returned as-is.
    """
    normalized = []
    for k, where in factors:
        if isinstance(where, slice):
            if where.start is None or where.stop is None or where.step not in (None, 1):
                raise UsageError(f"coordinate slice {where!r} needs explicit start and stop")
            where = (where.start, where.stop)
        a, b = where
        normalized.append((k, (int(a), int(b))))
    factors = normalized
    if not factors:
        raise UsageError("product kernel needs at least one factor")
    for k, (a, b) in factors:
        if not isinstance(k, Kernel):
            raise UsageError(f"factor {k!r} is not a kernel spec")
        if b <= a or a < 0:
            raise UsageError(f"bad coordinate slice {a}:{b}")
    factors.sort(key=lambda f: f[1][0])
    cursor = 0
    for _, (a, b) in factors:
        if a != cursor:
            raise UsageError(
                f"factor slices must tile 0..d; gap or overlap at coordinate {cursor}")
        cursor = b
    if len(factors) == 1:
        return factors[0][0]
    return Product(tuple(factors))


def normalize(kernel):
    """Return a unit-diagonal version of ``kernel``.

    Unit-diagonal kernels are returned unchanged, which also makes the
    operation idempotent by construction.
    """
    if kernel.unit_diagonal:
        return kernel
    return Normalized(kernel)


def kernel_eval(kernel, x, y):
    """Evaluate K(x, y) for a single pair of points."""
    x = _as_points(x, "x")
    y = _as_points(y, "y")
    if x.shape != (1, x.shape[1]) or y.shape != (1, y.shape[1]):
        raise DataError("kernel_eval expects single points, use gram/cross_gram for batches")
    if x.shape[1] != y.shape[1]:
        raise DataError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    return float(kernel._pairwise(x, y)[0, 0])


def induced_metric(kernel, x, y):
    """Distance sqrt(K(x,x) + K(y,y) - 2 K(x,y)) in the feature space."""
    x = _as_points(x, "x")
    y = _as_points(y, "y")
    if x.shape[1] != y.shape[1]:
        raise DataError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    kxx = float(kernel._diag(x)[0])
    if np.array_equal(x, y):
        # the radicand is zero analytically; evaluating it numerically can
        # leave round-off when diagonal and pairwise paths sum differently
        return 0.0
    kyy = float(kernel._diag(y)[0])
    kxy = float(kernel._pairwise(x, y)[0, 0])
    return _metric_from_parts(kxx + kyy - 2.0 * kxy, kxx + kyy)


def _metric_from_parts(sq, scale):
    sq = np.asarray(sq, dtype=float)
    tol = 1e-12 * max(1.0, float(np.max(scale)) if np.size(scale) else 1.0)
    if np.any(sq < -tol):
        raise NumericError("negative squared distance beyond round-off tolerance")
    out = np.sqrt(np.maximum(sq, 0.0))
    return float(out) if out.ndim == 0 else out


def metric_matrix(kernel, X, Y=None):
    """Pairwise induced-metric distances between two point sets.

    With one argument the result is the self-distance matrix, whose
    diagonal is exactly zero.
    """
    X = _as_points(X, "X")
    self_distances = Y is None
    Y = X if self_distances else _as_points(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    dx = kernel._diag(X)
    dy = dx if self_distances else kernel._diag(Y)
    sq = dx[:, None] + dy[None, :] - 2.0 * kernel._pairwise(X, Y)
    if self_distances:
        sq = (sq + sq.T) / 2.0
        np.fill_diagonal(sq, 0.0)
    return _metric_from_parts(sq, dx[:, None] + dy[None, :])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric matrix of kernel values on a point sample."""

    entries: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]


def gram(kernel, points, max_points=MAX_GRAM_POINTS):
    """Assemble the Gram matrix K(x_i, x_j) for a sample.

    The result is exactly symmetric and, for unit-diagonal kernels, has an
    exact unit diagonal.  Positive semidefiniteness holds up to an
    ``EPS_PSD`` slack relative to the matrix 1-norm; it is a property of
    the kernels, not re-verified here (an O(n^3) check).
    """
    pts = _as_points(points)
    if pts.shape[0] > max_points:
        raise UsageError(
            f"gram matrix for n={pts.shape[0]} exceeds the cap of {max_points} points")
    M = kernel._pairwise(pts, pts)
    # BLAS-backed products are not guaranteed to return exactly symmetric
    # output, so enforce it.
    M = (M + M.T) / 2.0
    if kernel.unit_diagonal:
        np.fill_diagonal(M, 1.0)
    if not np.all(np.isfinite(M)):
        raise NumericError("gram matrix contains non-finite entries")
    return GramMatrix(M)


def cross_gram(kernel, X, Y):
    """Rectangular matrix K(x_i, y_j) between two point sets."""
    X = _as_points(X, "X")
    Y = _as_points(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    M = kernel._pairwise(X, Y)
    if not np.all(np.isfinite(M)):
        raise NumericError("cross-gram matrix contains non-finite entries")
    return M


# ---------------------------------------------------------------------------
# Text form.  Examples:
#   kernel=abel sigma=0.5
#   kernel=linear
#   kernel=normalized inner=(linear)
#   kernel=product factors=(abel sigma=1.0 @0:2)+(l1exp sigma=2.0 @2:3)

_NAMES = {"abel": Abel, "l1exp": L1Exponential, "gaussian": Gaussian}


def format_kernel(kernel, prefix=True):
    """Serialize a kernel spec to its text form."""
    head = "kernel=" if prefix else ""
    if isinstance(kernel, Abel):
        return f"{head}abel sigma={kernel.sigma!r}"
    if isinstance(kernel, L1Exponential):
        return f"{head}l1exp sigma={kernel.sigma!r}"
    if isinstance(kernel, Gaussian):
        return f"{head}gaussian sigma={kernel.sigma!r}"
    if isinstance(kernel, Linear):
        return f"{head}linear"
    if isinstance(kernel, Normalized):
        return f"{head}normalized inner=({format_kernel(kernel.inner, prefix=False)})"
    if isinstance(kernel, Product):
        parts = "+".join(
            f"({format_kernel(k, prefix=False)} @{a}:{b})" for k, (a, b) in kernel.factors)
        return f"{head}product factors={parts}"
    raise UsageError(f"cannot serialize kernel {kernel!r}")


def _split_top(text, sep):
    """Split on ``sep`` at parenthesis depth zero."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced parentheses in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise UsageError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def _parse_kv(tokens, allowed):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise UsageError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key not in allowed:
            raise UsageError(f"unknown kernel option {key!r}")
        out[key] = val
    return out


def _parse_float(text, what):
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad {what}: {text!r}") from None


def parse_kernel(text):
    """Parse the text form produced by :func:`format_kernel`.

    The leading ``kernel=`` is optional so the same parser serves model
    files and bare command-line values.
    """
    body = text.strip()
    if body.startswith("kernel="):
        body = body[len("kernel="):]
    tokens = [t for t in _split_top(body, " ") if t]
    if not tokens:
        raise UsageError("empty kernel spec")
    name, rest = tokens[0], tokens[1:]
    if name in _NAMES:
        kvs = _parse_kv(rest, {"sigma"})
        if "sigma" not in kvs:
            raise UsageError(f"kernel {name!r} needs sigma=")
        return _NAMES[name](_parse_float(kvs["sigma"], "sigma"))
    if name == "linear":
        if rest:
            raise UsageError("kernel 'linear' takes no options")
        return Linear()
    if name == "normalized":
        kvs = _parse_kv(rest, {"inner"})
        if "inner" not in kvs:
            raise UsageError("kernel 'normalized' needs inner=(...)")
        return normalize(parse_kernel(_strip_group(kvs["inner"])))
    if name == "product":
        kvs = _parse_kv(rest, {"factors"})
        if "factors" not in kvs:
            raise UsageError("kernel 'product' needs factors=(...)+(...)")
        factors = []
        for part in _split_top(kvs["factors"], "+"):
            inner = _strip_group(part)
            pieces = _split_top(inner, "@")
            if len(pieces) != 2:
                raise UsageError(f"product factor needs one @start:stop slice: {part!r}")
            spec, slc = pieces[0].strip(), pieces[1].strip()
            try:
                a, b = (int(s) for s in slc.split(":"))
            except ValueError:
                raise UsageError(f"bad slice {slc!r}") from None
            factors.append((parse_kernel(spec), (a, b)))
        return product_kernel(factors)
    raise UsageError(f"unknown kernel {name!r}")


def _strip_group(text):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise UsageError(f"expected a parenthesized group, got {text!r}")
    return text[1:-1]
