"""Normalized B-spline bases with data-driven knots.

A basis is defined by a degree ``l`` in {1, 2, 3} and a subinterval count
``k`` (so there are k - 1 interior knots and k + l basis functions). The
knot vector is clamped: both boundary knots are repeated l + 1 times, which
yields the stated dimension and a partition of unity over the whole range.
Interior knots sit at sample quantiles i/k by default, or equally spaced.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import design_matrix_kernel
from .errors import DegenerateInput, TooFewSamples

PLACEMENTS = ("quantile", "uniform")


@dataclass(frozen=True)
class SplineSpec:
    """Degree, subinterval count and knot placement rule."""

    degree: int
    num_knots: int
    placement: str = "quantile"

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise ValueError(f"degree must be 1, 2 or 3, got {self.degree}")
        if self.num_knots < 1:
            raise ValueError(f"num_knots must be >= 1, got {self.num_knots}")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}")

    @property
    def dim(self) -> int:
        return self.num_knots + self.degree


@dataclass(frozen=True)
class SplineBasis:
    """A fitted basis: boundary, interior knots and the clamped knot vector."""

    spec: SplineSpec
    lo: float
    hi: float
    interior: np.ndarray
    knots: np.ndarray = field(repr=False)
    uniform_fallback: bool = False

    @property
    def dim(self) -> int:
        return self.spec.dim


def _uniform_interior(lo: float, hi: float, k: int) -> np.ndarray:
    return lo + (hi - lo) * np.arange(1, k) / k


def _sorted_quantiles(sv: np.ndarray, k: int) -> np.ndarray:
    # linearly interpolated sample quantiles i/k on an already-sorted array
    n = sv.shape[0]
    pos = np.arange(1, k) * (n - 1) / k
    idx = pos.astype(np.int64)
    frac = pos - idx
    hi = np.minimum(idx + 1, n - 1)
    return sv[idx] * (1.0 - frac) + sv[hi] * frac


def build_basis(values, spec: SplineSpec) -> SplineBasis:
    """Construct a basis whose knots are driven by ``values``.

    Quantile placement puts the i-th interior knot at the i/k sample
    quantile. Ties are de-duplicated; if fewer than k - 1 distinct interior
    knots survive, placement falls back to uniform and the basis carries a
    flag saying so.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    return basis_from_sorted(np.sort(values), spec)


def interior_knots_from_sorted(sv: np.ndarray, k: int, placement: str):
    """(interior knots, uniform-fallback flag) for a sorted sample.

    Degree-independent, so callers sweeping a degree grid can compute this
    once per knot count.
    """
    lo = float(sv[0])
    hi = float(sv[-1])
    if hi <= lo:
        raise DegenerateInput("all values equal; no basis can be built")
    if k == 1:
        return np.empty(0), False
    if placement == "uniform":
        return _uniform_interior(lo, hi, k), False
    interior = _sorted_quantiles(sv, k)
    interior = interior[(interior > lo) & (interior < hi)]
    if interior.shape[0] > 1:
        keep = np.empty(interior.shape[0], dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(interior) > 0
        interior = interior[keep]
    if interior.shape[0] < k - 1:
        return _uniform_interior(lo, hi, k), True
    return interior, False


def basis_from_parts(lo: float, hi: float, interior: np.ndarray,
                     spec: SplineSpec, fallback: bool) -> SplineBasis:
    knots = np.concatenate(
        [np.full(spec.degree + 1, lo), interior, np.full(spec.degree + 1, hi)]
    )
    interior = np.asarray(interior)
    interior.flags.writeable = False
    knots.flags.writeable = False
    return SplineBasis(
        spec=spec, lo=lo, hi=hi, interior=interior, knots=knots,
        uniform_fallback=fallback,
    )


def basis_from_sorted(sorted_values: np.ndarray, spec: SplineSpec) -> SplineBasis:
    """build_basis for values already in ascending order (hot paths sort a
    column once and reuse it across many specs)."""
    sv = sorted_values
    n = sv.shape[0]
    d = spec.dim
    if n < d + 1:
        raise TooFewSamples(f"need at least {d + 1} samples for dim {d}, got {n}")
    interior, fallback = interior_knots_from_sorted(sv, spec.num_knots,
                                                    spec.placement)
    return basis_from_parts(float(sv[0]), float(sv[-1]), interior, spec,
                            fallback)


def design_matrix(basis: SplineBasis, values) -> np.ndarray:
    """n x dim matrix whose row u holds the basis evaluated at values[u].

    Points outside [lo, hi] are clamped to the boundary first, so rows are
    never all-zero. Each row is non-negative, sums to one and has at most
    degree + 1 nonzero entries.
    """
    values = np.ascontiguousarray(values, dtype=np.float64).ravel()
    out = np.zeros((values.shape[0], basis.dim))
    design_matrix_kernel(basis.knots, basis.spec.degree, values, out)
    return out


def evaluate(basis: SplineBasis, x: float) -> np.ndarray:
    """Basis vector at a single point (clamped to the boundary)."""
    return design_matrix(basis, np.array([x], dtype=np.float64))[0]
