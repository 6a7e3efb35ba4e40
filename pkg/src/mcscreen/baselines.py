"""Comparator dependence scores: Pearson, marginal spline fit, distance
correlation."""

import enum

import numpy as np

from ._kernels import dcor_sums_kernel
from .bspline import SplineSpec, build_basis, design_matrix
from .errors import DegenerateInput, TooFewSamples


class ScoreKind(enum.Enum):
    SIS = "sis"
    NIS = "nis"
    DC_SIS = "dcsis"
    MC_ACE = "mc-ace"
    MC_SPLINE = "mc-spline"

    @classmethod
    def from_name(cls, name: str) -> "ScoreKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown method {name!r}; choose from "
                         f"{[k.value for k in cls]}")


def sis_score(x, y) -> float:
    """Absolute Pearson correlation."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.mean(xc**2))
    sy = np.sqrt(np.mean(yc**2))
    if sx <= 0.0 or sy <= 0.0:
        raise DegenerateInput("constant column")
    return float(abs(np.mean(xc * yc) / (sx * sy)))


def default_nis_spec(n: int) -> SplineSpec:
    # cubic basis of dimension floor(n^(1/5)) + 2
    dim = int(np.floor(n ** 0.2)) + 2
    return SplineSpec(degree=3, num_knots=max(1, dim - 3))


def nis_score(x, y, spec: SplineSpec | None = None, ridge: float = 1e-8) -> float:
    """Second moment of the centered spline fit of y on x.

    Ranking by this quantity matches ranking by the fit's R2 because every
    predictor shares the same response.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    n = x.shape[0]
    if spec is None:
        spec = default_nis_spec(n)
    if n < spec.dim + 2:
        raise TooFewSamples(f"need n >= {spec.dim + 2}, got {n}")
    if np.min(y) >= np.max(y):
        return 0.0
    basis = build_basis(x, spec)
    b = design_matrix(basis, x)
    gram = b.T @ b / n
    rhs = b.T @ y / n
    w, v = np.linalg.eigh(gram)
    floor = ridge * np.trace(gram) / spec.dim
    w = np.maximum(w, floor)
    coef = v @ ((v.T @ rhs) / w)
    fitted = b @ coef
    fitted -= fitted.mean()
    return float(np.mean(fitted**2))


def dcor_score(x, y) -> float:
    """Empirical distance correlation (the original uncorrected statistic).

    Columns are internally rescaled by their ranges before the pairwise
    sums; the statistic is exactly invariant to that, and it keeps the
    squared sums finite for enormously heavy-tailed inputs.
    """
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    n = x.shape[0]
    if n < 4:
        raise TooFewSamples(f"need n >= 4, got {n}")
    rx = float(np.max(x) - np.min(x))
    ry = float(np.max(y) - np.min(y))
    if rx <= 0.0 or ry <= 0.0:
        raise DegenerateInput("constant column")
    s_ab, s_aa, s_bb, ra, rb = dcor_sums_kernel(x / rx, y / ry)

    n2 = float(n) * n
    ta = float(np.sum(ra))
    tb = float(np.sum(rb))
    dcov2_xy = 2.0 * s_ab / n2 - 2.0 * float(ra @ rb) / (n2 * n) + ta * tb / (n2 * n2)
    dvar_x = 2.0 * s_aa / n2 - 2.0 * float(ra @ ra) / (n2 * n) + ta * ta / (n2 * n2)
    dvar_y = 2.0 * s_bb / n2 - 2.0 * float(rb @ rb) / (n2 * n) + tb * tb / (n2 * n2)
    denom = np.sqrt(dvar_x * dvar_y)
    if denom <= 0.0:
        return 0.0
    r2 = max(dcov2_xy, 0.0) / denom
    return float(np.sqrt(min(r2, 1.0)))
