"""Spline-estimated squared maximum correlation for a single (x, y) pair.

The fit solves, in a spline space, for the transformation pair maximizing
the Pearson correlation between transformed response and transformed
predictor. Mean-zero predictor transformations are enforced structurally:
the predictor design is contracted with contrast vectors orthogonal to the
all-ones vector, scaled by the empirical basis means. What remains is a
symmetric eigenproblem whose top eigenvalue estimates the squared maximum
correlation.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._accel import backend
from ._kernels import _BM_FLOOR, mc_core_kernel
from .bspline import (
    SplineBasis,
    SplineSpec,
    basis_from_sorted,
    build_basis,
    design_matrix,
)
from .errors import SingularGram, TooFewSamples

DEFAULT_RIDGE = 1e-8


@dataclass(frozen=True)
class ContrastSet:
    """Orthonormal rows spanning the complement of the all-ones direction."""

    rows: np.ndarray


@lru_cache(maxsize=64)
def _helmert_rows(d: int) -> np.ndarray:
    z = np.zeros((d - 1, d))
    for i in range(1, d):
        z[i - 1, :i] = 1.0
        z[i - 1, i] = -float(i)
        z[i - 1] /= np.sqrt(i * (i + 1.0))
    z.flags.writeable = False
    return z


def contrast_set(d_n: int) -> ContrastSet:
    """Deterministic Helmert-style contrasts for a basis of dimension d_n."""
    if d_n < 2:
        raise ValueError(f"need d_n >= 2, got {d_n}")
    return ContrastSet(rows=_helmert_rows(d_n))


def _floored_inv_sqrt(a: np.ndarray, ridge: float):
    """Symmetric inverse square root with eigenvalues lifted to
    ridge * trace / dim before inversion."""
    d = a.shape[0]
    tr = float(np.trace(a))
    if not np.isfinite(tr) or tr <= 0.0:
        raise SingularGram("Gram matrix has non-positive or non-finite trace")
    w, v = np.linalg.eigh(a)
    floor = ridge * tr / d
    n_floored = int(np.sum(w < floor))
    w = np.maximum(w, floor)
    if w[0] <= 0.0:
        raise SingularGram("Gram matrix singular after regularization")
    return (v / np.sqrt(w)) @ v.T, float(w[-1] / w[0]), n_floored


class YSide:
    """Response-side pieces reusable across many predictors.

    Holds the response basis, its design matrix and the whitened design
    (design times inverse square root of its Gram). Screening over p
    predictors builds this once and shares it read-only.
    """

    def __init__(self, y, spec: SplineSpec, ridge: float = DEFAULT_RIDGE,
                 sorted_values=None):
        y = np.ascontiguousarray(y, dtype=np.float64).ravel()
        self.values = y
        self.spec = spec
        self.ridge = ridge
        if sorted_values is None:
            sorted_values = np.sort(y)
        self.basis = basis_from_sorted(sorted_values, spec)
        self.design = design_matrix(self.basis, y)
        a00 = self.design.T @ self.design / y.shape[0]
        self.inv_sqrt, self.cond, self.n_floored = _floored_inv_sqrt(a00, ridge)
        self.whitened = self.design @ self.inv_sqrt

    def whiten(self, y_new) -> np.ndarray:
        return design_matrix(self.basis, y_new) @ self.inv_sqrt


@dataclass
class McEstimate:
    """Fitted squared maximum correlation and its transformation pair."""

    lambda_hat: float
    rho_hat: float
    alpha_hat: np.ndarray
    eta_hat: np.ndarray
    basis_y: SplineBasis
    basis_x: SplineBasis
    dmat: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict)


def _pair_core(yside: YSide, x: np.ndarray, spec_x: SplineSpec, ridge: float,
               sorted_x=None):
    """Fit one predictor against a prepared response side.

    Returns (lam, u, eta, bm, basis_x, cond_x, floored_x); raises
    SingularGram when the predictor-side Gram cannot be inverted.
    """
    if sorted_x is not None:
        basis_x = basis_from_sorted(sorted_x, spec_x)
    else:
        basis_x = build_basis(x, spec_x)
    bx = design_matrix(basis_x, x)
    z = _helmert_rows(spec_x.dim)
    status, lam, u, eta, bm, cond_x, nfx = mc_core_kernel(
        yside.whitened, bx, spec_x.num_knots, z, ridge
    )
    if status != 0:
        raise SingularGram("predictor-side Gram singular after regularization")
    return lam, u, eta, bm, basis_x, cond_x, nfx


def estimate_mc(x, y, spec_x: SplineSpec, spec_y: SplineSpec,
                ridge: float = DEFAULT_RIDGE) -> McEstimate:
    """Estimate the squared maximum correlation of (x, y) in spline spaces.

    Each side gets its own basis with knots from its own sample quantiles.
    The returned ``lambda_hat`` is the top eigenvalue (clipped at zero),
    ``rho_hat`` its square root clipped to [0, 1]; the raw eigenvalue and
    conditioning details live in ``diagnostics``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise ValueError("x and y must have the same length")
    n = x.shape[0]
    if n < max(spec_x.dim, spec_y.dim) + 2:
        raise TooFewSamples(
            f"need n >= {max(spec_x.dim, spec_y.dim) + 2}, got {n}"
        )
    yside = YSide(y, spec_y, ridge)
    lam, u, eta, bm, basis_x, cond_x, nfx = _pair_core(yside, x, spec_x, ridge)
    alpha = yside.inv_sqrt @ u
    z = _helmert_rows(spec_x.dim)
    dmat = z / (spec_x.num_knots * np.maximum(bm, _BM_FLOOR))
    lambda_hat = max(float(lam), 0.0)
    diagnostics = {
        "lambda_raw": float(lam),
        "cond_yy": yside.cond,
        "cond_xx": cond_x,
        "floored_yy": yside.n_floored,
        "floored_xx": nfx,
        "ridge": ridge,
        "backend": backend(),
    }
    return McEstimate(
        lambda_hat=lambda_hat,
        rho_hat=float(np.sqrt(min(lambda_hat, 1.0))),
        alpha_hat=alpha,
        eta_hat=np.asarray(eta),
        basis_y=yside.basis,
        basis_x=basis_x,
        dmat=dmat,
        diagnostics=diagnostics,
    )


def transform_y(est: McEstimate, y):
    """Fitted response transformation; mean ~0, second moment ~1 in-sample."""
    arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    out = design_matrix(est.basis_y, arr) @ est.alpha_hat
    return out if np.ndim(y) else float(out[0])


def transform_x(est: McEstimate, x):
    """Fitted predictor transformation; mean ~0 in-sample by construction."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    psi = design_matrix(est.basis_x, arr) @ est.dmat.T
    out = psi @ est.eta_hat
    return out if np.ndim(x) else float(out[0])
