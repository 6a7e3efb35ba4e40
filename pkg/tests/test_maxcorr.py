import numpy as np
import pytest

import frozen
from mcscreen._kernels import mc_core_kernel
from mcscreen.bspline import SplineSpec, build_basis, design_matrix
from mcscreen.errors import TooFewSamples
from mcscreen.maxcorr import (
    YSide,
    contrast_set,
    estimate_mc,
    transform_x,
    transform_y,
)


def gaussian_pair(rho, n, seed):
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    return z1, rho * z1 + np.sqrt(1.0 - rho * rho) * z2


def oracle_lambda(x, y, spec_x, spec_y):
    """Sandwich-matrix top eigenvalue assembled with plain inverses and a
    full eigendecomposition; shares nothing with the production path."""
    n = len(x)
    by = design_matrix(build_basis(y, spec_y), y)
    bx = design_matrix(build_basis(x, spec_x), x)
    d = spec_x.dim
    z = np.zeros((d - 1, d))
    for i in range(1, d):
        z[i - 1, :i] = 1.0
        z[i - 1, i] = -i
        z[i - 1] /= np.linalg.norm(z[i - 1])
    bm = bx.mean(axis=0)
    psi = bx @ (z / (spec_x.num_knots * bm)).T
    a00 = by.T @ by / n
    axx = psi.T @ psi / n
    ax0 = psi.T @ by / n
    w, v = np.linalg.eigh(a00)
    a00_is = v @ np.diag(w**-0.5) @ v.T
    m = a00_is @ ax0.T @ np.linalg.inv(axx) @ ax0 @ a00_is
    return float(np.max(np.linalg.eigvalsh(0.5 * (m + m.T))))


class TestContrasts:
    def test_two_dims(self):
        rows = contrast_set(2).rows
        assert np.allclose(rows, [[1 / np.sqrt(2), -1 / np.sqrt(2)]])

    def test_three_dims(self):
        rows = contrast_set(3).rows
        expect = np.array([
            [1 / np.sqrt(2), -1 / np.sqrt(2), 0.0],
            [1 / np.sqrt(6), 1 / np.sqrt(6), -2 / np.sqrt(6)],
        ])
        assert np.allclose(rows, expect, atol=1e-12)

    @pytest.mark.parametrize("d", range(2, 13))
    def test_orthonormal_and_mean_free(self, d):
        rows = contrast_set(d).rows
        assert np.max(np.abs(rows @ np.ones(d))) < 1e-12
        assert np.max(np.abs(rows @ rows.T - np.eye(d - 1))) < 1e-12


class TestEstimate:
    def test_identity_gives_one(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, 500)
        spec = SplineSpec(2, 4)
        est = estimate_mc(x, x, spec, spec)
        assert est.lambda_hat == pytest.approx(1.0, abs=1e-8)
        assert est.rho_hat == pytest.approx(1.0, abs=1e-8)

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            estimate_mc(np.arange(6.0), np.arange(6.0), SplineSpec(2, 3),
                        SplineSpec(2, 3))

    def test_matches_full_eigendecomposition_oracle(self):
        # several shapes with d_n <= 8
        cases = [
            (SplineSpec(1, 3), SplineSpec(1, 3), 0),
            (SplineSpec(2, 4), SplineSpec(2, 4), 1),
            (SplineSpec(3, 5), SplineSpec(1, 4), 2),
            (SplineSpec(2, 6), SplineSpec(3, 3), 3),
        ]
        for spec_x, spec_y, seed in cases:
            x, y = gaussian_pair(0.6, 400, seed)
            est = estimate_mc(x, y, spec_x, spec_y)
            want = oracle_lambda(x, y, spec_x, spec_y)
            assert est.lambda_hat == pytest.approx(want, abs=1e-10)

    def test_symmetrized_matrix_is_psd(self):
        x, y = gaussian_pair(0.4, 300, 4)
        spec = SplineSpec(2, 4)
        n = len(x)
        by = design_matrix(build_basis(y, spec), y)
        bx = design_matrix(build_basis(x, spec), x)
        from mcscreen.maxcorr import _helmert_rows

        z = _helmert_rows(spec.dim)
        psi = bx @ (z / (spec.num_knots * bx.mean(axis=0))).T
        a00 = by.T @ by / n
        axx = psi.T @ psi / n
        ax0 = psi.T @ by / n
        w, v = np.linalg.eigh(a00)
        a00_is = v @ np.diag(w**-0.5) @ v.T
        m = a00_is @ ax0.T @ np.linalg.inv(axx) @ ax0 @ a00_is
        evals = np.linalg.eigvalsh(0.5 * (m + m.T))
        assert evals.min() >= -1e-10

    def test_affine_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(400)
        y = np.sin(x) + 0.3 * rng.standard_normal(400)
        spec = SplineSpec(2, 4)
        base = estimate_mc(x, y, spec, spec).lambda_hat
        moved = estimate_mc(3.0 * x + 7.0, 0.2 * y - 5.0, spec, spec).lambda_hat
        assert moved == pytest.approx(base, abs=1e-10)

    def test_contrast_choice_does_not_matter(self):
        # any orthonormal completion of the mean direction spans the same
        # space, so the eigenvalue cannot depend on it
        x, y = gaussian_pair(0.5, 350, 6)
        spec = SplineSpec(2, 3)
        yside = YSide(y, spec)
        bx = design_matrix(build_basis(x, spec), x)
        from mcscreen.maxcorr import _helmert_rows

        z1 = np.ascontiguousarray(_helmert_rows(spec.dim))
        lam1 = mc_core_kernel(yside.whitened, bx, spec.num_knots, z1, 1e-8)[1]
        rng = np.random.default_rng(99)
        raw = np.column_stack([np.ones(spec.dim), rng.standard_normal((spec.dim, spec.dim - 1))])
        q, _ = np.linalg.qr(raw)
        z2 = np.ascontiguousarray(q[:, 1:].T)
        lam2 = mc_core_kernel(yside.whitened, bx, spec.num_knots, z2, 1e-8)[1]
        assert lam2 == pytest.approx(lam1, abs=1e-10)

    def test_knot_count_scale_cancels(self):
        # the 1/k factor rescales the predictor transformation uniformly
        x, y = gaussian_pair(0.5, 350, 7)
        spec = SplineSpec(1, 4)
        yside = YSide(y, spec)
        bx = design_matrix(build_basis(x, spec), x)
        from mcscreen.maxcorr import _helmert_rows

        z = np.ascontiguousarray(_helmert_rows(spec.dim))
        with_k = mc_core_kernel(yside.whitened, bx, spec.num_knots, z, 1e-8)[1]
        without_k = mc_core_kernel(yside.whitened, bx, 1, z, 1e-8)[1]
        assert without_k == pytest.approx(with_k, abs=1e-10)

    def test_richer_basis_never_hurts_deterministic_fit(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(500)
        y = x**2
        small = estimate_mc(x, y, SplineSpec(1, 1), SplineSpec(1, 1)).lambda_hat
        large = estimate_mc(x, y, SplineSpec(2, 4), SplineSpec(2, 4)).lambda_hat
        assert large >= small - 1e-10

    def test_swap_agreement_on_gaussian_pairs(self):
        spec = SplineSpec(2, 4)
        for seed in range(5):
            x, y = gaussian_pair(0.5, 2000, 50_000 + seed)
            a = estimate_mc(x, y, spec, spec).lambda_hat
            b = estimate_mc(y, x, spec, spec).lambda_hat
            assert abs(a - b) < 0.02

    def test_null_level_uniform_pairs(self):
        spec = SplineSpec(1, 3)
        vals = []
        for seed in range(200):
            rng = np.random.default_rng(seed)
            x = rng.uniform(0, 1, 2000)
            y = rng.uniform(0, 1, 2000)
            vals.append(estimate_mc(x, y, spec, spec).lambda_hat)
        mean = float(np.mean(vals))
        assert mean < 0.02
        assert mean == pytest.approx(frozen.MC_NULL_UNIFORM_MEAN, abs=1e-3)
        assert float(np.std(vals)) == pytest.approx(
            frozen.MC_NULL_UNIFORM_SD, abs=5e-4)

    def test_gaussian_rho_recovered(self):
        spec = SplineSpec(2, 4)
        for seed in range(8):
            x, y = gaussian_pair(0.5, 2000, 40_000 + seed)
            est = estimate_mc(x, y, spec, spec)
            assert abs(est.rho_hat - 0.5) < 0.07


class TestTransforms:
    def setup_method(self):
        rng = np.random.default_rng(9)
        self.x = rng.standard_normal(600)
        self.y = np.tanh(self.x) + 0.4 * rng.standard_normal(600)
        spec = SplineSpec(2, 4)
        self.est = estimate_mc(self.x, self.y, spec, spec)

    def test_response_side_moments(self):
        th = transform_y(self.est, self.y)
        assert abs(th.mean()) < 1e-8
        assert np.mean(th**2) == pytest.approx(1.0, abs=1e-8)

    def test_predictor_side_mean_zero(self):
        ph = transform_x(self.est, self.x)
        assert abs(ph.mean()) < 1e-8

    def test_training_correlation_equals_sqrt_lambda(self):
        th = transform_y(self.est, self.y)
        ph = transform_x(self.est, self.x)
        got = np.corrcoef(th, ph)[0, 1]
        assert got == pytest.approx(np.sqrt(self.est.lambda_hat), abs=1e-6)

    def test_min_error_identity(self):
        th = transform_y(self.est, self.y)
        ph = transform_x(self.est, self.x)
        assert np.mean((th - ph) ** 2) == pytest.approx(
            1.0 - self.est.lambda_hat, abs=1e-8)

    def test_scalar_round_trip(self):
        v = transform_y(self.est, float(self.y[0]))
        assert isinstance(v, float)
        assert v == pytest.approx(transform_y(self.est, self.y)[0], abs=1e-12)
