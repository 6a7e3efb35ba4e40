import numpy as np
import pytest

from mcscreen.errors import InvalidDims
from mcscreen.sim import (
    MODEL_ORDER,
    canonical_model,
    generate,
    mms,
    rsd,
    run_benchmark,
)


def quantile_oracle(v, q):
    """Sorted-array linear interpolation, written against the definition."""
    sv = np.sort(np.asarray(v, dtype=float))
    pos = q * (len(sv) - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, len(sv) - 1)
    frac = pos - lo
    return sv[lo] * (1 - frac) + sv[hi] * frac


class TestGenerate:
    def test_model_names(self):
        assert canonical_model("2.D") == "2d"
        assert canonical_model("1a-s3") == "1a-s3"
        with pytest.raises(InvalidDims):
            canonical_model("9z")

    def test_standard_normal_columns(self):
        ds, active = generate("2a", 5000, 6, 0)
        assert active == frozenset({0, 1, 2, 3})
        assert np.allclose(ds.x.var(axis=0), 1.0, rtol=0.05)
        assert np.allclose(ds.x.mean(axis=0), 0.0, atol=0.06)

    def test_correlated_tail_block_unit_variance(self):
        # the corrected noise scale makes the dependent block variance 1
        ds, active = generate("1a-s3", 5000, 200, 1)
        tail = ds.x[:, -10:]
        assert np.allclose(tail.var(axis=0), 1.0, rtol=0.05)
        lead = ds.x[:, :3]
        cors = [np.corrcoef(lead[:, 0], tail[:, t])[0, 1] for t in range(10)]
        assert min(cors) > 0.1  # the block really is correlated

    def test_printed_tail_form_is_exposed(self):
        # the literal formula has a sign-indefinite radicand; drawing it
        # surfaces non-finite values rather than silently changing the model
        from mcscreen.errors import DegenerateInput

        with pytest.raises(DegenerateInput):
            generate("1a-s12", 400, 100, 2, tail_form="printed")

    def test_cauchy_columns(self):
        ds, active = generate("3d", 5000, 4, 3)
        med = np.median(ds.x, axis=0)
        iqr = np.quantile(ds.x, 0.75, axis=0) - np.quantile(ds.x, 0.25, axis=0)
        assert np.max(np.abs(med)) < 0.1
        assert np.allclose(iqr, 2.0, rtol=0.1)
        assert active == frozenset({0, 1})

    def test_everything_finite_even_under_overflow(self):
        # exp of a large Cauchy draw overflows doubles; the generator clips
        for seed in range(30):
            ds, _ = generate("3d", 300, 10, seed)
            assert np.all(np.isfinite(ds.y))
            assert np.all(np.isfinite(ds.x))

    def test_deterministic(self):
        a, _ = generate("2b", 100, 8, 42)
        b, _ = generate("2b", 100, 8, 42)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.x, b.x)

    def test_dimension_check(self):
        with pytest.raises(InvalidDims):
            generate("2a", 100, 3, 0)

    def test_all_models_generate(self):
        for model in MODEL_ORDER:
            ds, active = generate(model, 60, 24, 5)
            assert ds.n == 60 and ds.p == 24
            assert max(active) < 24


class TestMms:
    def test_worst_active_rank(self):
        ranking = np.array([4, 0, 3, 1, 2])
        # positions: j=0 -> 2, j=1 -> 4
        assert mms(ranking, {0, 1}) == 4

    def test_perfect_screen(self):
        ranking = np.arange(10)
        assert mms(ranking, {0, 1, 2}) == 3

    def test_matches_prefix_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            p = int(rng.integers(3, 30))
            ranking = rng.permutation(p)
            size = int(rng.integers(1, p))
            active = set(int(v) for v in rng.choice(p, size=size, replace=False))
            want = next(
                m for m in range(1, p + 1)
                if active <= set(int(v) for v in ranking[:m])
            )
            assert mms(ranking, active) == want

    def test_active_bounds_checked(self):
        with pytest.raises(InvalidDims):
            mms(np.arange(5), {7})


class TestRsd:
    def test_constant_values(self):
        assert rsd([3, 3, 3, 3]) == 0.0

    def test_known_iqr(self):
        # quartiles 1 and 3.68: IQR = 2.68
        assert rsd([1.0, 1.0, 1.0, 3.68, 3.68, 3.68]) == pytest.approx(2.0)

    def test_matches_quantile_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            v = rng.integers(1, 400, size=int(rng.integers(2, 60))).astype(float)
            want = (quantile_oracle(v, 0.75) - quantile_oracle(v, 0.25)) / 1.34
            assert rsd(v) == pytest.approx(want, abs=1e-12)

    def test_needs_two_values(self):
        with pytest.raises(InvalidDims):
            rsd([5])


class TestBenchmark:
    def test_single_replicate_conventions(self):
        rep = run_benchmark(["2d"], ["sis"], [60], 8, 1, 123)
        cell = rep.cell("sis", "2d", 60)
        assert cell.replicates == 1
        assert cell.rsd == 0.0
        assert cell.median_mms == cell.mean_mms

    def test_identical_seed_identical_report(self):
        a = run_benchmark(["2d", "2c"], ["sis", "dcsis"], [60], 10, 3, 7)
        b = run_benchmark(["2d", "2c"], ["sis", "dcsis"], [60], 10, 3, 7)
        assert a.to_csv() == b.to_csv()
        assert a.to_markdown() == b.to_markdown()

    def test_worker_count_equivalence(self):
        kw = dict(models=["2d"], methods=["sis", "dcsis"], n_list=[60],
                  p=10, replicates=4, seed=11)
        a = run_benchmark(**kw, workers=1)
        b = run_benchmark(**kw, workers=2)
        assert a.to_csv() == b.to_csv()

    def test_csv_header(self):
        rep = run_benchmark(["2c"], ["sis"], [60], 8, 2, 5)
        first = rep.to_csv().splitlines()[0]
        assert first == "method,model,n,p,replicates,median_mms,rsd,mean_mms"

    def test_markdown_mentions_every_method(self):
        rep = run_benchmark(["2c"], ["sis", "dcsis"], [60], 8, 2, 5)
        md = rep.to_markdown()
        assert "sis" in md and "dcsis" in md

    def test_dcsis_separates_exponential_pair(self):
        hits_top2 = 0
        sis_ranks = []
        dc_ranks = []
        for seed in range(50):
            from mcscreen.screening import screen
            from mcscreen.baselines import ScoreKind

            ds, active = generate("2d", 300, 200, 80_000 + seed)
            dc = screen(ds, ScoreKind.DC_SIS)
            si = screen(ds, ScoreKind.SIS)
            hits_top2 += set(int(v) for v in dc.ranking[:2]) == {0, 1}
            dc_ranks.append(mms(dc.ranking, active))
            sis_ranks.append(mms(si.ranking, active))
        assert hits_top2 >= 45  # 0.9 * 50
        assert np.median(sis_ranks) > np.median(dc_ranks)
