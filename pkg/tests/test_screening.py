import numpy as np
import pytest

from mcscreen.baselines import ScoreKind
from mcscreen.bspline import SplineSpec
from mcscreen.errors import (
    AllColumnsDegenerate,
    DegenerateInput,
    EmptyDataset,
    InvalidDims,
    InvalidSize,
)
from mcscreen.screening import (
    Dataset,
    model_size_defaults,
    screen,
    select_by_size,
    select_by_threshold,
)

ALL_KINDS = list(ScoreKind)


def make_data(seed=0, n=120, p=6):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = x[:, 0] * np.exp(x[:, 1]) + 0.5 * rng.standard_normal(n)
    return Dataset(y=y, x=x)


class TestDataset:
    def test_rejects_non_finite(self):
        x = np.ones((30, 2))
        x[3, 1] = np.nan
        with pytest.raises(DegenerateInput):
            Dataset(y=np.arange(30.0), x=x)

    def test_rejects_empty(self):
        with pytest.raises(EmptyDataset):
            Dataset(y=np.empty(0), x=np.empty((0, 3)))

    def test_rejects_row_mismatch(self):
        with pytest.raises(InvalidDims):
            Dataset(y=np.arange(10.0), x=np.ones((11, 2)))

    def test_validate_enforces_size_floor(self):
        ds = Dataset(y=np.arange(10.0), x=np.random.default_rng(0).random((10, 2)))
        with pytest.raises(InvalidDims):
            ds.validate()

    def test_names(self):
        ds = Dataset(y=np.arange(25.0),
                     x=np.random.default_rng(1).random((25, 2)),
                     column_names=["a", "b"])
        assert ds.name(1) == "b"
        ds2 = Dataset(y=np.arange(25.0),
                      x=np.random.default_rng(1).random((25, 2)))
        assert ds2.name(1) == "x2"


class TestScreen:
    def test_single_column(self):
        rng = np.random.default_rng(2)
        ds = Dataset(y=rng.random(50), x=rng.random((50, 1)))
        for kind in ALL_KINDS:
            res = screen(ds, kind)
            assert list(res.ranking) == [0]

    def test_failed_column_scores_zero_with_warning(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((100, 4))
        x[:, 2] = 5.0  # constant
        y = x[:, 0] + 0.1 * rng.standard_normal(100)
        ds = Dataset(y=y, x=x)
        res = screen(ds, ScoreKind.SIS)
        assert res.scores[2] == 0.0
        assert any(j == 2 for j, _ in res.warnings)
        assert res.ranking[-1] == 2 or res.scores[res.ranking[-1]] == 0.0

    def test_all_columns_degenerate(self):
        ds = Dataset(y=np.arange(40.0), x=np.ones((40, 3)))
        with pytest.raises(AllColumnsDegenerate):
            screen(ds, ScoreKind.SIS)

    def test_ranking_deterministic_tiebreak(self):
        # two identical columns: the lower index must rank first
        rng = np.random.default_rng(4)
        col = rng.standard_normal(80)
        x = np.column_stack([col, col, rng.standard_normal(80)])
        y = col + 0.1 * rng.standard_normal(80)
        res = screen(Dataset(y=y, x=x), ScoreKind.SIS)
        assert list(res.ranking[:2]) == [0, 1]

    def test_scale_invariance_of_ranking(self):
        ds = make_data()
        for kind in ALL_KINDS:
            spec = SplineSpec(2, 3)
            base = screen(ds, kind, spec=spec)
            x2 = ds.x.copy()
            x2[:, 1] *= 1000.0
            x2[:, 4] *= 1e-6
            moved = screen(Dataset(y=ds.y, x=x2), kind, spec=spec)
            assert np.array_equal(base.ranking, moved.ranking), kind

    def test_worker_count_equivalence(self):
        ds = make_data(5, n=150, p=12)
        for kind in (ScoreKind.SIS, ScoreKind.MC_SPLINE, ScoreKind.DC_SIS):
            one = screen(ds, kind, workers=1)
            two = screen(ds, kind, workers=3)
            assert np.array_equal(one.ranking, two.ranking)
            assert np.array_equal(one.scores, two.scores)

    def test_mc_spline_finds_symmetric_pair(self):
        rng = np.random.default_rng(6)
        n, p = 300, 30
        x = rng.standard_normal((n, p))
        y = x[:, 3] * np.sin(x[:, 7]) + x[:, 7] * np.sin(x[:, 3])
        res = screen(Dataset(y=y, x=x), ScoreKind.MC_SPLINE,
                     spec=SplineSpec(1, 3))
        assert {3, 7} <= set(int(v) for v in res.ranking[:4])


class TestSelection:
    def test_size_defaults(self):
        assert model_size_defaults(200) == (200, 37)

    def test_select_all(self):
        res = screen(make_data(), ScoreKind.SIS)
        assert set(select_by_size(res, 6)) == set(range(6))

    def test_invalid_sizes(self):
        res = screen(make_data(), ScoreKind.SIS)
        for m in (0, 7, -2):
            with pytest.raises(InvalidSize):
                select_by_size(res, m)

    def test_threshold_above_max_is_empty(self):
        res = screen(make_data(), ScoreKind.SIS)
        assert select_by_threshold(res, res.scores.max() + 1.0).size == 0

    def test_threshold_zero_keeps_everything(self):
        res = screen(make_data(), ScoreKind.SIS)
        assert select_by_threshold(res, 0.0).size == 6

    def test_nesting_monotonicity(self):
        res = screen(make_data(1, n=200, p=10), ScoreKind.DC_SIS)
        for m in range(1, 10):
            small = set(int(v) for v in select_by_size(res, m))
            big = set(int(v) for v in select_by_size(res, m + 1))
            assert small <= big
