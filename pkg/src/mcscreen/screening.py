"""Run a dependence score over every predictor column, rank, select.

Scoring failures on individual columns never abort a screen: the column
scores 0 and the failure is recorded as a warning on the result. Rankings
break score ties by ascending column index, so results are deterministic
and independent of worker scheduling.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ace import AceConfig, ace_mc
from .baselines import ScoreKind, dcor_score, default_nis_spec, nis_score, sis_score
from .bspline import SplineSpec
from .errors import (
    AllColumnsDegenerate,
    DegenerateInput,
    EmptyDataset,
    InvalidDims,
    InvalidSize,
    McScreenError,
)
from .maxcorr import DEFAULT_RIDGE, YSide, _pair_core


@dataclass
class Dataset:
    """Response vector plus an n x p predictor matrix.

    All entries must be finite. ``validate()`` additionally enforces the
    screening-size floor (n >= 20), which parsing alone does not require.
    """

    y: np.ndarray
    x: np.ndarray
    column_names: list | None = None

    def __post_init__(self):
        self.y = np.ascontiguousarray(self.y, dtype=np.float64).ravel()
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 2:
            raise InvalidDims(f"predictor matrix must be 2-d, got ndim={x.ndim}")
        self.x = np.asfortranarray(x)
        if self.y.shape[0] == 0 or self.x.shape[1] == 0:
            raise EmptyDataset("no rows or no predictor columns")
        if self.x.shape[0] != self.y.shape[0]:
            raise InvalidDims(
                f"y has {self.y.shape[0]} rows, x has {self.x.shape[0]}"
            )
        if not np.all(np.isfinite(self.y)) or not np.all(np.isfinite(self.x)):
            raise DegenerateInput("non-finite entries in dataset")
        if self.column_names is not None and len(self.column_names) != self.x.shape[1]:
            raise InvalidDims("column_names length does not match p")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def validate(self) -> "Dataset":
        if self.n < 20:
            raise InvalidDims(f"need n >= 20 for screening, got {self.n}")
        return self

    def column(self, j: int) -> np.ndarray:
        return np.ascontiguousarray(self.x[:, j])

    def name(self, j: int) -> str:
        if self.column_names is not None:
            return str(self.column_names[j])
        return f"x{j + 1}"


@dataclass
class ScreeningResult:
    method: ScoreKind
    scores: np.ndarray
    ranking: np.ndarray
    selected: np.ndarray
    threshold_used: float | None = None
    size_used: int | None = None
    warnings: list = field(default_factory=list)


def model_size_defaults(n: int) -> tuple[int, int]:
    """The two conventional selected-set sizes: n and the integer part of
    n / log(n)."""
    return n, int(n / np.log(n))


def rank_scores(scores: np.ndarray) -> np.ndarray:
    """Indices ordered by descending score, ties broken by ascending index."""
    p = scores.shape[0]
    return np.lexsort((np.arange(p), -scores))


def _make_scorer(method: ScoreKind, data: Dataset, spec, ace_config, ridge):
    n = data.n
    if method is ScoreKind.SIS:
        return lambda col: sis_score(col, data.y)
    if method is ScoreKind.NIS:
        nis_spec = spec if spec is not None else default_nis_spec(n)
        return lambda col: nis_score(col, data.y, nis_spec, ridge)
    if method is ScoreKind.DC_SIS:
        return lambda col: dcor_score(col, data.y)
    if method is ScoreKind.MC_ACE:
        cfg = ace_config if ace_config is not None else AceConfig()
        return lambda col: ace_mc(col, data.y, cfg).rho_hat
    if method is ScoreKind.MC_SPLINE:
        mc_spec = spec if spec is not None else default_nis_spec(n)
        yside = YSide(data.y, mc_spec, ridge)
        return lambda col: max(
            float(_pair_core(yside, col, mc_spec, ridge)[0]), 0.0
        )
    raise ValueError(f"unsupported method {method}")


def screen(
    data: Dataset,
    method: ScoreKind,
    *,
    spec: SplineSpec | None = None,
    ace_config: AceConfig | None = None,
    ridge: float = DEFAULT_RIDGE,
    workers: int = 1,
) -> ScreeningResult:
    """Score every predictor with ``method`` and rank them.

    ``spec`` feeds the spline-based methods (NIS and the spline maximum
    correlation; the same degree and knot count is used on both sides);
    the default is the cubic dimension rule floor(n^(1/5)) + 2.
    """
    data.validate()
    scorer = _make_scorer(method, data, spec, ace_config, ridge)
    p = data.p
    scores = np.zeros(p)
    warnings = []

    def run(j: int):
        try:
            return float(scorer(data.column(j)))
        except McScreenError as exc:
            return (j, f"{type(exc).__name__}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(p)))
    else:
        results = [run(j) for j in range(p)]
    for j, res in enumerate(results):
        if isinstance(res, tuple):
            warnings.append(res)
            scores[j] = 0.0
        else:
            scores[j] = res
    if len(warnings) == p:
        raise AllColumnsDegenerate("every predictor column failed scoring")

    ranking = rank_scores(scores)
    m0 = min(p, max(1, model_size_defaults(data.n)[1]))
    return ScreeningResult(
        method=method,
        scores=scores,
        ranking=ranking,
        selected=ranking[:m0].copy(),
        size_used=m0,
        warnings=warnings,
    )


def select_by_size(result: ScreeningResult, m: int) -> np.ndarray:
    p = result.ranking.shape[0]
    if not 1 <= m <= p:
        raise InvalidSize(f"m must be in [1, {p}], got {m}")
    return result.ranking[:m].copy()


def select_by_threshold(result: ScreeningResult, nu: float) -> np.ndarray:
    keep = result.scores[result.ranking] >= nu
    return result.ranking[keep].copy()
