"""Three-step data-driven choice of spline degree and knot count.

Step 1 scores every predictor with linear splines at each candidate knot
count, fits a two-component Gaussian mixture to each score vector, picks
the knot count by the gap between the mixture means, and keeps the top b1
predictors. Steps 2 and 3 switch to a per-variable scheme: each surviving
predictor gets its own (degree, knots) chosen by cross-validated held-out
correlation of the fitted transformation pair, is re-scored on the full
sample, and the top b2 (then b3) survive.

The kept sets are nested, and with a fixed seed the whole pipeline is
deterministic regardless of worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import _BM_FLOOR, mc_core_kernel, pearson_kernel
from .bspline import (
    SplineSpec,
    basis_from_parts,
    design_matrix,
    interior_knots_from_sorted,
)
from .errors import DegenerateInput, McScreenError, TooFewSamples
from .maxcorr import DEFAULT_RIDGE, YSide, _helmert_rows, _pair_core
from .screening import Dataset, rank_scores

KNOT_RULES = ("min-gap", "max-gap")
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class TuningConfig:
    k_min: int = 3
    k_max: int = 6
    b1: int = 200
    b2: int = 50
    b3: int | None = None
    folds: int = 10

    def __post_init__(self):
        if self.k_min < 1 or self.k_min > self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.b1 < self.b2 or self.b2 < 1:
            raise ValueError("need b1 >= b2 >= 1")
        if self.b3 is not None and (self.b3 > self.b2 or self.b3 < 1):
            raise ValueError("need b2 >= b3 >= 1")
        if self.folds < 2:
            raise ValueError("need folds >= 2")

    def resolve_b3(self, n: int) -> int:
        if self.b3 is not None:
            return self.b3
        return max(1, min(self.b2, int(n / np.log(n))))


# ---------------------------------------------------------------------------
# Two-component Gaussian mixture by EM
# ---------------------------------------------------------------------------

@dataclass
class MixtureFit:
    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    weight: float
    loglik: float
    iterations: int
    loglik_history: np.ndarray = field(repr=False, default=None)

    @property
    def gap(self) -> float:
        return abs(self.mu2 - self.mu1)


def _em_run(s, low_mask, var_floor, max_iter, tol):
    n = s.shape[0]
    mu = np.array([s[low_mask].mean(), s[~low_mask].mean()])
    var = np.maximum(
        np.array([s[low_mask].var(), s[~low_mask].var()]), var_floor
    )
    w = np.array([low_mask.mean(), 1.0 - low_mask.mean()])
    w = np.clip(w, 1e-10, 1.0 - 1e-10)
    history = []
    prev = -np.inf
    for _ in range(max_iter):
        logp = (
            -0.5 * ((s[:, None] - mu) ** 2 / var + np.log(2.0 * np.pi * var))
            + np.log(w)
        )
        top = logp.max(axis=1, keepdims=True)
        lse = top + np.log(np.exp(logp - top).sum(axis=1, keepdims=True))
        ll = float(lse.sum())
        if ll < prev:
            # a floored variance update can stall EM; keep the history monotone
            break
        history.append(ll)
        resp = np.exp(logp - lse)
        nk = np.maximum(resp.sum(axis=0), 1e-10)
        w = np.clip(nk / n, 1e-10, 1.0 - 1e-10)
        mu = (resp * s[:, None]).sum(axis=0) / nk
        var = np.maximum(
            (resp * (s[:, None] - mu) ** 2).sum(axis=0) / nk, var_floor
        )
        if ll - prev < tol:
            break
        prev = ll
    order = np.argsort(mu)
    return MixtureFit(
        mu1=float(mu[order[0]]),
        mu2=float(mu[order[1]]),
        sigma1=float(np.sqrt(var[order[0]])),
        sigma2=float(np.sqrt(var[order[1]])),
        weight=float(w[order[0]]),
        loglik=history[-1] if history else -np.inf,
        iterations=len(history),
        loglik_history=np.asarray(history),
    )


def fit_mixture2(scores, max_iter: int = 200, tol: float = 1e-8) -> MixtureFit:
    """EM fit of a two-component Gaussian mixture.

    Initialization splits the scores at several quantiles and keeps the
    restart with the best final log-likelihood; that makes the fit a pure
    function of the score multiset, invariant to input order. Component
    variances are floored at 1e-8 times the overall variance so a cluster
    cannot collapse onto a single point.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    s = s[np.isfinite(s)]
    if s.shape[0] < 10:
        raise DegenerateInput(f"need >= 10 finite scores, got {s.shape[0]}")
    var = float(np.var(s))
    if var <= 0.0:
        raise DegenerateInput("scores have zero spread")
    var_floor = 1e-8 * var
    best = None
    for q in (0.3, 0.4, 0.5, 0.6, 0.7):
        cut = np.quantile(s, q)
        low = s <= cut
        if low.all() or not low.any():
            continue
        fit = _em_run(s, low, var_floor, max_iter, tol)
        if best is None or fit.loglik > best.loglik:
            best = fit
    if best is None:
        # every quantile split was one-sided (massive ties): split sorted halves
        low = np.zeros(s.shape[0], dtype=bool)
        low[np.argsort(s, kind="stable")[: s.shape[0] // 2]] = True
        best = _em_run(s, low, var_floor, max_iter, tol)
    return best


def choose_k(gaps: dict, rule: str = "min-gap") -> int:
    """Pick a knot count from {k: gap} by the configured rule; ties go to
    the smaller k."""
    if rule not in KNOT_RULES:
        raise ValueError(f"rule must be one of {KNOT_RULES}")
    items = sorted(gaps.items())
    values = np.array([g for _, g in items])
    if rule == "min-gap":
        idx = int(np.argmin(values))
    else:
        idx = int(np.argmax(values))
    return items[idx][0]


# ---------------------------------------------------------------------------
# Step 1: unified linear-spline screen with mixture-based knot choice
# ---------------------------------------------------------------------------

@dataclass
class Step1Result:
    k_tilde: int
    kept: np.ndarray
    scores: np.ndarray
    gaps: dict
    failures: list = field(default_factory=list)


def _map_indexed(fn, count: int, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(j) for j in range(count)]


def step1_unified(
    data: Dataset,
    cfg: TuningConfig,
    *,
    knot_rule: str = "min-gap",
    ridge: float = DEFAULT_RIDGE,
    workers: int = 1,
) -> Step1Result:
    """Unified screen with degree-1 splines over the candidate knot counts.

    Predictors whose estimate fails score 0 and are excluded from the
    mixture fit. When p < b1 the whole index set is kept.
    """
    data.validate()
    p = data.p
    b1 = min(cfg.b1, p)
    per_k = {}
    gaps = {}
    failures = []
    sorted_cols = np.sort(data.x, axis=0)
    for k in range(cfg.k_min, cfg.k_max + 1):
        spec = SplineSpec(1, k)
        scores = np.zeros(p)
        failed = np.zeros(p, dtype=bool)
        try:
            yside = YSide(data.y, spec, ridge)
        except McScreenError as exc:
            failures.append((k, -1, f"{type(exc).__name__}: {exc}"))
            per_k[k] = scores
            gaps[k] = 0.0
            continue

        def one(j):
            try:
                lam = _pair_core(
                    yside, data.column(j), spec, ridge,
                    sorted_x=np.ascontiguousarray(sorted_cols[:, j]),
                )[0]
                return max(float(lam), 0.0)
            except McScreenError as exc:
                return (j, f"{type(exc).__name__}: {exc}")

        for j, res in enumerate(_map_indexed(one, p, workers)):
            if isinstance(res, tuple):
                failed[j] = True
                failures.append((k, j, res[1]))
            else:
                scores[j] = res
        per_k[k] = scores
        try:
            gaps[k] = fit_mixture2(scores[~failed]).gap
        except DegenerateInput:
            gaps[k] = 0.0
    k_tilde = choose_k(gaps, knot_rule)
    scores = per_k[k_tilde]
    kept = rank_scores(scores)[:b1]
    return Step1Result(
        k_tilde=k_tilde, kept=kept, scores=scores, gaps=gaps, failures=failures
    )


# ---------------------------------------------------------------------------
# Cross-validated per-variable (degree, knots) selection
# ---------------------------------------------------------------------------

def _corr_or_zero(a: np.ndarray, b: np.ndarray) -> float:
    return float(pearson_kernel(np.ascontiguousarray(a),
                                np.ascontiguousarray(b)))


class _CvContext:
    """Fold layout plus response-side fits, shared across all predictors.

    Fold assignment is contiguous blocks of a seeded shuffle. For every
    (fold, degree, knots) cell the response-side basis, whitened training
    design and whitened held-out design are precomputed once. Scoring a
    predictor then sorts its training column once per fold and reuses that
    across the whole grid.
    """

    def __init__(self, y, degrees, ks, folds, seed, ridge):
        y = np.ascontiguousarray(y, dtype=np.float64).ravel()
        n = y.shape[0]
        self.degrees = tuple(sorted(degrees))
        self.ks = list(ks)
        self.ridge = ridge
        max_dim = max(self.degrees) + max(self.ks)
        if n < folds * (max_dim + 2):
            raise TooFewSamples(
                f"need n >= {folds * (max_dim + 2)} for {folds}-fold CV, got {n}"
            )
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        edges = np.linspace(0, n, folds + 1).astype(int)
        self.test_idx = [perm[edges[i]: edges[i + 1]] for i in range(folds)]
        self.train_idx = [
            np.concatenate([perm[: edges[i]], perm[edges[i + 1]:]])
            for i in range(folds)
        ]
        self.cells = [(l, k) for l in self.degrees for k in self.ks]
        self.specs = {(l, k): SplineSpec(l, k) for (l, k) in self.cells}
        self.y = y
        self.ysides = {}
        for fi in range(folds):
            y_tr = y[self.train_idx[fi]]
            y_te = y[self.test_idx[fi]]
            ys = np.sort(y_tr)
            for (l, k) in self.cells:
                try:
                    yside = YSide(y_tr, self.specs[(l, k)], ridge,
                                  sorted_values=ys)
                    self.ysides[(fi, l, k)] = (yside, yside.whiten(y_te))
                except McScreenError:
                    self.ysides[(fi, l, k)] = None

    def cv_scores(self, x: np.ndarray) -> dict:
        """Mean held-out correlation of the transformation pair per cell."""
        totals = {cell: 0.0 for cell in self.cells}
        nf = len(self.test_idx)
        for fi in range(nf):
            x_tr = np.ascontiguousarray(x[self.train_idx[fi]])
            x_te = x[self.test_idx[fi]]
            xs = np.sort(x_tr)
            knots_by_k = {}
            for cell in self.cells:
                prep = self.ysides[(fi,) + cell]
                if prep is None:
                    continue
                yside, wy_te = prep
                spec = self.specs[cell]
                if xs.shape[0] < spec.dim + 1:
                    continue
                try:
                    if cell[1] not in knots_by_k:
                        knots_by_k[cell[1]] = interior_knots_from_sorted(
                            xs, cell[1], spec.placement
                        )
                    interior, fb = knots_by_k[cell[1]]
                    basis_x = basis_from_parts(
                        float(xs[0]), float(xs[-1]), interior, spec, fb
                    )
                except McScreenError:
                    continue
                bx = design_matrix(basis_x, x_tr)
                z = _helmert_rows(spec.dim)
                status, lam, u, eta, bm, _, _ = mc_core_kernel(
                    yside.whitened, bx, spec.num_knots, z, self.ridge
                )
                if status != 0:
                    continue
                theta_te = wy_te @ u
                coef = (z / (spec.num_knots * np.maximum(bm, _BM_FLOOR))).T @ eta
                phi_te = design_matrix(basis_x, x_te) @ coef
                totals[cell] += _corr_or_zero(theta_te, phi_te)
        return {cell: totals[cell] / nf for cell in self.cells}

    def select(self, x: np.ndarray):
        """Grid cell with the best mean CV score; near-ties (within 1e-9)
        resolve to the smaller dimension, then the smaller degree."""
        scores = self.cv_scores(x)
        best = max(scores.values())
        candidates = [
            (l + k, l, k)
            for (l, k), sc in scores.items()
            if sc >= best - _TIE_TOL
        ]
        _, l_sel, k_sel = min(candidates)
        return l_sel, k_sel, scores


def cv_select(x, y, degrees, k_range, folds: int, seed: int = 0,
              ridge: float = DEFAULT_RIDGE):
    """Pick (degree, knots) for one pair by M-fold cross validation."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    ctx = _CvContext(y, degrees, list(k_range), folds, seed, ridge)
    l_sel, k_sel, _ = ctx.select(x)
    return l_sel, k_sel


# ---------------------------------------------------------------------------
# Steps 2 and 3: separate scheme plus full-sample re-ranking
# ---------------------------------------------------------------------------

@dataclass
class StepResult:
    kept: np.ndarray
    scores: dict
    chosen: dict
    failures: list = field(default_factory=list)


def _separate_step(data, kept_in, degrees, cfg, keep, seed, ridge, workers):
    kept_in = np.asarray(kept_in, dtype=int)
    ks = list(range(cfg.k_min, cfg.k_max + 1))
    ctx = _CvContext(data.y, degrees, ks, cfg.folds, seed, ridge)
    full_ysides = {}
    for l in degrees:
        for k in ks:
            spec = SplineSpec(l, k)
            try:
                full_ysides[(l, k)] = YSide(data.y, spec, ridge)
            except McScreenError:
                full_ysides[(l, k)] = None

    def one(i):
        j = int(kept_in[i])
        col = data.column(j)
        try:
            l_sel, k_sel, _ = ctx.select(col)
            yside = full_ysides[(l_sel, k_sel)]
            if yside is None:
                raise DegenerateInput("response side failed for selected cell")
            lam = _pair_core(yside, col, SplineSpec(l_sel, k_sel), ridge)[0]
            return max(float(lam), 0.0), (l_sel, k_sel), None
        except McScreenError as exc:
            return 0.0, None, f"{type(exc).__name__}: {exc}"

    results = _map_indexed(one, kept_in.shape[0], workers)
    lams = np.array([r[0] for r in results])
    chosen = {int(kept_in[i]): results[i][1] for i in range(kept_in.shape[0])}
    failures = [
        (int(kept_in[i]), results[i][2])
        for i in range(kept_in.shape[0])
        if results[i][2] is not None
    ]
    order = np.lexsort((kept_in, -lams))
    kept_out = kept_in[order][: min(keep, kept_in.shape[0])]
    scores = {int(kept_in[i]): float(lams[i]) for i in range(kept_in.shape[0])}
    return StepResult(kept=kept_out, scores=scores, chosen=chosen,
                      failures=failures)


def step2_separate(data: Dataset, kept, cfg: TuningConfig, *, seed: int = 0,
                   ridge: float = DEFAULT_RIDGE, workers: int = 1) -> StepResult:
    """Per-variable CV over degrees {1, 2}, re-rank, keep the top b2."""
    return _separate_step(data, kept, (1, 2), cfg, cfg.b2, seed, ridge, workers)


def step3_separate(data: Dataset, kept, cfg: TuningConfig, *, seed: int = 0,
                   ridge: float = DEFAULT_RIDGE, workers: int = 1) -> StepResult:
    """Per-variable CV over degrees {1, 2, 3}, re-rank, keep the top b3."""
    return _separate_step(
        data, kept, (1, 2, 3), cfg, cfg.resolve_b3(data.n), seed, ridge, workers
    )


@dataclass
class TunedScreenResult:
    ranking: np.ndarray
    step1: Step1Result
    step2: StepResult
    step3: StepResult
    config: TuningConfig


def tuned_screen(
    data: Dataset,
    cfg: TuningConfig = TuningConfig(),
    *,
    seed: int = 0,
    knot_rule: str = "min-gap",
    ridge: float = DEFAULT_RIDGE,
    workers: int = 1,
) -> TunedScreenResult:
    """Full three-step pipeline with a total ranking of all p predictors.

    The ranking lists the step-3 survivors first (in step-3 score order),
    then the step-2 survivors dropped at step 3 (step-2 order), then
    everything else by step-1 score. Minimum-model-size metrics read
    positions straight off this ranking.
    """
    s1 = step1_unified(data, cfg, knot_rule=knot_rule, ridge=ridge,
                       workers=workers)
    s2 = step2_separate(data, s1.kept, cfg, seed=seed, ridge=ridge,
                        workers=workers)
    s3 = step3_separate(data, s2.kept, cfg, seed=seed, ridge=ridge,
                        workers=workers)
    head = list(int(j) for j in s3.kept)
    in_head = set(head)
    mid = [int(j) for j in s2.kept if int(j) not in in_head]
    seen = in_head | set(mid)
    tail = [int(j) for j in rank_scores(s1.scores) if int(j) not in seen]
    ranking = np.array(head + mid + tail, dtype=int)
    return TunedScreenResult(ranking=ranking, step1=s1, step2=s2, step3=s3,
                             config=cfg)
