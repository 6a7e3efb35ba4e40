"""Simulation models, screening metrics and the benchmark harness.

Model catalogue (zero-based active sets in code, labels use the usual
one-based convention):

  1a-s{3,6,12}  y = sum_{j<=s} (+1,-1,...)_j x_j + e, e ~ N(0, sd sqrt(3));
                x_j iid N(0,1) except the last floor(p/20) columns, which
                load on the active block: x_k = sum_j x_j (-1)^(j+1) / 5
                plus noise scaled so Var(x_k) = 1.
  1b            y = x1 + x2 + x3 + e, with x2 = x1^3 / 3 + N(0,1).
  2a            y = x1 x2 + x3 x4 + e          active {1,2,3,4}
  2b            y = x1^2 + x2^3 + x3^2 x4 + e  active {1,2,3,4}
  2c            y = x1 sin(x2) + x2 sin(x1) + e
  2d            y = x1 exp(x2) + e
  2e            y = x1 log|c0 + x2| + e
  2f            y = x1 / (c0 + x2) + e         c0 = 1e-4, all x iid N(0,1)
  3a..3f        the 2a..2f formulas with the error term removed and x drawn
                iid from standard Cauchy.

Generated values are clipped to +-1e150 so that downstream squared sums
stay inside double range even when a Cauchy draw overflows exp().
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import ScoreKind
from .errors import InvalidDims
from .maxcorr import DEFAULT_RIDGE
from .screening import Dataset, ScreeningResult, screen
from .tuning import TuningConfig, tuned_screen

_C0 = 1e-4
_CLIP = 1e150

MODEL_ORDER = (
    "1a-s3", "1a-s6", "1a-s12", "1b",
    "2a", "2b", "2c", "2d", "2e", "2f",
    "3a", "3b", "3c", "3d", "3e", "3f",
)

TAIL_FORMS = ("corrected", "printed")


def canonical_model(model: str) -> str:
    tag = model.strip().lower().replace(".", "").replace("_", "-")
    if tag in ("1a-s3", "1as3"):
        tag = "1a-s3"
    if tag in ("1as6",):
        tag = "1a-s6"
    if tag in ("1as12",):
        tag = "1a-s12"
    if tag not in MODEL_ORDER:
        raise InvalidDims(f"unknown model {model!r}; known: {MODEL_ORDER}")
    return tag


def _model_code(model: str) -> int:
    return MODEL_ORDER.index(canonical_model(model))


def _example2_response(x: np.ndarray, eps, tag: str) -> np.ndarray:
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if tag == "a":
            y = x[:, 0] * x[:, 1] + x[:, 2] * x[:, 3]
        elif tag == "b":
            y = x[:, 0] ** 2 + x[:, 1] ** 3 + x[:, 2] ** 2 * x[:, 3]
        elif tag == "c":
            y = x[:, 0] * np.sin(x[:, 1]) + x[:, 1] * np.sin(x[:, 0])
        elif tag == "d":
            y = x[:, 0] * np.exp(x[:, 1])
        elif tag == "e":
            y = x[:, 0] * np.log(np.abs(_C0 + x[:, 1]))
        else:
            y = x[:, 0] / (_C0 + x[:, 1])
    return y + eps


def generate(model: str, n: int, p: int, seed,
             tail_form: str = "corrected"):
    """Draw one dataset; returns (Dataset, active index frozenset).

    ``seed`` may be an int or a numpy SeedSequence. ``tail_form`` switches
    the correlated-tail noise of model family 1a between the
    variance-corrected reading (default) and the literal printed formula,
    whose radicand can go negative.
    """
    tag = canonical_model(model)
    if tail_form not in TAIL_FORMS:
        raise ValueError(f"tail_form must be one of {TAIL_FORMS}")
    rng = np.random.default_rng(seed)

    if tag.startswith("1a"):
        s = int(tag.split("-s")[1])
        if p < s:
            raise InvalidDims(f"model {tag} needs p >= {s}")
        x = rng.standard_normal((n, p))
        signs = (-1.0) ** np.arange(s)  # +1, -1, ... on the active block
        tail = p // 20
        if tail > 0:
            combo = x[:, :s] @ (signs / 5.0)
            ek = rng.standard_normal((n, tail))
            if tail_form == "corrected":
                noise = np.sqrt(1.0 - s / 25.0) * ek
            else:
                with np.errstate(invalid="ignore"):
                    noise = np.sqrt(1.0 - s * ek / 25.0)
            x[:, p - tail:] = combo[:, None] + noise
        y = x[:, :s] @ signs + np.sqrt(3.0) * rng.standard_normal(n)
        active = frozenset(range(s))
    elif tag == "1b":
        if p < 3:
            raise InvalidDims("model 1b needs p >= 3")
        x = rng.standard_normal((n, p))
        x[:, 1] = x[:, 0] ** 3 / 3.0 + rng.standard_normal(n)
        y = x[:, 0] + x[:, 1] + x[:, 2] + np.sqrt(3.0) * rng.standard_normal(n)
        active = frozenset({0, 1, 2})
    else:
        family, sub = tag[0], tag[1]
        need = 4 if sub in ("a", "b") else 2
        if p < need:
            raise InvalidDims(f"model {tag} needs p >= {need}")
        if family == "2":
            x = rng.standard_normal((n, p))
            eps = rng.standard_normal(n)
        else:
            x = rng.standard_cauchy((n, p))
            eps = 0.0
        y = _example2_response(x, eps, sub)
        active = frozenset(range(need))

    # overflow protection only; a NaN (printed 1a tail form) must surface
    x = np.clip(x, -_CLIP, _CLIP)
    y = np.clip(np.nan_to_num(y, nan=0.0, posinf=_CLIP, neginf=-_CLIP),
                -_CLIP, _CLIP)
    return Dataset(y=y, x=x), active


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def mms(result, active) -> int:
    """Minimum model size: the worst 1-based rank over the active set."""
    ranking = result.ranking if isinstance(result, ScreeningResult) else result
    ranking = np.asarray(ranking, dtype=int)
    p = ranking.shape[0]
    pos = np.empty(p, dtype=int)
    pos[ranking] = np.arange(1, p + 1)
    active = sorted(int(j) for j in active)
    if not active or active[-1] >= p or active[0] < 0:
        raise InvalidDims("active set outside 0..p-1")
    return int(max(pos[j] for j in active))


def rsd(values) -> float:
    """Robust spread estimate: interquartile range over 1.34, with
    linearly interpolated quartiles."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.shape[0] < 2:
        raise InvalidDims("need at least 2 values")
    q1, q3 = np.quantile(v, [0.25, 0.75])
    return float((q3 - q1) / 1.34)


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------

@dataclass
class BenchCell:
    method: str
    model: str
    n: int
    p: int
    replicates: int
    median_mms: float
    rsd: float
    mean_mms: float


@dataclass
class BenchmarkReport:
    cells: list
    metadata: dict = field(default_factory=dict)

    def cell(self, method: str, model: str, n: int) -> BenchCell:
        model = canonical_model(model)
        for c in self.cells:
            if c.method == method and c.model == model and c.n == n:
                return c
        raise KeyError((method, model, n))

    def to_csv(self) -> str:
        lines = ["method,model,n,p,replicates,median_mms,rsd,mean_mms"]
        for c in self.cells:
            lines.append(
                f"{c.method},{c.model},{c.n},{c.p},{c.replicates},"
                f"{c.median_mms:.6g},{c.rsd:.6g},{c.mean_mms:.6g}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        methods = list(dict.fromkeys(c.method for c in self.cells))
        pairs = list(dict.fromkeys((c.model, c.n) for c in self.cells))
        out = ["| model | n | " + " | ".join(methods) + " |"]
        out.append("|" + "---|" * (2 + len(methods)))
        for model, n in pairs:
            row = [model, str(n)]
            for m in methods:
                try:
                    c = self.cell(m, model, n)
                    row.append(f"{c.median_mms:.6g} ({c.rsd:.6g})")
                except KeyError:
                    row.append("-")
            out.append("| " + " | ".join(row) + " |")
        meta = self.metadata
        out.append("")
        out.append(
            f"p={meta.get('p')}, replicates={meta.get('replicates')}, "
            f"seed={meta.get('seed')}, median MMS with RSD in parentheses."
        )
        return "\n".join(out) + "\n"


def replicate_seed(seed: int, model: str, n: int, rep: int) -> np.random.SeedSequence:
    """Deterministic per-replicate seed from the cell coordinates."""
    return np.random.SeedSequence([int(seed), _model_code(model), int(n), int(rep)])


def _bench_task(args):
    (model, n, p, rep, seed, methods, tuning, ridge, tail_form,
     knot_rule) = args
    ss = replicate_seed(seed, model, n, rep)
    data_seed, aux_seed = ss.spawn(2)
    data, active = generate(model, n, p, data_seed, tail_form)
    out = {}
    for name in methods:
        kind = ScoreKind.from_name(name)
        try:
            if kind is ScoreKind.MC_SPLINE:
                cv_seed = int(aux_seed.generate_state(1)[0])
                ranking = tuned_screen(
                    data, tuning, seed=cv_seed, knot_rule=knot_rule,
                    ridge=ridge,
                ).ranking
            else:
                ranking = screen(data, kind, ridge=ridge).ranking
            out[name] = mms(ranking, active)
        except Exception as exc:  # recorded per cell, never fatal
            out[name] = f"{type(exc).__name__}: {exc}"
    return (model, n, rep), out


def run_benchmark(
    models,
    methods,
    n_list,
    p: int,
    replicates: int,
    seed: int,
    *,
    tuning: TuningConfig | None = None,
    ridge: float = DEFAULT_RIDGE,
    workers: int = 1,
    tail_form: str = "corrected",
    knot_rule: str = "min-gap",
) -> BenchmarkReport:
    """Median MMS and RSD per (method, model, n) over seeded replicates.

    The method list uses ScoreKind names; ``mc-spline`` here means the
    full three-step tuned pipeline. Every replicate's seed is a pure
    function of (seed, model, n, rep), so reports are identical across
    worker counts and repeated runs.
    """
    models = [canonical_model(m) for m in models]
    methods = [ScoreKind.from_name(m).value for m in methods]
    tuning = tuning if tuning is not None else TuningConfig()
    t0 = time.time()
    tasks = [
        (model, n, p, rep, seed, tuple(methods), tuning, ridge, tail_form,
         knot_rule)
        for model in models
        for n in n_list
        for rep in range(replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_bench_task, tasks, chunksize=1))
    else:
        raw = [_bench_task(t) for t in tasks]
    results = dict(raw)

    cells = []
    failures = []
    mms_values = {}
    for model in models:
        for n in n_list:
            for name in methods:
                vals = []
                for rep in range(replicates):
                    v = results[(model, n, rep)][name]
                    if isinstance(v, str):
                        failures.append((name, model, n, rep, v))
                    else:
                        vals.append(v)
                mms_values[(name, model, n)] = list(vals)
                if not vals:
                    continue
                arr = np.asarray(vals, dtype=np.float64)
                cells.append(BenchCell(
                    method=name, model=model, n=n, p=p,
                    replicates=len(vals),
                    median_mms=float(np.median(arr)),
                    rsd=rsd(arr) if len(vals) > 1 else 0.0,
                    mean_mms=float(arr.mean()),
                ))
    metadata = {
        "p": p,
        "replicates": replicates,
        "seed": seed,
        "models": models,
        "methods": methods,
        "n_list": list(n_list),
        "tuning": tuning,
        "ridge": ridge,
        "tail_form": tail_form,
        "knot_rule": knot_rule,
        "wall_time_s": time.time() - t0,
        "failures": failures,
        "mms": mms_values,
    }
    return BenchmarkReport(cells=cells, metadata=metadata)
