"""Command line interface.

Subcommands:
  screen     score and rank the predictors of a CSV file
  mc         maximum-correlation estimate for one column pair
  tune       three-step degree/knot selection, staged kept sets
  benchmark  seeded simulation study, CSV plus markdown report

Exit codes: 0 success, 1 input error, 2 internal numerical failure.
Output files are written to a temporary name and renamed into place, so a
failing run never leaves a partial file. ``MCSCREEN_WORKERS`` sets the
default worker count.
"""

import argparse
import csv as _csv
import math
import os
import sys

import numpy as np

from .baselines import ScoreKind
from .bspline import SplineSpec
from .errors import (
    McScreenError,
    MissingValue,
    NonNumericColumn,
    ParseError,
    SingularGram,
)
from .maxcorr import DEFAULT_RIDGE, estimate_mc
from .screening import Dataset, model_size_defaults, screen, select_by_size
from .sim import MODEL_ORDER, run_benchmark
from .tuning import KNOT_RULES, TuningConfig, tuned_screen

DEFAULT_SEED = 20240901
MISSING_TOKENS = {"", "na", "nan", "null", "none"}
SCALINGS = ("minmax", "rank", "none")


class CliError(McScreenError):
    """Bad command line usage; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _scale_column(v: np.ndarray, mode: str) -> np.ndarray:
    if mode == "none":
        return v
    if mode == "minmax":
        lo = v.min()
        rng = v.max() - lo
        if rng <= 0.0:
            return np.full_like(v, 0.5)
        return (v - lo) / rng
    # rank: average ranks mapped to (rank - 0.5) / n
    n = v.shape[0]
    uniq, inv, counts = np.unique(v, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    avg_rank = (starts + ends + 1) / 2.0
    return (avg_rank[inv] - 0.5) / n


def load_csv(path: str, response=None, scaling: str = "none"):
    """Parse a numeric CSV with a header row into a Dataset.

    ``response`` picks the response column by name or 1-based index; the
    default is the first column. Remaining columns become predictors in
    file order. Row/column coordinates in errors are 1-based and count the
    header as row 1. Returns (dataset, response_name).
    """
    if scaling not in SCALINGS:
        raise CliError(f"scaling must be one of {SCALINGS}")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", row=1) from None
        ncol = len(header)
        if ncol < 2:
            raise ParseError("need a response column and at least one "
                             "predictor column", row=1)
        body = []
        for i, rec in enumerate(reader, start=2):
            if len(rec) != ncol:
                raise ParseError(
                    f"expected {ncol} fields, got {len(rec)}", row=i,
                    col=min(len(rec) + 1, ncol),
                )
            vals = np.empty(ncol)
            for c, cell in enumerate(rec):
                tok = cell.strip()
                if tok.lower() in MISSING_TOKENS:
                    raise MissingValue("missing value", row=i, col=c + 1)
                try:
                    v = float(tok)
                except ValueError:
                    raise NonNumericColumn(
                        f"column {header[c]!r}: cannot parse {tok!r}",
                        row=i, col=c + 1,
                    ) from None
                if not math.isfinite(v):
                    raise MissingValue(f"non-finite value {tok!r}", row=i,
                                       col=c + 1)
                vals[c] = v
            body.append(vals)
    if not body:
        raise ParseError("no data rows", row=2)
    mat = np.vstack(body)

    if response is None:
        ridx = 0
    else:
        rtok = str(response)
        if rtok in header:
            ridx = header.index(rtok)
        elif rtok.lstrip("-").isdigit():
            ridx = int(rtok) - 1
            if not 0 <= ridx < ncol:
                raise CliError(f"response index {rtok} outside 1..{ncol}")
        else:
            raise CliError(f"response column {response!r} not in header")

    y = _scale_column(mat[:, ridx].copy(), scaling)
    x = np.delete(mat, ridx, axis=1)
    for j in range(x.shape[1]):
        x[:, j] = _scale_column(x[:, j], scaling)
    names = header[:ridx] + header[ridx + 1:]
    return Dataset(y=y, x=x, column_names=names), header[ridx]


def save_dataset_csv(path: str, data: Dataset, response_name: str = "y"):
    """Serialize with enough digits for an exact float round trip."""
    names = [data.name(j) for j in range(data.p)]
    lines = [",".join([response_name] + names)]
    for i in range(data.n):
        row = [f"{data.y[i]:.17g}"] + [f"{data.x[i, j]:.17g}"
                                       for j in range(data.p)]
        lines.append(",".join(row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path: str, text: str):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load_column(pathspec: str, scaling: str) -> np.ndarray:
    if ":" not in pathspec:
        raise CliError(f"expected PATH:COLUMN, got {pathspec!r}")
    path, col = pathspec.rsplit(":", 1)
    data, rname = load_csv(path, response=col, scaling=scaling)
    return data.y


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("MCSCREEN_WORKERS", "1")))
    except ValueError:
        return 1


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--workers", type=int, default=_default_workers())
    sp.add_argument("--scaling", choices=SCALINGS, default="minmax")
    sp.add_argument("--knot-rule", choices=KNOT_RULES, default="min-gap")
    sp.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    sp.add_argument("--config", default=None, help="flat key=value file; "
                    "command line flags override it")


def build_parser() -> _Parser:
    parser = _Parser(prog="mcscreen")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("screen", help="rank predictors of a CSV file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--response", default=None,
                    help="response column name or 1-based index")
    sp.add_argument("--method", default="mc-spline",
                    choices=[k.value for k in ScoreKind])
    sp.add_argument("--size", type=int, default=None,
                    help="selected-set size; default integer part of n/log n")
    sp.add_argument("--degree", type=int, default=None)
    sp.add_argument("--knots", type=int, default=None)
    sp.add_argument("--placement", choices=("quantile", "uniform"),
                    default="quantile")
    sp.add_argument("--output", required=True)
    _add_common(sp)

    sp = sub.add_parser("mc", help="maximum correlation for one pair")
    sp.add_argument("--lhs", required=True, metavar="PATH:COL",
                    help="response side")
    sp.add_argument("--rhs", required=True, metavar="PATH:COL",
                    help="predictor side")
    sp.add_argument("--degree", type=int, default=None)
    sp.add_argument("--knots", type=int, default=None)
    sp.add_argument("--placement", choices=("quantile", "uniform"),
                    default="quantile")
    _add_common(sp)

    sp = sub.add_parser("tune", help="three-step degree/knot selection")
    sp.add_argument("--input", required=True)
    sp.add_argument("--response", default=None)
    sp.add_argument("--k1", type=int, default=3)
    sp.add_argument("--k2", type=int, default=6)
    sp.add_argument("--b1", type=int, default=200)
    sp.add_argument("--b2", type=int, default=50)
    sp.add_argument("--b3", type=int, default=None)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--output", required=True)
    _add_common(sp)

    sp = sub.add_parser("benchmark", help="seeded simulation study")
    sp.add_argument("--models", required=True,
                    help=f"comma list from {', '.join(MODEL_ORDER)}")
    sp.add_argument("--methods", default="sis,nis,dcsis,mc-ace,mc-spline")
    sp.add_argument("--n", required=True, help="comma list of sample sizes")
    sp.add_argument("--p", type=int, default=200)
    sp.add_argument("--reps", type=int, default=50)
    sp.add_argument("--k1", type=int, default=3)
    sp.add_argument("--k2", type=int, default=6)
    sp.add_argument("--b1", type=int, default=200)
    sp.add_argument("--b2", type=int, default=50)
    sp.add_argument("--b3", type=int, default=None)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--tail-form", choices=("corrected", "printed"),
                    default="corrected")
    sp.add_argument("--output", required=True,
                    help="CSV path; a sibling .md report is written too")
    _add_common(sp)
    return parser


def _read_config(path: str) -> list:
    """Flat key = value lines mirroring the long flags."""
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected key = value, got {line!r}", row=i)
            key, value = (part.strip() for part in line.split("=", 1))
            if not key or not value:
                raise ParseError(f"empty key or value in {line!r}", row=i)
            tokens += [f"--{key.replace('_', '-')}", value]
    return tokens


def _merge_config(argv: list) -> list:
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise CliError("--config needs a path")
    tokens = _read_config(argv[at + 1])
    # config path stays so the parser records it; config tokens go first so
    # explicit flags override them
    return [argv[0]] + tokens + argv[1:]


def _spec_from_args(args) -> SplineSpec | None:
    if args.degree is None and args.knots is None:
        return None
    degree = args.degree if args.degree is not None else 2
    knots = args.knots if args.knots is not None else 4
    return SplineSpec(degree, knots, args.placement)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_screen(args) -> int:
    data, rname = load_csv(args.input, args.response, args.scaling)
    data.validate()
    kind = ScoreKind.from_name(args.method)
    spec = _spec_from_args(args)
    result = screen(data, kind, spec=spec, ridge=args.ridge,
                    workers=args.workers)
    m = args.size if args.size is not None else min(
        data.p, max(1, model_size_defaults(data.n)[1]))
    selected = select_by_size(result, min(m, data.p))
    lines = ["rank,index,name,score"]
    for r, j in enumerate(result.ranking, start=1):
        lines.append(f"{r},{j + 1},{data.name(j)},{result.scores[j]:.12g}")
    _atomic_write(args.output, "\n".join(lines) + "\n")
    print(f"method={kind.value} response={rname} n={data.n} p={data.p} "
          f"scaling={args.scaling} seed={args.seed}")
    print(f"selected ({len(selected)}): "
          + ",".join(str(j + 1) for j in selected))
    for j, msg in result.warnings:
        print(f"warning: column {j + 1} scored 0 ({msg})", file=sys.stderr)
    return 0


def cmd_mc(args) -> int:
    y = _load_column(args.lhs, args.scaling)
    x = _load_column(args.rhs, args.scaling)
    spec = _spec_from_args(args)
    if spec is None:
        from .baselines import default_nis_spec

        rule = default_nis_spec(y.shape[0])
        spec = SplineSpec(rule.degree, rule.num_knots, args.placement)
    est = estimate_mc(x, y, spec, spec, ridge=args.ridge)
    print(f"lambda_hat={est.lambda_hat:.12g}")
    print(f"rho_hat={est.rho_hat:.12g}")
    print(f"degree={spec.degree} knots={spec.num_knots} "
          f"placement={spec.placement} scaling={args.scaling}")
    for key, value in sorted(est.diagnostics.items()):
        print(f"{key}={value}")
    return 0


def cmd_tune(args) -> int:
    data, rname = load_csv(args.input, args.response, args.scaling)
    data.validate()
    cfg = TuningConfig(k_min=args.k1, k_max=args.k2, b1=args.b1, b2=args.b2,
                       b3=args.b3, folds=args.folds)
    res = tuned_screen(data, cfg, seed=args.seed, knot_rule=args.knot_rule,
                       ridge=args.ridge, workers=args.workers)
    lines = ["stage,rank,index,name,degree,knots,score"]
    for r, j in enumerate(res.step1.kept, start=1):
        lines.append(f"1,{r},{j + 1},{data.name(j)},1,{res.step1.k_tilde},"
                     f"{res.step1.scores[j]:.12g}")
    for stage, step in ((2, res.step2), (3, res.step3)):
        for r, j in enumerate(step.kept, start=1):
            j = int(j)
            l_sel, k_sel = step.chosen[j] or (0, 0)
            lines.append(f"{stage},{r},{j + 1},{data.name(j)},{l_sel},"
                         f"{k_sel},{step.scores[j]:.12g}")
    _atomic_write(args.output, "\n".join(lines) + "\n")
    print(f"response={rname} n={data.n} p={data.p} scaling={args.scaling} "
          f"seed={args.seed} knot_rule={args.knot_rule}")
    print(f"k_tilde={res.step1.k_tilde} kept sizes: {len(res.step1.kept)} "
          f">= {len(res.step2.kept)} >= {len(res.step3.kept)}")
    return 0


def cmd_benchmark(args) -> int:
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    n_list = [int(v) for v in args.n.split(",") if v.strip()]
    cfg = TuningConfig(k_min=args.k1, k_max=args.k2, b1=args.b1, b2=args.b2,
                       b3=args.b3, folds=args.folds)
    report = run_benchmark(
        models, methods, n_list, args.p, args.reps, args.seed,
        tuning=cfg, ridge=args.ridge, workers=args.workers,
        tail_form=args.tail_form, knot_rule=args.knot_rule,
    )
    _atomic_write(args.output, report.to_csv())
    md_path = os.path.splitext(args.output)[0] + ".md"
    _atomic_write(md_path, report.to_markdown())
    print(f"models={','.join(models)} methods={','.join(methods)} "
          f"n={args.n} p={args.p} reps={args.reps} seed={args.seed} "
          f"scaling=n/a (generated data)")
    print(f"wrote {args.output} and {md_path} "
          f"in {report.metadata['wall_time_s']:.1f}s")
    for failure in report.metadata["failures"]:
        print(f"warning: cell failure {failure}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        handler = {
            "screen": cmd_screen,
            "mc": cmd_mc,
            "tune": cmd_tune,
            "benchmark": cmd_benchmark,
        }[args.command]
        return handler(args)
    except (SingularGram, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (McScreenError, OSError, ValueError) as exc:
        loc = ""
        if isinstance(exc, ParseError) and exc.row is not None:
            loc = f" (row {exc.row}" + (
                f", column {exc.col})" if exc.col is not None else ")")
        print(f"error: {exc}{loc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything else counts as an internal failure
        print(f"internal failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
