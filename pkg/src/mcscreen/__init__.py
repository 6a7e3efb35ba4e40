"""Feature screening by spline-estimated maximum correlation."""

from ._accel import backend
from .ace import AceConfig, AceResult, ace_mc
from .baselines import (
    ScoreKind,
    dcor_score,
    default_nis_spec,
    nis_score,
    sis_score,
)
from .bspline import SplineBasis, SplineSpec, build_basis, design_matrix, evaluate
from .maxcorr import (
    ContrastSet,
    McEstimate,
    contrast_set,
    estimate_mc,
    transform_x,
    transform_y,
)
from .screening import (
    Dataset,
    ScreeningResult,
    model_size_defaults,
    screen,
    select_by_size,
    select_by_threshold,
)
from .sim import (
    BenchmarkReport,
    MODEL_ORDER,
    generate,
    mms,
    rsd,
    run_benchmark,
)
from .tuning import (
    MixtureFit,
    TuningConfig,
    TunedScreenResult,
    cv_select,
    fit_mixture2,
    step1_unified,
    step2_separate,
    step3_separate,
    tuned_screen,
)

__version__ = "0.1.0"

__all__ = [
    "AceConfig", "AceResult", "BenchmarkReport", "ContrastSet", "Dataset",
    "McEstimate", "MixtureFit", "MODEL_ORDER", "ScoreKind", "ScreeningResult",
    "SplineBasis", "SplineSpec", "TunedScreenResult", "TuningConfig",
    "ace_mc", "backend", "build_basis", "contrast_set", "cv_select",
    "dcor_score", "default_nis_spec", "design_matrix", "estimate_mc",
    "evaluate", "fit_mixture2", "generate", "mms", "model_size_defaults",
    "nis_score", "rsd", "run_benchmark", "screen", "select_by_size",
    "select_by_threshold", "sis_score", "step1_unified", "step2_separate",
    "step3_separate", "transform_x", "transform_y", "tuned_screen",
]
