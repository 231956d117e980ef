"""Numerical minimality checks for determinantal and spectral matrix manifolds."""

from .errors import (
    AmbientError,
    DimensionError,
    MMMError,
    SingularMetricError,
    SpecError,
    StepError,
)
from .linalg import (
    Ambient,
    MatrixPoint,
    frobenius_inner,
    frobenius_norm,
    generator,
    plane_rotation,
    skew_normal_form,
    spectral_ordered,
    svd_ordered,
)
from .charts import (
    Chart,
    Frame,
    RankChartSpec,
    SkewChartSpec,
    SymChartSpec,
    manifold_dim,
    rank_chart,
    skew_chart,
    sym_chart,
)
from .curvature import (
    cone_chart,
    cone_sphere_check,
    gram,
    mean_curvature,
    sphere_mean_curvature,
)
from .strata import MultiplicityPattern, detect_pattern, stabilizer, stabilizer_check

__version__ = "0.1.0"

__all__ = [
    "AmbientError",
    "DimensionError",
    "MMMError",
    "SingularMetricError",
    "SpecError",
    "StepError",
    "Ambient",
    "MatrixPoint",
    "frobenius_inner",
    "frobenius_norm",
    "generator",
    "plane_rotation",
    "skew_normal_form",
    "spectral_ordered",
    "svd_ordered",
    "Chart",
    "Frame",
    "RankChartSpec",
    "SkewChartSpec",
    "SymChartSpec",
    "manifold_dim",
    "rank_chart",
    "skew_chart",
    "sym_chart",
    "cone_chart",
    "cone_sphere_check",
    "gram",
    "mean_curvature",
    "sphere_mean_curvature",
    "MultiplicityPattern",
    "detect_pattern",
    "stabilizer",
    "stabilizer_check",
]
