"""Exact exponents, Puiseux series, arcs and orders of functions on arcs."""

from .arcs import (
    Arc,
    ArcFamily,
    arc_from_json,
    arc_set_tord,
    arc_to_json,
    arc_tord,
    set_tord,
    tangent_direction,
    tangent_vector,
)
from .expr import (
    Abs,
    Add,
    FunctionExpr,
    Max,
    Min,
    Mono,
    Mul,
    Sub,
    U,
    UnresolvedTie,
    W,
    evaluate,
    evaluate_mp,
    expr_from_json,
    expr_to_json,
    fmax,
    fmin,
    mono,
    ord_on_arc,
    scale,
    substitute,
    substitute_arc,
    swap_boundary,
)
from .series import (
    INF,
    Exponent,
    IrrationalCoefficient,
    LipgeoError,
    PuiseuxSeries,
    ResolutionBoundExceeded,
    exponent,
    ext_min_max_cmp,
    format_exponent,
    max_exponent_bound,
    rational,
    series_from_json,
    series_order,
    series_to_json,
)
