"""Sampled germ models and numerical oracles for tangency orders and metrics."""

from .builders import cusp_model, horn_model, horn_sector_model, triangle_model
from .experiments import (
    PROJECTION_PLAN,
    LneReport,
    PancakeReport,
    ProjectionReport,
    TangentConeReport,
    function_order_numeric,
    horn_exponent_numeric,
    inner_link_diameter,
    lne_report,
    meridian_arcs,
    pancake_check,
    projection_experiment,
    random_planes,
    tangency_numeric,
    tangent_cone_sample,
    tord_preserved,
)
from .mesh import (
    PancakeDecomposition,
    ScaleSamplePlan,
    build_mesh,
    distance,
    estimate_order,
    locate,
    sample_link,
)
from .model import GermModel, ModelArc, Patch, Term, model_from_json, model_to_json
from .plot import link_svg, polylines_svg

__all__ = [name for name in dir() if not name.startswith("_")]
