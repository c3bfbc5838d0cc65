"""Abstract pizzas and their extraction from functions on Hölder triangles."""

from .abstract import (
    AbstractPizza,
    PizzaSlice,
    PizzaViolation,
    WidthFunction,
    equivalent,
    make_pizza,
    minimalize,
    pizza_from_json,
    pizza_to_json,
    validate,
)
from .extract import DEFAULT_DEPTH, Extraction, extract_pizza, extraction, special_arcs, width_at_arc
from .newton import NotAdmissible
from .triangles import TwoTriangleReport, check_two_triangle_condition, triangle_sample

__all__ = [
    "AbstractPizza",
    "DEFAULT_DEPTH",
    "Extraction",
    "NotAdmissible",
    "PizzaSlice",
    "PizzaViolation",
    "TwoTriangleReport",
    "WidthFunction",
    "check_two_triangle_condition",
    "equivalent",
    "extract_pizza",
    "extraction",
    "make_pizza",
    "minimalize",
    "pizza_from_json",
    "pizza_to_json",
    "special_arcs",
    "triangle_sample",
    "validate",
    "width_at_arc",
]
