"""Valued-field models and element arithmetic at finite precision."""

from .fmt import format_element, format_poly, parse_element, parse_poly, parse_precision
from .models import (
    IteratedSeriesField,
    PadicElement,
    PadicField,
    SeriesElement,
    SeriesField,
    min_prec,
)
from .oneunit import (
    Witness,
    delta_op,
    delta_op_inverse,
    one_unit_shift_a,
    one_unit_shift_b,
    one_unit_shift_c,
    rewrite_delta_inverse,
)
from .poly import Poly
from .roots import PthPowerVerdict, hensel_lift, is_pth_power, pth_root

__all__ = [
    "SeriesField", "IteratedSeriesField", "PadicField", "SeriesElement", "PadicElement",
    "min_prec", "Poly", "Witness", "PthPowerVerdict", "pth_root", "hensel_lift",
    "is_pth_power", "one_unit_shift_a", "one_unit_shift_b", "one_unit_shift_c",
    "rewrite_delta_inverse", "delta_op", "delta_op_inverse", "format_element",
    "format_poly", "parse_element", "parse_poly", "parse_precision",
]
