"""Framed flow categories truncated at moduli dimension one, and moves on them."""

from .algebra import (HomologyGroup, SmithForm, homology, nonzero, primary_decompose,
                      smith_normal_form)
from .core import (BrokenFlow, ChainComplex, Circle, FlowCategory, FlowCatError, Interval,
                   SignedPoint, ValidationReport, Violation, chain_complex, components, validate)
from .fileformat import dump, load, parse, serialize
from .iso import Isomorphism, iso_check
from .moves import (Birth, Cancel, Intermediate, MoveError, MoveLog, Normalize, Slide, Whitney,
                    birth, handle_cancel, handle_slide, intermediate_category, normalize_circles,
                    parse_move, parse_script, whitney_cancel_points)
from .reduce import primary_snf_reduce, purify_signs, snf_reduce

__all__ = [
    "BrokenFlow", "ChainComplex", "Circle", "FlowCategory", "FlowCatError", "Interval",
    "SignedPoint", "ValidationReport", "Violation", "chain_complex", "components", "validate",
    "dump", "load", "parse", "serialize", "Isomorphism", "iso_check",
    "Birth", "Cancel", "Intermediate", "MoveError", "MoveLog", "Normalize", "Slide", "Whitney",
    "birth", "handle_cancel", "handle_slide", "intermediate_category", "normalize_circles",
    "parse_move", "parse_script", "whitney_cancel_points",
    "HomologyGroup", "SmithForm", "homology", "nonzero", "primary_decompose", "smith_normal_form",
    "primary_snf_reduce", "purify_signs", "snf_reduce",
]
