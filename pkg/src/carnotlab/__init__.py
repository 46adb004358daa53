"""Step-2 Carnot groups: group law, classification, intrinsic Lipschitz graphs, area lab."""

from .classify import builtin, builtin_catalog, is_h_type, is_plentiful, parse_lie_spec
from .errors import (CarnotError, CoverageError, LineSearchError, ParseError,
                     ValidationError)
from .group import GroupSpec, Point, distance, inf_norm, inverse, make_group_spec, multiply
from .splitting import Cone, Splitting, make_splitting

__all__ = [
    "CarnotError", "Cone", "CoverageError", "GroupSpec", "LineSearchError", "ParseError",
    "Point", "Splitting", "ValidationError", "builtin", "builtin_catalog", "distance",
    "inf_norm", "inverse", "is_h_type", "is_plentiful", "make_group_spec", "make_splitting",
    "multiply", "parse_lie_spec",
]
__version__ = "0.1.0"
