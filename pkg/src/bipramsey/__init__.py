"""Colorings of K_{n,n} in which every 2k-cycle sees at least three colors."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .bounds import bound_report, lower_constant, structural_bound, upper_constant
from .certify import CoreBothSidesLarge, build_certificate, strip_component
from .exact import SearchInstance, is_colorable_with, search_min_colors
from .graphs import BipartiteColoring, Side
from .matcher import construct
from .verifier import verify_exhaustive, verify_pairwise

__all__ = [
    "__version__",
    "BipartiteColoring",
    "CoreBothSidesLarge",
    "SearchInstance",
    "Side",
    "bound_report",
    "build_certificate",
    "construct",
    "is_colorable_with",
    "lower_constant",
    "search_min_colors",
    "strip_component",
    "structural_bound",
    "upper_constant",
    "verify_exhaustive",
    "verify_pairwise",
]
