"""Exact computations for the Chacon infinite transformation and its diagonal measures.

Points are triadic rationals, measures are Fractions, and every verifier
returns a :class:`Report` of checked and failed cases.
"""
from .crossings import (
    Crossing,
    PartialShift,
    crossings_in_window,
    find_special_depths,
    first_crossing,
    verify_bto_sb,
    verify_long_crossing,
    verify_separation,
    verify_tn,
)
from .diagonals import BoxD, ConsistentFamily, DiagonalD, admissible_taus, diagonal_refine, refine_family
from .kernels import BACKEND
from .measures import (
    DiagonalMeasureParams,
    Kind,
    ProductParams,
    classify,
    factorize,
    measure_of_box,
    measure_of_halfcube,
    verify_additivity,
    verify_graph_identity,
)
from .report import Report
from .tower import TowerGeometry, default_geometry, half_height, height
from .transform import apply, apply_inverse, iterate
from .triadic import Triadic
from .witness import WitnessSpec, hopf_experiment, witness_point

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoxD", "ConsistentFamily", "Crossing", "DiagonalD", "DiagonalMeasureParams", "Kind",
    "PartialShift", "ProductParams", "Report", "TowerGeometry", "Triadic", "WitnessSpec",
    "admissible_taus", "apply", "apply_inverse", "classify", "crossings_in_window", "default_geometry",
    "diagonal_refine", "factorize", "find_special_depths", "first_crossing", "half_height", "height",
    "hopf_experiment", "iterate", "measure_of_box", "measure_of_halfcube", "refine_family",
    "verify_additivity", "verify_bto_sb", "verify_graph_identity", "verify_long_crossing",
    "verify_separation", "verify_tn", "witness_point",
]
