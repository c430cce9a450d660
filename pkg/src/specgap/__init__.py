"""Zero-free arcs of trigonometric polynomials with prescribed spectrum.

Bounds and closed forms for symmetric integer spectra, exact zero finding on
the circle, the touching-zero extremal polynomials for arithmetic
progressions, a multi-start search for the supremal gap, and sampled checks
of the ball and cube bounds on the d-torus.
"""

from .errors import InputError, NumericalError, PropertyViolation, SpecgapError, UnsupportedRegimeError
from .extremal import ExtremalConstruction, build_extremal, corollary_alpha, strictify, verify_touching
from .multidim import TrigPolyND, check_cube, check_thm1, fold, largest_zero_free_ball
from .search import SearchConfig, SearchResult, brute_force_M, estimate_M, experiment, gap_objective
from .spectrum import (ProgressionParams, Spectrum, ball_bound, closed_form_M, cube_bound,
                       gen_net, gen_progression, gen_random, gen_squares, make_spectrum)
from .trigpoly import (GapReport, TrigPoly1D, ZeroSet, arc_index, circle_zeros, dense_gap,
                       evaluate, gap_of, max_gap, to_algebraic, winding_total)

__version__ = "0.1.0"

__all__ = [
    "InputError", "NumericalError", "PropertyViolation", "SpecgapError", "UnsupportedRegimeError",
    "ExtremalConstruction", "build_extremal", "corollary_alpha", "strictify", "verify_touching",
    "TrigPolyND", "check_cube", "check_thm1", "fold", "largest_zero_free_ball",
    "SearchConfig", "SearchResult", "brute_force_M", "estimate_M", "experiment", "gap_objective",
    "ProgressionParams", "Spectrum", "ball_bound", "closed_form_M", "cube_bound",
    "gen_net", "gen_progression", "gen_random", "gen_squares", "make_spectrum",
    "GapReport", "TrigPoly1D", "ZeroSet", "arc_index", "circle_zeros", "dense_gap",
    "evaluate", "gap_of", "max_gap", "to_algebraic", "winding_total",
]
