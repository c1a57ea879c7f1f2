"""
Closed-form constrained minimum of ``-b sum x_i - sum_{i<j} x_i x_j`` on a
hyperplane, the elementary symmetric function toolkit around it, and the
pointwise algebra of the sigma_2 curvature estimate it feeds.
"""

from . import checks, estimate, geomkit, minval, symfun
from .estimate import PointData, QuadBound
from .minval import MinProblem, MinSolution, ProblemClass, Wellposedness

__version__ = "0.1.0"

__all__ = [
    "checks",
    "estimate",
    "geomkit",
    "minval",
    "symfun",
    "MinProblem",
    "MinSolution",
    "ProblemClass",
    "Wellposedness",
    "PointData",
    "QuadBound",
]
