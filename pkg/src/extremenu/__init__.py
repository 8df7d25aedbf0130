"""Exact extreme-point analysis of finite-menu mechanisms in linear screening.

Decides, certifies, and explains whether a finite menu is an extreme point of
the incentive-compatible, individually-rational mechanisms over a polytopal
allocation space; produces verified Minkowski decompositions when it is not
and certified perturbations into extreme points when it is close. All
arithmetic is exact rational.
"""

from .geometry import Fraction, Hyperplane, Polyhedron, dual_description, faces, lp_solve, nullspace_basis, rank
from .model import (
    AllocationSpace,
    ExtendedMenu,
    Menu,
    Scenario,
    TypeCone,
    agent_choice,
    extend_menu,
    polar_cone,
    support_value,
    validate_scenario,
)

__version__ = "0.1.0"
