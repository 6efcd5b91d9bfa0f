"""Structural and dynamical analysis of mass-action reaction networks.

Deficiency and weak reversibility, exact consistency certificates, linear
Lyapunov functions, mass-action simulation and extinction classification.
"""

from .dynamics import IntegrateOptions, Trajectory, integrate, jacobian, refine_equilibrium, rhs
from .graph import is_weakly_reversible, linkage_classes, strongly_connected_components, terminal_sccs
from .model import MassActionSystem, RateAssignment, ReactionNetwork, reaction_vector, validate_network
from .parser import format_network, parse_network
from .structure import deficiency, is_consistent, is_conservative

__all__ = [
    "IntegrateOptions",
    "MassActionSystem",
    "RateAssignment",
    "ReactionNetwork",
    "Trajectory",
    "deficiency",
    "format_network",
    "integrate",
    "is_consistent",
    "is_conservative",
    "is_weakly_reversible",
    "jacobian",
    "linkage_classes",
    "parse_network",
    "reaction_vector",
    "refine_equilibrium",
    "rhs",
    "strongly_connected_components",
    "terminal_sccs",
    "validate_network",
]
