"""Network-level structure: stoichiometry, deficiency, consistency, conservation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import exact
from .errors import NonpositiveState
from .exact import PositiveDependence, RatMatrix
from .graph import linkage_classes
from .model import MassActionSystem, ReactionNetwork, require_valid


def stoichiometric_matrix(net: ReactionNetwork) -> RatMatrix:
    """Species x edges matrix whose columns are the reaction vectors, in edge order."""
    require_valid(net)
    return RatMatrix.from_columns(net.reaction_vectors, rows=net.n_species)


def stoichiometric_rank(net: ReactionNetwork) -> int:
    return exact.rank_of(net.reaction_vectors, net.n_species)


@dataclass(frozen=True)
class DeficiencyReport:
    num_vertices: int
    num_linkage_classes: int
    stoich_dim: int
    deficiency: int


def deficiency(net: ReactionNetwork) -> DeficiencyReport:
    require_valid(net)
    v = net.n_vertices
    ell = len(linkage_classes(net))
    s = stoichiometric_rank(net)
    return DeficiencyReport(v, ell, s, v - ell - s)


@dataclass(frozen=True)
class DeficiencyZeroDiagnostics:
    affinely_independent: tuple[bool, ...]  # one flag per linkage class
    class_ranks: tuple[int, ...]
    subspaces_independent: bool

    @property
    def holds(self) -> bool:
        return all(self.affinely_independent) and self.subspaces_independent


def _class_reaction_vectors(net: ReactionNetwork, members: Sequence[int]) -> list[tuple[int, ...]]:
    inside = set(members)
    return [net.reaction_vectors[j] for j, e in enumerate(net.edges) if e.source in inside]


def deficiency_zero_diagnostics(net: ReactionNetwork) -> DeficiencyZeroDiagnostics:
    """The two conditions that together characterise deficiency zero.

    Per linkage class, whether its vertices are affinely independent
    (differences to the smallest-index vertex have full rank), and whether
    the per-class stoichiometric subspaces are linearly independent (their
    ranks add up to the rank of the whole network).
    """
    require_valid(net)
    n = net.n_species
    affine = []
    ranks = []
    for members in linkage_classes(net).classes:
        base = net.vertices[members[0]]
        diffs = [tuple(a - b for a, b in zip(net.vertices[v], base)) for v in members[1:]]
        affine.append(exact.rank_of(diffs, n) == len(members) - 1)
        ranks.append(exact.rank_of(_class_reaction_vectors(net, members), n))
    independent = sum(ranks) == stoichiometric_rank(net)
    return DeficiencyZeroDiagnostics(tuple(affine), tuple(ranks), independent)


# -- consistency --------------------------------------------------------------


@dataclass(frozen=True)
class Consistent:
    """Positive weights ``lam`` (one per edge) under which the reaction vectors cancel."""

    lam: tuple[int, ...]

    def verify(self, net: ReactionNetwork) -> bool:
        return exact.PositiveDependence(self.lam).verify(stoichiometric_matrix(net))


@dataclass(frozen=True)
class Inconsistent:
    """Separator ``w``: ``w . (y' - y) <= 0`` on every edge, strictly on at least one."""

    w: tuple[int, ...]

    def verify(self, net: ReactionNetwork) -> bool:
        return exact.Separator(self.w).verify(stoichiometric_matrix(net))

    def edge_dots(self, net: ReactionNetwork) -> tuple[Fraction, ...]:
        return stoichiometric_matrix(net).vecmat(self.w)


ConsistencyVerdict = Union[Consistent, Inconsistent]


def is_consistent(net: ReactionNetwork) -> ConsistencyVerdict:
    res = exact.positive_nullvector_or_certificate(stoichiometric_matrix(net))
    if isinstance(res, PositiveDependence):
        return Consistent(res.lam)
    return Inconsistent(res.w)


def is_conservative(net: ReactionNetwork) -> tuple[int, ...] | None:
    """A strictly positive integer vector orthogonal to every reaction vector, if one exists."""
    res = exact.positive_nullvector_or_certificate(stoichiometric_matrix(net).transpose())
    if isinstance(res, PositiveDependence):
        return res.lam
    return None


def conservation_laws(net: ReactionNetwork) -> list[tuple[int, ...]]:
    """Basis of the left nullspace of the stoichiometric matrix."""
    return exact.nullspace(stoichiometric_matrix(net).transpose())


# -- complex balance ----------------------------------------------------------

CB_RTOL = 1e-12
CB_ATOL = 1e-14


@dataclass(frozen=True)
class ComplexBalanceCheck:
    balanced: bool
    residuals: tuple[float, ...]  # out-flow minus in-flow at each vertex


def is_complex_balanced_state(sys: MassActionSystem, x: Sequence[float]) -> ComplexBalanceCheck:
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.network.n_species,):
        raise ValueError(f"state must have length {sys.network.n_species}")
    if np.any(~(x > 0)):
        raise NonpositiveState(f"state must be strictly positive, got {x.tolist()}")
    net = sys.network
    flux = sys.k * np.prod(x ** sys.source_exponents, axis=1)
    out = np.zeros(net.n_vertices)
    inn = np.zeros(net.n_vertices)
    for j, e in enumerate(net.edges):
        out[e.source] += flux[j]
        inn[e.target] += flux[j]
    resid = out - inn
    scale = np.maximum(out, inn)
    ok = bool(np.all(np.abs(resid) <= np.maximum(CB_RTOL * scale, CB_ATOL)))
    return ComplexBalanceCheck(ok, tuple(resid.tolist()))
