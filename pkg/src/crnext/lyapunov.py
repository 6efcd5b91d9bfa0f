"""Linear Lyapunov functions V(x) = w . x for mass-action systems.

A vector ``w`` with ``w . (y' - y) <= 0`` on every reaction, strictly on at
least one, makes ``V`` strictly decreasing on the positive orthant for every
choice of rate constants. Such a ``w`` can come from an inconsistency
certificate, or, for deficiency-zero networks that are not weakly
reversible, from the explicit geometric construction in
:func:`construct_w_deficiency_zero`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import exact
from .errors import NonpositiveState, NotApplicable, NotASeparator, NotDeficiencyZero
from .graph import is_weakly_reversible, linkage_classes, strongly_connected_components, undirected_components
from .model import MassActionSystem, ReactionNetwork, require_valid
from .structure import deficiency


@dataclass(frozen=True)
class LinearLyapunov:
    w: tuple[Fraction, ...]
    edge_signs: tuple[str, ...]  # "-" or "0" per edge

    @property
    def strict_edges(self) -> list[int]:
        return [j for j, s in enumerate(self.edge_signs) if s == "-"]

    def value(self, x: Sequence[float]) -> float:
        return float(np.dot([float(c) for c in self.w], x))


@dataclass(frozen=True)
class ConstructionTrace:
    linkage_class: tuple[int, ...]  # L1
    terminal_scc: tuple[int, ...]  # SC1
    component: tuple[int, ...]  # V1
    complement: tuple[int, ...]  # V2 = V \ V1
    crossing_edge: int
    crossing_edges: tuple[int, ...]
    dim_S: int
    dim_S1: int
    dim_S2: int


def lyapunov_from_separator(net: ReactionNetwork, w: Sequence[Rational]) -> LinearLyapunov:
    """Wrap ``w`` as a linear Lyapunov function after checking it separates.

    Raises:
        NotASeparator: if some edge has ``w . (y' - y) > 0`` (``edge`` is set),
            or no edge is strict.
    """
    require_valid(net)
    w = tuple(Fraction(c) for c in w)
    if len(w) != net.n_species:
        raise NotASeparator(f"w has length {len(w)}, expected {net.n_species}")
    signs = []
    for j, r in enumerate(net.reaction_vectors):
        d = exact.dot(w, r)
        if d > 0:
            raise NotASeparator(f"w . (y' - y) = {d} > 0 on edge {j} ({net.reaction_str(j)})", edge=j)
        signs.append("-" if d < 0 else "0")
    if "-" not in signs:
        raise NotASeparator("w . (y' - y) = 0 on every edge; no strict decrease")
    return LinearLyapunov(w, tuple(signs))


def construct_w_deficiency_zero(net: ReactionNetwork) -> tuple[LinearLyapunov, ConstructionTrace]:
    """Geometric linear Lyapunov function for a deficiency-zero, non weakly reversible network.

    Pick the first linkage class L1 that is not strongly connected, its first
    terminal strongly connected component SC1, and the first connected
    component V1 of L1 minus SC1 ("first" = smallest vertex index). With
    V2 the remaining vertices, every edge crossing between V1 and V2 runs
    from V1 into SC1. The returned ``w`` lies in the stoichiometric
    subspace, is orthogonal to every reaction vector with both ends in V1 or
    both in V2, and is negative on the crossing reactions.

    Raises:
        NotApplicable: the network is weakly reversible.
        NotDeficiencyZero: the deficiency is positive.
    """
    require_valid(net)
    if is_weakly_reversible(net):
        raise NotApplicable("network is weakly reversible; no linear Lyapunov function exists")
    rep = deficiency(net)
    if rep.deficiency != 0:
        raise NotDeficiencyZero(f"deficiency is {rep.deficiency}, construction needs 0")

    scc = strongly_connected_components(net)
    link = linkage_classes(net)
    # L1: first linkage class that contains more than one SCC
    L1 = next(c for c in link.classes if len({scc.class_of[v] for v in c}) > 1)
    SC1 = next(
        scc.classes[i] for i in sorted({scc.class_of[v] for v in L1}) if scc.terminal_flags[i]
    )
    rest = [v for v in L1 if v not in SC1]
    V1 = undirected_components(net.n_vertices, net.edges, rest)[0]
    in_V1 = set(V1)
    V2 = tuple(v for v in range(net.n_vertices) if v not in in_V1)

    inside1, inside2, crossing = [], [], []
    for j, e in enumerate(net.edges):
        a, b = e.source in in_V1, e.target in in_V1
        if a and b:
            inside1.append(j)
        elif not a and not b:
            inside2.append(j)
        else:
            crossing.append(j)
    n = net.n_species
    vecs = net.reaction_vectors
    perp = [vecs[j] for j in inside1 + inside2]
    w = exact.vector_in_span_orthogonal_to(vecs, perp, vecs[crossing[0]])
    trace = ConstructionTrace(
        linkage_class=tuple(L1),
        terminal_scc=tuple(SC1),
        component=tuple(V1),
        complement=V2,
        crossing_edge=crossing[0],
        crossing_edges=tuple(crossing),
        dim_S=rep.stoich_dim,
        dim_S1=exact.rank_of([vecs[j] for j in inside1], n),
        dim_S2=exact.rank_of([vecs[j] for j in inside2], n),
    )
    return lyapunov_from_separator(net, w), trace


def vdot(sys: MassActionSystem, w: Sequence[Rational], x: Sequence[float]) -> float:
    """Time derivative of ``w . x`` along the mass-action vector field at ``x``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise NonpositiveState(f"state must be strictly positive, got {x.tolist()}")
    wf = np.array([float(c) for c in w])
    flux = sys.k * np.prod(x ** sys.source_exponents, axis=1)
    return float(np.dot(flux, wf @ sys.reaction_matrix))


def hj_value(x: Sequence[float], xstar: Sequence[float]) -> float:
    """Horn-Jackson function sum(x ln x - x - x ln x*)."""
    x = np.asarray(x, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    if x.shape != xstar.shape:
        raise ValueError("x and xstar must have the same length")
    if np.any(~(x > 0)) or np.any(~(xstar > 0)):
        raise NonpositiveState("Horn-Jackson function needs strictly positive arguments")
    return float(np.sum(x * np.log(x) - x - x * np.log(xstar)))


def hj_gradient(x: Sequence[float], xstar: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    if np.any(~(x > 0)) or np.any(~(xstar > 0)):
        raise NonpositiveState("Horn-Jackson function needs strictly positive arguments")
    return np.log(x) - np.log(xstar)
