"""Reaction networks as Euclidean embedded graphs.

A network is a species table, a list of vertices (complexes, stored as
tuples of nonnegative integer stoichiometric coefficients) and a list of
directed edges between vertex indices. The zero tuple is the empty complex.

Construction only checks *shape* (vector lengths, index ranges, integer
coefficients). The graph-level rules of an E-graph (no self-loops, no
isolated vertices, no repeated complexes or edges) are reported by
:func:`validate_network` so that invalid inputs can be inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidNetwork

Complex = tuple[int, ...]


class Species(NamedTuple):
    id: int
    name: str


class Reaction(NamedTuple):
    source: int
    target: int


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    vertices: tuple[Complex, ...]
    edges: tuple[Reaction, ...]

    def __post_init__(self):
        species = tuple(str(s) for s in self.species)
        n = len(species)
        if len(set(species)) != n:
            raise ValueError(f"species names must be unique: {species}")
        vertices = []
        for i, v in enumerate(self.vertices):
            v = tuple(v)
            if len(v) != n:
                raise ValueError(f"vertex {i} has {len(v)} coefficients, expected {n}")
            if any(isinstance(c, bool) or int(c) != c or c < 0 for c in v):
                raise ValueError(f"vertex {i} must have nonnegative integer coefficients: {v}")
            vertices.append(tuple(int(c) for c in v))
        edges = []
        for j, e in enumerate(self.edges):
            e = Reaction(int(e[0]), int(e[1]))
            for end in e:
                if not 0 <= end < len(vertices):
                    raise ValueError(f"edge {j} references missing vertex {end}")
            edges.append(e)
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "edges", tuple(edges))

    @classmethod
    def from_reactions(
        cls, species: Sequence[str], reactions: Iterable[tuple[Sequence[int], Sequence[int]]]
    ) -> "ReactionNetwork":
        """Build a network from ``(source, target)`` coefficient pairs.

        Vertices are numbered in order of first appearance (source before
        target within each reaction), which is also the order the text
        parser produces.
        """
        index: dict[Complex, int] = {}
        edges = []
        for src, tgt in reactions:
            ends = []
            for c in (tuple(src), tuple(tgt)):
                if c not in index:
                    index[c] = len(index)
                ends.append(index[c])
            edges.append(Reaction(*ends))
        return cls(tuple(species), tuple(index), tuple(edges))

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def species_table(self) -> list[Species]:
        return [Species(i, name) for i, name in enumerate(self.species)]

    def species_index(self, name: str) -> int:
        return self.species.index(name)

    @cached_property
    def reaction_vectors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(reaction_vector(self, j) for j in range(self.n_edges))

    def source(self, edge: int) -> Complex:
        return self.vertices[self.edges[edge].source]

    def target(self, edge: int) -> Complex:
        return self.vertices[self.edges[edge].target]

    def complex_str(self, vertex: int) -> str:
        return complex_to_str(self.vertices[vertex], self.species)

    def reaction_str(self, edge: int) -> str:
        e = self.edges[edge]
        return f"{self.complex_str(e.source)} -> {self.complex_str(e.target)}"


def complex_to_str(coeffs: Sequence[int], species: Sequence[str]) -> str:
    terms = []
    for c, name in zip(coeffs, species):
        if c == 1:
            terms.append(name)
        elif c > 1:
            terms.append(f"{c} {name}")
    return " + ".join(terms) if terms else "0"


# -- validation ---------------------------------------------------------------


class Violation(NamedTuple):
    kind: str  # "SelfLoop" | "IsolatedVertex" | "DuplicateVertex" | "DuplicateEdge"
    index: int
    other: int | None = None

    def __str__(self):
        where = "edge" if self.kind in ("SelfLoop", "DuplicateEdge") else "vertex"
        s = f"{self.kind} at {where} {self.index}"
        if self.other is not None:
            s += f" (same as {where} {self.other})"
        return s


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_network(net: ReactionNetwork) -> ValidationReport:
    """Check the E-graph rules; an empty report means the network is valid."""
    found: list[Violation] = []
    seen_vertex: dict[Complex, int] = {}
    for i, v in enumerate(net.vertices):
        if v in seen_vertex:
            found.append(Violation("DuplicateVertex", i, seen_vertex[v]))
        else:
            seen_vertex[v] = i
    incident = [False] * net.n_vertices
    seen_edge: dict[Reaction, int] = {}
    for j, e in enumerate(net.edges):
        if e.source == e.target:
            found.append(Violation("SelfLoop", j))
        if e in seen_edge:
            found.append(Violation("DuplicateEdge", j, seen_edge[e]))
        else:
            seen_edge[e] = j
        incident[e.source] = incident[e.target] = True
    for i, hit in enumerate(incident):
        if not hit:
            found.append(Violation("IsolatedVertex", i))
    return ValidationReport(tuple(found))


def require_valid(net: ReactionNetwork) -> None:
    report = validate_network(net)
    if report.violations:
        raise InvalidNetwork(report)


def reaction_vector(net: ReactionNetwork, edge: int) -> tuple[int, ...]:
    """Target complex minus source complex of ``edge``."""
    if not 0 <= edge < net.n_edges:
        raise IndexError(f"edge index {edge} out of range for {net.n_edges} edges")
    e = net.edges[edge]
    return tuple(b - a for a, b in zip(net.vertices[e.source], net.vertices[e.target]))


# -- kinetics -----------------------------------------------------------------


@dataclass(frozen=True)
class RateAssignment:
    k: tuple[float, ...]

    def __post_init__(self):
        k = tuple(float(v) for v in self.k)
        for j, v in enumerate(k):
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"rate constant of edge {j} must be positive and finite, got {v}")
        object.__setattr__(self, "k", k)

    def __len__(self):
        return len(self.k)

    @classmethod
    def uniform(cls, n_edges: int, value: float = 1.0) -> "RateAssignment":
        return cls((value,) * n_edges)


@dataclass(frozen=True)
class MassActionSystem:
    network: ReactionNetwork
    rates: RateAssignment

    def __post_init__(self):
        if not isinstance(self.rates, RateAssignment):
            object.__setattr__(self, "rates", RateAssignment(tuple(self.rates)))
        if len(self.rates) != self.network.n_edges:
            raise ValueError(
                f"{len(self.rates)} rate constants given for {self.network.n_edges} edges"
            )

    # Dense arrays used by the vector field; rows are edges.
    @cached_property
    def source_exponents(self) -> np.ndarray:
        net = self.network
        return np.array([net.source(j) for j in range(net.n_edges)], dtype=float).reshape(
            net.n_edges, net.n_species
        )

    @cached_property
    def reaction_matrix(self) -> np.ndarray:
        """Species x edges matrix of reaction vectors."""
        net = self.network
        return np.array(net.reaction_vectors, dtype=float).reshape(net.n_edges, net.n_species).T

    @cached_property
    def k(self) -> np.ndarray:
        return np.array(self.rates.k, dtype=float)
