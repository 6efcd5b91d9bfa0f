"""Extinction analysis.

Two structural results and one empirical report:

* first-order networks: every species outside a terminal strongly connected
  component tends to zero, layer by layer towards the terminal set;
* a separator together with a strictly positive conservation law forces
  ``liminf x_i(t) = 0`` for some species along every positive trajectory;
* finite trajectories are summarised per species as weak/strong candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotApplicable, NotFirstOrder
from .graph import is_weakly_reversible, strongly_connected_components
from .lyapunov import construct_w_deficiency_zero
from .model import ReactionNetwork, require_valid
from .structure import Inconsistent, deficiency, is_consistent, is_conservative

DEFAULT_EPS_WEAK = 1e-2
DEFAULT_EPS_STRONG = 1e-4
TAIL_FRACTION = 0.2
TAIL_MIN_SAMPLES = 50


@dataclass(frozen=True)
class StrongExtinction:
    species: tuple[str, ...]  # every species outside the terminal components
    layers: tuple[tuple[str, ...], ...]  # layers[0] feeds the terminal set directly


def _single_species(v: Sequence[int]) -> int | None:
    nz = [i for i, c in enumerate(v) if c]
    if len(nz) == 1 and v[nz[0]] == 1:
        return nz[0]
    return None


def strong_extinction_species_linear(net: ReactionNetwork) -> StrongExtinction:
    """Species that go extinct in a first-order, non weakly reversible network.

    Raises:
        NotFirstOrder: a source is not a single species, or a target is
            neither empty nor a single species.
        NotApplicable: the network is weakly reversible.
    """
    require_valid(net)
    for j, e in enumerate(net.edges):
        src, tgt = net.vertices[e.source], net.vertices[e.target]
        if _single_species(src) is None:
            raise NotFirstOrder(f"source of edge {j} ({net.complex_str(e.source)}) is not a single species")
        if any(tgt) and _single_species(tgt) is None:
            raise NotFirstOrder(f"target of edge {j} ({net.complex_str(e.target)}) is neither 0 nor a single species")
    if is_weakly_reversible(net):
        raise NotApplicable("network is weakly reversible; every species lies in a terminal component")

    scc = strongly_connected_components(net)
    terminal = {v for i in scc.terminal_ids() for v in scc.classes[i]}
    outside = {v for v in range(net.n_vertices) if v not in terminal}

    # layer by graph distance to the terminal set along edges
    layers: list[list[int]] = []
    reached = set(terminal)
    remaining = set(outside)
    while remaining:
        layer = sorted(v for v in remaining if any(e.source == v and e.target in reached for e in net.edges))
        if not layer:  # pragma: no cover - every vertex reaches a terminal component
            raise AssertionError("unreachable terminal set")
        layers.append(layer)
        # only the previous layer (or the terminal set for the first) counts as reached
        reached = set(layer)
        remaining -= reached

    def name(v):
        return net.species[_single_species(net.vertices[v])]

    return StrongExtinction(
        species=tuple(name(v) for v in sorted(outside)),
        layers=tuple(tuple(name(v) for v in layer) for layer in layers),
    )


@dataclass(frozen=True)
class HypothesisReport:
    deficiency: int
    weakly_reversible: bool
    conservative: bool
    consistent: bool


@dataclass(frozen=True)
class ExtinctionCertificate:
    kind: str  # "WeakGuaranteed" | "None"
    separator: tuple[int, ...] | None
    conservation: tuple[int, ...] | None
    hypotheses: HypothesisReport

    @property
    def guaranteed(self) -> bool:
        return self.kind == "WeakGuaranteed"


def weak_extinction_certificate(net: ReactionNetwork) -> ExtinctionCertificate:
    """Weak extinction is forced when a separator and a positive conservation law both exist.

    With ``w`` the separator, ``w . x`` strictly decreases on the positive
    orthant for any rates; with ``c > 0`` conserved, trajectories stay in a
    compact set, so their omega-limit sets lie on the boundary. For
    deficiency-zero networks that are not weakly reversible the separator is
    the one built by :func:`construct_w_deficiency_zero`; otherwise it is the
    exact inconsistency certificate.
    """
    require_valid(net)
    verdict = is_consistent(net)
    c = is_conservative(net)
    hyp = HypothesisReport(
        deficiency=deficiency(net).deficiency,
        weakly_reversible=is_weakly_reversible(net),
        conservative=c is not None,
        consistent=not isinstance(verdict, Inconsistent),
    )
    w = None
    if isinstance(verdict, Inconsistent):
        w = verdict.w
        if hyp.deficiency == 0 and not hyp.weakly_reversible:
            # the geometric construction is the route the deficiency-zero argument takes
            w = tuple(int(v) for v in construct_w_deficiency_zero(net)[0].w)
    kind = "WeakGuaranteed" if w is not None and c is not None else "None"
    return ExtinctionCertificate(kind, w, c, hyp)


@dataclass(frozen=True)
class SpeciesFate:
    species: str
    running_min: float
    tail_min: float
    tail_max: float
    final: float
    weak_candidate: bool
    strong_candidate: bool


def trajectory_extinction_report(
    traj, eps_weak: float = DEFAULT_EPS_WEAK, eps_strong: float = DEFAULT_EPS_STRONG
) -> list[SpeciesFate]:
    """Per-species evidence of weak (running minimum) and strong (tail maximum) extinction.

    The tail is the last 20% of samples, but never fewer than 50 (or all of
    them when the trajectory is shorter). These are numerical indications,
    not proofs.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if not 0 < eps_strong <= eps_weak:
        raise ValueError("need 0 < eps_strong <= eps_weak")
    X = np.asarray(traj.states)
    n_tail = min(len(X), max(TAIL_MIN_SAMPLES, int(np.ceil(TAIL_FRACTION * len(X)))))
    tail = X[-n_tail:]
    out = []
    for i, name in enumerate(traj.species):
        rmin = float(X[:, i].min())
        tmax = float(tail[:, i].max())
        out.append(
            SpeciesFate(
                species=name,
                running_min=rmin,
                tail_min=float(tail[:, i].min()),
                tail_max=tmax,
                final=float(X[-1, i]),
                weak_candidate=rmin < eps_weak,
                strong_candidate=tmax < eps_strong,
            )
        )
    return out
