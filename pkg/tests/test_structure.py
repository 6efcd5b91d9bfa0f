import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from crnext.errors import NonpositiveState
from crnext.model import MassActionSystem, RateAssignment
from crnext.structure import (
    Consistent,
    Inconsistent,
    conservation_laws,
    deficiency,
    deficiency_zero_diagnostics,
    is_complex_balanced_state,
    is_conservative,
    is_consistent,
    stoichiometric_rank,
)


def test_deficiency_reports(a_to_b, funnel, ivanova, feeder, triangle):
    r = deficiency(funnel)
    assert (r.num_vertices, r.num_linkage_classes, r.stoich_dim, r.deficiency) == (4, 1, 2, 1)
    assert deficiency(ivanova).deficiency == 2
    assert deficiency(a_to_b).deficiency == 0
    assert deficiency(feeder).deficiency == 0
    assert deficiency(triangle).deficiency == 0


def test_consistency_goldens(funnel, ivanova, triangle):
    assert is_consistent(funnel) == Inconsistent((-1, 1, 1))
    assert is_consistent(ivanova) == Consistent((2, 2, 1, 1))
    assert isinstance(is_consistent(triangle), Consistent)


def test_conservation(ivanova, a_to_b):
    assert is_conservative(ivanova) == (1, 1, 1)
    assert is_conservative(a_to_b) == (1, 1)
    assert conservation_laws(ivanova) == [(1, 1, 1)]


def test_inflow_is_not_conservative():
    from crnext.parser import parse_network

    net, _ = parse_network("0 -> X\n")
    assert is_conservative(net) is None
    assert conservation_laws(net) == []


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deficiency_against_sympy_and_networkx(seed):
    import networkx as nx

    net = netgen.random_network(np.random.default_rng(seed))
    s = sympy.Matrix(net.reaction_vectors).rank()
    g = nx.Graph()
    g.add_nodes_from(range(net.n_vertices))
    g.add_edges_from(net.edges)
    ell = nx.number_connected_components(g)
    r = deficiency(net)
    assert stoichiometric_rank(net) == s
    assert r.deficiency == net.n_vertices - ell - s >= 0
    assert deficiency_zero_diagnostics(net).holds == (r.deficiency == 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdicts_verify(seed):
    net = netgen.random_network(np.random.default_rng(seed))
    assert is_consistent(net).verify(net)
    c = is_conservative(net)
    if c is not None:
        assert min(c) > 0
        assert all(sum(a * b for a, b in zip(c, r)) == 0 for r in net.reaction_vectors)


def test_complex_balance(triangle, chain):
    sys = MassActionSystem(triangle, RateAssignment.uniform(3))
    check = is_complex_balanced_state(sys, [0.5, 0.5, 0.5])
    assert check.balanced and max(map(abs, check.residuals)) == 0
    assert not is_complex_balanced_state(sys, [1.0, 0.5, 0.5]).balanced
    with pytest.raises(NonpositiveState):
        is_complex_balanced_state(sys, [1.0, 0.0, 0.5])
    # chain has no positive complex-balanced state
    assert not is_complex_balanced_state(MassActionSystem(chain, RateAssignment.uniform(2)), [1, 1, 1]).balanced
