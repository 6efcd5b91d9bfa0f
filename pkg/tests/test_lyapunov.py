from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from crnext.dynamics import rhs
from crnext.errors import NonpositiveState, NotApplicable, NotASeparator, NotDeficiencyZero
from crnext.exact import dot
from crnext.lyapunov import (
    construct_w_deficiency_zero,
    hj_gradient,
    hj_value,
    lyapunov_from_separator,
    vdot,
)
from crnext.model import MassActionSystem, RateAssignment


def test_feeder_construction(feeder):
    lf, tr = construct_w_deficiency_zero(feeder)
    assert tuple(lf.w) == (2, -1, -1)
    assert tr.terminal_scc == (1, 2) and tr.component == (0,)
    assert tr.crossing_edges == (0,)
    assert lf.edge_signs == ("-", "0", "0")
    assert (tr.dim_S, tr.dim_S1, tr.dim_S2) == (2, 0, 1)


def test_construction_preconditions(triangle, funnel):
    with pytest.raises(NotApplicable):
        construct_w_deficiency_zero(triangle)
    with pytest.raises(NotDeficiencyZero):
        construct_w_deficiency_zero(funnel)


def test_separator_checks(funnel):
    lf = lyapunov_from_separator(funnel, (-1, 1, 1))
    assert lf.strict_edges == [0, 1, 2]
    with pytest.raises(NotASeparator) as info:
        lyapunov_from_separator(funnel, (1, 0, 0))
    assert info.value.edge == 0
    with pytest.raises(NotASeparator):
        lyapunov_from_separator(funnel, (0, 0, 0))


def test_vdot_is_gradient_dot_rhs(funnel):
    sys = MassActionSystem(funnel, RateAssignment((1.0, 2.0, 0.5)))
    x = np.array([0.3, 0.7, 1.1])
    assert vdot(sys, (-1, 1, 1), x) == pytest.approx(np.dot([-1, 1, 1], rhs(sys, x)))
    with pytest.raises(NonpositiveState):
        vdot(sys, (-1, 1, 1), [0.0, 1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_constructed_w_decreases_for_any_rates(seed):
    rng = np.random.default_rng(seed)
    net = netgen.random_deficiency_zero_non_wr(rng)
    lf, _ = construct_w_deficiency_zero(net)
    sys = MassActionSystem(net, RateAssignment(tuple(float(v) for v in rng.uniform(0.1, 10, net.n_edges))))
    for x in netgen.random_positive_states(rng, net.n_species, 100):
        assert vdot(sys, lf.w, x) < 0


def test_horn_jackson_decreases_on_complex_balanced_system(triangle):
    sys = MassActionSystem(triangle, RateAssignment((1.0, 2.0, 3.0)))
    # complex balanced state: k1 a = k2 b = k3 c
    xstar = np.array([6.0, 3.0, 2.0]) / 11
    rng = np.random.default_rng(3)
    for x in netgen.random_positive_states(rng, 3, 50):
        assert np.dot(hj_gradient(x, xstar), rhs(sys, x)) <= 1e-12
    assert hj_value(xstar, xstar) <= hj_value(xstar * 1.1, xstar)
    with pytest.raises(NonpositiveState):
        hj_value([0.0, 1.0, 1.0], xstar)


def test_w_is_exact(feeder):
    lf, _ = construct_w_deficiency_zero(feeder)
    assert all(isinstance(c, Fraction) for c in lf.w)
    assert dot(lf.w, feeder.reaction_vectors[0]) == -3


def test_vdot_golden(funnel):
    sys = MassActionSystem(funnel, RateAssignment.uniform(3))
    w = (-1, Fraction(1, 2), Fraction(1, 2))
    assert vdot(sys, w, [1.0, 1.0, 1.0]) == pytest.approx(-4.5)
    # -(3/2)(x1 x2 + x2 x3 + x1 x3) at another point
    x = np.array([0.2, 0.5, 1.3])
    assert vdot(sys, w, x) == pytest.approx(-1.5 * (x[0] * x[1] + x[1] * x[2] + x[0] * x[2]))
    assert vdot(sys, (1, 1, 1), x) == 0
