"""Exact jets, polynomial time functions and jet-space calculus.

The analytic-field derivative formula is checked against central finite
differences, and the JetPoly algebra against direct evaluation — these
are the oracles every higher-level identity test rests on.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaplane.jets import (
    MAX_JET_ORDER,
    AnalyticField,
    JetOrderError,
    TimeFunction,
    ZETA,
    analytic_jet,
    jp_add,
    jp_coord,
    jp_const,
    jp_eval,
    jp_mul,
    jp_order,
    jp_pow,
    jp_total_derivative,
    material_operator,
    multi_indices,
    zeta_derivative,
)

POINT = (0.4, -1.1, 0.7)


@pytest.fixture
def field():
    rng = np.random.default_rng(42)
    return AnalyticField.random(rng)


def central_fd(fn, x, h=1e-5):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def test_multi_indices_count():
    # number of alpha with |alpha| <= n in 3 variables is C(n+3, 3)
    for n in range(5):
        assert len(multi_indices(n)) == math.comb(n + 3, 3)
    assert multi_indices(1) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


@pytest.mark.parametrize("direction", range(3))
def test_analytic_derivative_matches_fd(field, direction):
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 1), (0, 2, 0)]
    for alpha in base:
        bumped = tuple(
            a + (1 if i == direction else 0) for i, a in enumerate(alpha)
        )

        def slice_fn(s):
            p = list(POINT)
            p[direction] = s
            return field.derivative(alpha, tuple(p))

        fd = central_fd(slice_fn, POINT[direction])
        exact = field.derivative(bumped, POINT)
        assert exact == pytest.approx(fd, rel=1e-7, abs=1e-7)


def test_jet_contains_all_indices(field):
    jet = analytic_jet(field, POINT, 4)
    for alpha in multi_indices(4):
        assert jet[alpha] == field.derivative(alpha, POINT)
    with pytest.raises(JetOrderError):
        jet[(5, 0, 0)]


def test_jet_order_cap(field):
    with pytest.raises(JetOrderError):
        analytic_jet(field, POINT, MAX_JET_ORDER + 1)


def test_shortest_wavelength(field):
    fmax = max(
        max(abs(om), abs(ka), abs(la)) for _, om, ka, la, _ in field.terms
    )
    assert field.shortest_wavelength() == pytest.approx(2.0 * np.pi / fmax)


# -- TimeFunction -----------------------------------------------------------


def test_time_function_evaluation_and_derivatives():
    # f(t) = 1 + 2t + 3t^2
    f = TimeFunction((1.0, 2.0, 3.0))
    assert f(0.5) == pytest.approx(1.0 + 1.0 + 0.75)
    assert f.derivative(1, 0.5) == pytest.approx(2.0 + 3.0)
    assert f.derivative(2, 0.5) == pytest.approx(6.0)
    assert f.derivative(3, 0.5) == 0.0


def test_time_function_from_taylor():
    f = TimeFunction.from_taylor(1.5, [2.0, -1.0, 4.0])
    assert f(1.5) == pytest.approx(2.0)
    assert f.derivative(1, 1.5) == pytest.approx(-1.0)
    assert f.derivative(2, 1.5) == pytest.approx(4.0)


def test_time_function_affine_argument():
    f = TimeFunction((0.0, 1.0, 2.0))  # t + 2t^2
    g = f.affine_argument(3.0, 0.5)  # g(s) = f(3s + 0.5)
    for s in (-1.0, 0.0, 0.7):
        assert g(s) == pytest.approx(f(3.0 * s + 0.5))


def test_time_function_algebra():
    f = TimeFunction((1.0, 2.0))
    g = TimeFunction((0.5, -1.0, 3.0))
    for t in (-0.3, 1.2):
        assert (f + g)(t) == pytest.approx(f(t) + g(t))
        assert (2.5 * f)(t) == pytest.approx(2.5 * f(t))


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=5),
    st.floats(-1.0, 1.0),
)
def test_time_function_derivative_consistency(coeffs, t):
    """d/dt of the polynomial matches the finite difference of itself."""
    f = TimeFunction(tuple(coeffs))
    fd = central_fd(f, t, h=1e-6)
    assert f.derivative(1, t) == pytest.approx(fd, rel=1e-5, abs=1e-5)


# -- JetPoly ---------------------------------------------------------------


def test_jp_eval_constant_and_coord(field):
    jet = analytic_jet(field, POINT, 2)
    assert jp_eval(jp_const(3.5), jet) == 3.5
    assert jp_eval(jp_coord((0, 1, 0)), jet) == field.derivative((0, 1, 0), POINT)


def test_jp_mul_matches_product(field):
    jet = analytic_jet(field, POINT, 2)
    p = jp_add(jp_coord((0, 1, 0)), jp_const(2.0))
    q = jp_add(jp_coord((0, 0, 1)), jp_coord((0, 1, 0)))
    lhs = jp_eval(jp_mul(p, q), jet)
    rhs = jp_eval(p, jet) * jp_eval(q, jet)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_jp_pow(field):
    jet = analytic_jet(field, POINT, 2)
    p = jp_add(jp_coord((0, 0, 0)), jp_const(1.0))
    assert jp_eval(jp_pow(p, 3), jet) == pytest.approx(
        jp_eval(p, jet) ** 3, rel=1e-13
    )


@pytest.mark.parametrize("direction", range(3))
def test_total_derivative_is_chain_rule(field, direction):
    """D_j of a polynomial evaluated on jets equals the FD of the
    evaluation along the corresponding coordinate."""
    p = jp_mul(ZETA, jp_coord((0, 1, 0)))  # zeta * psi_x
    dp = jp_total_derivative(p, direction)

    def value_at(s):
        pt = list(POINT)
        pt[direction] = s
        return jp_eval(p, analytic_jet(field, pt, 3))

    fd = central_fd(value_at, POINT[direction])
    exact = jp_eval(dp, analytic_jet(field, POINT, 4))
    assert exact == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_total_derivative_product_rule():
    p = jp_coord((0, 1, 0))
    q = jp_coord((0, 0, 1))
    lhs = jp_total_derivative(jp_mul(p, q), 1)
    rhs = jp_add(
        jp_mul(jp_total_derivative(p, 1), q),
        jp_mul(p, jp_total_derivative(q, 1)),
    )
    assert lhs == rhs


def test_jp_order():
    assert jp_order(jp_const(2.0)) == 0
    assert jp_order(zeta_derivative(1, 2, 0)) == 5


def test_material_operator_matches_composition(field):
    """(D_t - psi_y D_x) zeta evaluated on jets equals the explicit
    combination of total derivatives."""
    jet = analytic_jet(field, POINT, 3)
    lhs = jp_eval(material_operator(ZETA), jet)
    rhs = jp_eval(jp_total_derivative(ZETA, 0), jet) - field.derivative(
        (0, 0, 1), POINT
    ) * jp_eval(jp_total_derivative(ZETA, 1), jet)
    assert lhs == pytest.approx(rhs, rel=1e-13)
