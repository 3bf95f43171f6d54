"""Gauss-Laguerre rule tests: closed-form low orders, moment exactness, and
a cross-check against an independent implementation (scipy)."""

import math

import numpy as np
import pytest

from tncsim.quadrature import (
    MAX_ORDER,
    QuadratureRule,
    factorial_moment_error,
    gauss_laguerre_rule,
)

MOMENT_ORDERS = (1, 2, 5, 10, 30, 60)


def test_order_one_is_trivial():
    rule = gauss_laguerre_rule(1)
    # L_1(x) = 1 - x has its single root at 1 with unit weight
    assert math.isclose(rule.nodes[0], 1.0, rel_tol=1e-14)
    assert math.isclose(rule.weights[0], 1.0, rel_tol=1e-14)


def test_order_two_closed_form():
    rule = gauss_laguerre_rule(2)
    assert math.isclose(rule.nodes[0], 2.0 - math.sqrt(2.0), rel_tol=1e-13)
    assert math.isclose(rule.nodes[1], 2.0 + math.sqrt(2.0), rel_tol=1e-13)
    # weights follow from the 2-point moment system:
    # w1 + w2 = 1, w1 x1 + w2 x2 = 1  =>  w1 = (x2 - 1) / (x2 - x1)
    x1, x2 = rule.nodes
    w1 = (x2 - 1.0) / (x2 - x1)
    assert math.isclose(rule.weights[0], w1, rel_tol=1e-13)
    assert math.isclose(rule.weights[1], 1.0 - w1, rel_tol=1e-13)
    # and the system is consistent with the second moment
    assert math.isclose(float(rule.weights @ rule.nodes ** 2), 2.0, rel_tol=1e-13)


@pytest.mark.parametrize("order", MOMENT_ORDERS)
def test_factorial_moments(order):
    rule = gauss_laguerre_rule(order)
    worst = max(factorial_moment_error(rule, k) for k in range(0, 2 * order))
    assert worst <= 1e-9


@pytest.mark.parametrize("order", (1, 2, 5, 10, 30, 60, 120, 200))
def test_rule_invariants(order):
    rule = gauss_laguerre_rule(order)
    assert rule.order == order
    assert len(rule.nodes) == order
    assert np.all(rule.nodes > 0.0)
    assert np.all(np.diff(rule.nodes) > 0.0)
    assert np.all(np.isfinite(rule.log_weights))
    assert abs(float(rule.weights.sum()) - 1.0) <= 1e-12


@pytest.mark.parametrize("order", MOMENT_ORDERS)
def test_weights_positive(order):
    assert np.all(gauss_laguerre_rule(order).weights > 0.0)


def test_deterministic_and_cached():
    a = gauss_laguerre_rule(30)
    b = gauss_laguerre_rule(30)
    assert a is b
    np.testing.assert_array_equal(a.nodes, b.nodes)


def test_immutable():
    rule = gauss_laguerre_rule(5)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


@pytest.mark.parametrize("order", (0, -3, MAX_ORDER + 1))
def test_order_domain_errors(order):
    with pytest.raises(ValueError):
        gauss_laguerre_rule(order)


def test_non_integer_order_rejected():
    with pytest.raises(ValueError):
        gauss_laguerre_rule(2.5)


@pytest.mark.parametrize("order", (30, 64))
def test_against_scipy(order):
    from scipy.special import roots_laguerre

    rule = gauss_laguerre_rule(order)
    x_ref, w_ref = roots_laguerre(order)
    np.testing.assert_allclose(rule.nodes, x_ref, rtol=1e-12)
    np.testing.assert_allclose(rule.weights, w_ref, rtol=1e-11)


def test_log_weights_match_weights():
    rule = gauss_laguerre_rule(40)
    np.testing.assert_allclose(np.exp(rule.log_weights), rule.weights, rtol=1e-15)


def test_direct_construction_skips_validation():
    # the perturbation hook for consistency testing: building a rule by hand
    # must not go through generation-time validation
    base = gauss_laguerre_rule(10)
    w = base.weights * 1.001
    perturbed = QuadratureRule(order=10, nodes=base.nodes.copy(), weights=w,
                               log_weights=np.log(w))
    assert abs(float(perturbed.weights.sum()) - 1.0) > 1e-4
