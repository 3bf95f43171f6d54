"""Gauss-Laguerre quadrature rules for integrals against the weight e^{-x}.

Nodes are found by Newton iteration on the three-term Laguerre recurrence
with the standard asymptotic initial guesses (Numerical Recipes `gaulag`,
alpha=0).  The recurrence is rescaled on the fly so log-weights stay finite
up to order 200, where raw polynomial values overflow float64.

Every generated rule is validated against its moment invariants (weights sum
to one, low factorial moments) before it is returned, so a corrupted rule
can never silently poison downstream quadrature.  Rules are cached and
immutable; sharing across threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_ORDER = 200

_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITER = 100
_RESCALE_LIMIT = 1e250


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights approximating integral_0^inf e^{-x} f(x) dx.

    Exact for polynomials f of degree <= 2*order - 1.  `log_weights` carries
    ln(w_j) so evaluators can fold huge exponential factors into the weight
    without intermediate overflow.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self):
        for arr in (self.nodes, self.weights, self.log_weights):
            arr.setflags(write=False)


def _laguerre_newton(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (nodes, log_weights) of the order-point Laguerre rule."""
    n = order
    nodes = np.empty(n)
    log_w = np.empty(n)
    z = 0.0
    for i in range(1, n + 1):
        if i == 1:
            z = 3.0 / (1.0 + 2.4 * n)
        elif i == 2:
            z += 15.0 / (1.0 + 2.5 * n)
        else:
            ai = i - 2
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 3])
        p1 = p2 = pp = 0.0
        log_scale = 0.0
        for _ in range(_NEWTON_MAX_ITER):
            p1, p2 = 1.0, 0.0
            log_scale = 0.0
            for j in range(1, n + 1):
                p3 = p2
                p2 = p1
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j
                mag = abs(p1)
                if mag > _RESCALE_LIMIT:
                    p1 /= mag
                    p2 /= mag
                    log_scale += math.log(mag)
            pp = n * (p1 - p2) / z
            z_prev = z
            z = z_prev - p1 / pp
            if abs(z - z_prev) <= _NEWTON_TOL * max(1.0, abs(z)):
                break
        else:
            raise RuntimeError(f"Laguerre node {i} failed to converge at order {n}")
        nodes[i - 1] = z
        # w = -1 / (pp * n * p2); pp and p2 have opposite signs at every
        # root, so check signs instead of the (overflow-prone) product
        if pp == 0.0 or p2 == 0.0 or (pp < 0.0) == (p2 < 0.0):
            raise RuntimeError(f"Laguerre weight sign check failed at order {n}, node {i}")
        log_w[i - 1] = -(math.log(abs(pp)) + math.log(float(n)) + math.log(abs(p2))
                         + 2.0 * log_scale)
    return nodes, log_w


def factorial_moment_error(rule: QuadratureRule, k: int) -> float:
    """Relative error of the rule's k-th moment against k! (log-space sum)."""
    if k == 0:
        terms = np.exp(rule.log_weights)
    else:
        terms = np.exp(rule.log_weights + k * np.log(rule.nodes))
    target = math.exp(math.lgamma(k + 1.0))
    return abs(float(terms.sum()) - target) / target


def _validate(rule: QuadratureRule) -> None:
    x = rule.nodes
    if not (np.all(x > 0.0) and np.all(np.diff(x) > 0.0)):
        raise RuntimeError(f"Laguerre rule order {rule.order}: nodes not ascending positive")
    if not np.all(np.isfinite(rule.log_weights)):
        raise RuntimeError(f"Laguerre rule order {rule.order}: non-finite log-weights")
    if abs(float(rule.weights.sum()) - 1.0) > 1e-12:
        raise RuntimeError(f"Laguerre rule order {rule.order}: weights do not sum to 1")
    for k in range(1, min(2 * rule.order - 1, 20) + 1):
        if factorial_moment_error(rule, k) > 1e-9:
            raise RuntimeError(
                f"Laguerre rule order {rule.order}: moment k={k} off by more than 1e-9"
            )


_cache: dict[int, QuadratureRule] = {}


def gauss_laguerre_rule(order: int) -> QuadratureRule:
    """Validated Gauss-Laguerre rule of the given order (1..200), cached."""
    if not isinstance(order, int) or isinstance(order, bool):
        raise ValueError(f"order must be an integer, got {order!r}")
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [1, {MAX_ORDER}], got {order}")
    cached = _cache.get(order)
    if cached is not None:
        return cached
    nodes, log_w = _laguerre_newton(order)
    rule = QuadratureRule(order=order, nodes=nodes, weights=np.exp(log_w),
                          log_weights=log_w)
    _validate(rule)
    _cache[order] = rule
    return rule
