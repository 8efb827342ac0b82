"""Closed-form results for the order permutation over random and adversarial sources."""
from __future__ import annotations

import math

import numpy as np

from .probability import JointDistribution, binary_entropy

LN2 = math.log(2.0)
EULER_GAMMA = 0.57721566490153286061

# Bernoulli-number coefficients of the digamma asymptotic series
_PSI_COEF = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)


def digamma(x: float) -> float:
    """psi(x) for x > 0: upward recurrence to x >= 10, then the asymptotic series."""
    if x <= 0:
        raise ValueError("digamma implemented for positive arguments only")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k, c in enumerate(_PSI_COEF):
        series += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def harmonic(m: int) -> float:
    """K_m = sum_{k=1}^m 1/k; summed directly up to 2^20, series beyond."""
    if m < 0:
        raise ValueError("harmonic number of a negative index")
    if m <= 1 << 20:
        return math.fsum(1.0 / k for k in range(1, m + 1))
    return digamma(m + 1.0) + EULER_GAMMA


def expected_joint_entropy(m: int) -> float:
    """Mean entropy in bits of a flat-Dirichlet draw over ``m`` symbols."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return 0.0
    if m <= 1 << 20:
        # psi(m+1) - psi(2) = K_m - 1
        return (harmonic(m) - 1.0) / LN2
    return (digamma(m + 1.0) - digamma(2.0)) / LN2


def expected_order_stat(m: int, i: int) -> float:
    """Mean of the i-th smallest coordinate of a flat-Dirichlet draw."""
    if not 1 <= i <= m:
        raise ValueError("need 1 <= i <= m")
    if m <= 1 << 20:
        tail = math.fsum(1.0 / k for k in range(m - i + 1, m + 1))
    else:
        tail = digamma(m + 1.0) - digamma(m - i + 1.0)
    return tail / m


def expected_order_stats(m: int) -> np.ndarray:
    """All m expected order statistics, ascending."""
    inv = 1.0 / np.arange(1, m + 1, dtype=float)
    # K_m - K_{m-i}: cumulative sums of 1/k from the top
    tails = np.cumsum(inv[::-1])
    return tails / m


def marginal_bound_argument(j: int) -> float:
    """Upper bound on E[P(Y_j = 0)] after ordering, large-m limit."""
    if j < 1:
        raise ValueError("bit index starts at 1")
    n = 1 << j
    terms = []
    for i in range(1, n):
        x = i / n
        terms.append((1.0 if i % 2 else -1.0) * x * math.log(x))
    return math.fsum(terms) + 0.5


def avg_case_marginal_bound(d: int, j: int) -> float:
    """Bound on the expected entropy of bit j (``d`` only checks the range)."""
    if not 1 <= j <= max(d, j):
        raise ValueError("bit index out of range")
    return float(binary_entropy(min(0.5, marginal_bound_argument(j))))


def avg_case_cost_bound(d: int) -> float:
    """Bound on the mean order-permutation cost over the flat simplex.

    The first ten bits use the per-bit bounds; the remaining ones are
    charged one bit each.
    """
    if d < 10:
        raise ValueError(f"average-case cost bound needs d >= 10 (got d={d})")
    head = math.fsum(avg_case_marginal_bound(d, j) for j in range(1, 11))
    return head + (d - 10) - expected_joint_entropy(1 << d)


def worst_case_distribution(m: int) -> JointDistribution:
    if m < 2 or m & (m - 1):
        raise ValueError("m must be a power of two >= 2")
    p = np.full(m, 1.0 / (3.0 * (m - 1)))
    p[-1] = 2.0 / 3.0
    return JointDistribution(p)


def worst_case_cost(m: int) -> float:
    """Order-permutation cost of the worst-case distribution, closed form."""
    d = m.bit_length() - 1
    q = m / (6.0 * (m - 1))
    return (d * float(binary_entropy(q)) - math.log2(m - 1) / 3.0
            + math.log2(1 / 3) / 3.0 + 2.0 * math.log2(2 / 3) / 3.0)


def worst_case_limit() -> float:
    """Limit of worst-case cost / log2(m)."""
    return float(binary_entropy(1 / 6)) - 1 / 3
