"""Linear transforms over GF(2): XOR entropies, a floor on any linear solution, and a greedy fit."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .probability import JointDistribution, binary_entropy
from .transforms import PermutationTransform, _parity, cost, linear_transform


def xor_prob_one(dist: JointDistribution) -> np.ndarray:
    """``P(parity(mask & X) = 1)`` for every mask, via a Walsh-Hadamard transform."""
    f = dist.probs.copy()
    h = 1
    while h < f.size:
        f = f.reshape(-1, 2, h)
        a, b = f[:, 0, :].copy(), f[:, 1, :].copy()
        f[:, 0, :] = a + b
        f[:, 1, :] = a - b
        f = f.reshape(-1)
        h *= 2
    return np.clip((1.0 - f) / 2.0, 0.0, 1.0)


def xor_prob_one_direct(dist: JointDistribution) -> np.ndarray:
    m = dist.m
    idx = np.arange(m)
    out = np.empty(m)
    for mask in range(m):
        out[mask] = dist.probs[_parity(idx & mask) == 1].sum()
    return out


def xor_entropy_table(dist: JointDistribution, direct: bool = False) -> np.ndarray:
    """Entropy of the XOR of the bits selected by every mask (mask 0 gives 0)."""
    p1 = xor_prob_one_direct(dist) if direct else xor_prob_one(dist)
    table = binary_entropy(p1)
    table[0] = 0.0
    return table


def linear_lower_bound(dist: JointDistribution) -> float:
    """Sum of the d smallest XOR entropies over non-zero masks."""
    table = xor_entropy_table(dist)[1:]
    return float(math.fsum(np.sort(table)[: dist.d]))


def gf2_rank(rows) -> int:
    basis = []
    for r in rows:
        r = int(r)
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def greedy_linear_bica(dist: JointDistribution):
    """Rows in ascending XOR entropy (ties by mask), skipping dependent ones.

    Returns the row masks of the invertible matrix and the resulting cost.
    """
    d = dist.d
    table = xor_entropy_table(dist)
    masks = np.arange(1, dist.m)
    ranked = masks[np.lexsort((masks, table[1:]))]
    rows, basis = [], []
    for mask in ranked:
        r = int(mask)
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            rows.append(int(mask))
            if len(rows) == d:
                break
    t = linear_transform(rows, d)
    return np.array(rows, dtype=np.int64), cost(dist, t)


def invertible_matrices(d: int):
    """All invertible d x d matrices over GF(2), as tuples of row masks."""
    m = 1 << d
    def extend(rows, span):
        if len(rows) == d:
            yield tuple(rows)
            return
        for r in range(1, m):
            if r in span:
                continue
            new_span = span | {s ^ r for s in span}
            yield from extend(rows + [r], new_span)
    yield from extend([], {0})


def exhaustive_linear_optimum(dist: JointDistribution) -> float:
    """Smallest cost over every invertible linear transform (d <= 4)."""
    if dist.d > 4:
        raise ValueError("exhaustive linear search limited to d <= 4")
    table = xor_entropy_table(dist)
    best = min(math.fsum(table[list(rows)]) for rows in invertible_matrices(dist.d))
    return max(0.0, best - dist.entropy())


def expected_row_draws(d: int) -> float:
    """Mean number of uniform row draws until d independent rows are found."""
    if d < 1:
        raise ValueError("d must be positive")
    return math.fsum(2.0 ** d / (2.0 ** d - 2.0 ** k) for k in range(d))


__all__ = ["xor_entropy_table", "linear_lower_bound", "greedy_linear_bica",
           "expected_row_draws", "gf2_rank", "exhaustive_linear_optimum", "invertible_matrices"]
