"""Exact solvers: recovery of hidden independent bits and a search-tree optimum."""
from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from .probability import JointDistribution, binary_entropy, bit_matrix, zero_indicator
from .transforms import PermutationTransform, cost

REL_TOL = 1e-9
DEFAULT_BNB_LIMIT = 4


class NotDecomposable(ValueError):
    """The distribution is not a relabeled product of independent bits."""


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def product_probs(pi) -> np.ndarray:
    """Word probabilities of independent bits with ``P(bit j = 0) = pi[j]``."""
    pi = np.asarray(pi, dtype=float)
    d = pi.size
    bits = bit_matrix(d)
    return np.prod(np.where(bits == 0, pi[None, :], 1.0 - pi[None, :]), axis=1)


def recover_independent_components(dist: JointDistribution, tol: float = REL_TOL):
    """Recover ``pi_1 >= ... >= pi_d`` (all <= 1/2) and a product-form transform.

    The smallest probability is the all-zero word. Each level takes the
    smallest probability not yet explained by the words built so far; its
    ratio to the smallest one fixes the next parameter, and the list of
    explained words doubles.

    Returns
    -------
    pi : ndarray, descending
    transform : PermutationTransform
        Maps ``dist`` onto the product distribution of ``pi``.
    """
    p = np.sort(dist.probs)
    d = dist.d
    if p[0] <= 0:
        raise NotDecomposable("a zero probability cannot come from non-degenerate independent bits")
    lam = np.array([p[0]])
    params = []
    for _ in range(d):
        cand = _first_unexplained(p, lam, tol)
        if cand is None:
            raise NotDecomposable("every probability is already explained before all levels were found")
        ratio = p[cand] / p[0]
        pik = 1.0 / (1.0 + ratio)
        if not (0.0 < pik <= 0.5 * (1 + tol)):
            raise NotDecomposable(f"candidate parameter {pik:.6g} lies outside (0, 1/2]")
        params.append(min(pik, 0.5))
        lam = np.sort(np.concatenate([lam, lam * ratio]))
    if lam.size != p.size or not all(_close(a, b, tol) for a, b in zip(lam * (1.0 / lam.sum()), p)):
        raise NotDecomposable("recovered parameters do not reproduce the distribution")
    pi = np.array(params)
    target = product_probs(pi)
    table = np.empty(dist.m, dtype=np.int64)
    table[np.argsort(dist.probs, kind="stable")] = np.argsort(target, kind="stable")
    return pi, PermutationTransform(table)


def _first_unexplained(p: np.ndarray, lam: np.ndarray, tol: float):
    """Index of the smallest entry of ``p`` not matched by the multiset ``lam``."""
    i = j = 0
    while i < p.size:
        if j < lam.size and _close(p[i], lam[j], tol):
            i += 1
            j += 1
            continue
        if j < lam.size and lam[j] < p[i]:
            raise NotDecomposable("a required product is missing from the distribution")
        return i
    return None


# -- search tree --------------------------------------------------------------

def _lower_bound(alloc_sum, free_count, rest_prefix):
    # smallest unallocated probabilities fill every free word of each bit
    lb = alloc_sum + rest_prefix[free_count]
    return float(np.sum(binary_entropy(np.clip(lb, 0.0, 0.5))))


def branch_and_bound_optimal(dist: JointDistribution, limit: int = DEFAULT_BNB_LIMIT,
                             prune: bool = True):
    """Global minimum of the sum of bit-marginal entropies over all relabelings.

    Probabilities are placed in ascending order; a word becomes available once
    every word with strictly more zero bits that dominates it has been
    filled. Bits are exchangeable, so single-one words are opened in a fixed
    order. Nodes are expanded best-lower-bound-first.
    """
    d = dist.d
    if d > limit:
        raise ValueError(f"branch and bound limited to d <= {limit} "
                         f"(m! = {math.factorial(1 << d):.3g} relabelings at d={d})")
    m = dist.m
    order = np.argsort(dist.probs, kind="stable")
    p = dist.probs[order]
    zero = zero_indicator(d)
    # prefix[r][c]: sum of the c smallest probabilities from rank r on
    prefix = [np.concatenate([[0.0], np.cumsum(p[r:])]) for r in range(m + 1)]
    zero_cnt = zero.sum(axis=0).astype(int)
    singletons = [1 << s for s in range(d)]  # bit d first, i.e. LSB-one word

    def available(filled, nxt_single):
        out = []
        for w in range(m):
            if filled >> w & 1:
                continue
            ok = True
            ones = w
            while ones:
                low = ones & -ones
                if not filled >> (w ^ low) & 1:
                    ok = False
                    break
                ones ^= low
            if not ok:
                continue
            if bin(w).count("1") == 1 and w != singletons[nxt_single]:
                continue
            out.append(w)
        return out

    # node: bound, tiebreak, rank, filled mask, next singleton, words, bit sums,
    # filled zero-words per bit
    start_sum = np.zeros(d)
    counter = itertools.count()
    heap = [(0.0, next(counter), 0, 0, 0, (), start_sum, np.zeros(d, dtype=int))]
    best_val = math.inf
    best_words = None
    while heap:
        bound, _, r, filled, ns, words, sums, used = heapq.heappop(heap)
        if prune and bound >= best_val - 1e-15:
            continue
        if r == m:
            val = float(np.sum(binary_entropy(np.clip(sums, 0.0, 1.0))))
            if val < best_val:
                best_val, best_words = val, words
            continue
        for w in available(filled, ns):
            nsums = sums + p[r] * zero[w]
            nfilled = filled | (1 << w)
            nns = ns + (1 if bin(w).count("1") == 1 else 0)
            nused = used + zero[w].astype(int)
            free = zero_cnt - nused
            nb = _lower_bound(nsums, free, prefix[r + 1]) if r + 1 < m else float(
                np.sum(binary_entropy(np.clip(nsums, 0.0, 1.0))))
            if prune and nb >= best_val - 1e-15:
                continue
            heapq.heappush(heap, (nb, next(counter), r + 1, nfilled, nns, words + (w,), nsums, nused))
    table = np.empty(m, dtype=np.int64)
    table[order] = np.array(best_words, dtype=np.int64)
    t = PermutationTransform(table)
    return t, cost(dist, t)


def exhaustive_optimum(dist: JointDistribution) -> float:
    """Minimum cost over all m! relabelings (small m only)."""
    m = dist.m
    if m > 8:
        raise ValueError("exhaustive search limited to m <= 8")
    perms = np.array(list(itertools.permutations(range(m))))
    placed = dist.probs[perms]  # placed[k, w] = prob at word w
    pis = placed @ zero_indicator(dist.d)
    vals = np.sum(binary_entropy(np.clip(pis, 0.0, 1.0)), axis=1)
    return float(vals.min() - dist.entropy())
