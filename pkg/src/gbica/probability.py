"""Finite-alphabet distributions, entropies, bit marginals and synthetic sources.

Symbols are integers in ``[0, m)``. A symbol's binary expansion has ``d``
bits and bit ``j = 1`` is the most significant one, so bit ``j`` of symbol
``i`` is ``(i >> (d - j)) & 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


def binary_entropy(p):
    """Entropy in bits of a Bernoulli(p) variable, ``0 log 0 = 0``.

    Accepts scalars or arrays; raises ``ValueError`` outside ``[0, 1]``.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("binary_entropy: probability outside [0, 1]")
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(arr > 0, -arr * np.log2(np.where(arr > 0, arr, 1.0)), 0.0)
        b = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    out = a + b
    return float(out) if out.ndim == 0 else out


def entropy_of(probs) -> float:
    """Shannon entropy in bits of a probability vector (compensated sum)."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return max(0.0, -math.fsum(p * np.log2(p)))


def bit_matrix(d: int) -> np.ndarray:
    """``(2^d, d)`` array of bits, column ``j-1`` holds bit ``j`` (MSB first)."""
    idx = np.arange(1 << d)
    shifts = np.arange(d - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def zero_indicator(d: int) -> np.ndarray:
    """Float matrix with 1 where bit ``j`` of symbol ``i`` is 0."""
    return (1 - bit_matrix(d)).astype(float)


def _log2_exact(m: int) -> int:
    if m < 1 or m & (m - 1):
        raise ValueError(f"alphabet size {m} is not a power of two")
    return m.bit_length() - 1


@dataclass(frozen=True)
class JointDistribution:
    """Probability vector over ``m = q**d`` symbols (``q = 2`` by default)."""

    probs: np.ndarray
    q: int = 2
    d: int = field(init=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("empty distribution")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(math.fsum(p) - 1.0) > NORM_TOL * max(1, math.sqrt(p.size)):
            raise ValueError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        d = round(math.log(p.size, self.q)) if p.size > 1 else 0
        if self.q ** d != p.size:
            raise ValueError(f"size {p.size} is not a power of {self.q}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_weights(cls, weights, q: int = 2) -> "JointDistribution":
        w = np.asarray(weights, dtype=float)
        return cls(w / math.fsum(w), q=q)

    @property
    def m(self) -> int:
        return self.probs.size

    def entropy(self) -> float:
        return entropy_of(self.probs)

    def marginals(self) -> np.ndarray:
        return marginal_bit_probs(self)

    def __len__(self):
        return self.m


@dataclass(frozen=True)
class EmpiricalCounts:
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def n0(self) -> int:
        return int(np.count_nonzero(self.counts))


def entropy(dist: JointDistribution) -> float:
    return dist.entropy()


def marginal_bit_probs(dist: JointDistribution) -> np.ndarray:
    """``pi_j = P(Y_j = 0)`` for ``j = 1..d``."""
    if dist.q != 2:
        raise ValueError("bit marginals need a binary alphabet")
    if dist.d == 0:
        return np.zeros(0)
    pi = dist.probs @ zero_indicator(dist.d)
    return np.clip(pi, 0.0, 1.0)


def sum_marginal_entropies(dist: JointDistribution) -> float:
    return float(np.sum(binary_entropy(marginal_bit_probs(dist))))


def qary_marginals(dist: JointDistribution) -> np.ndarray:
    """``(d, q)`` array with ``P(Y_j = v)``; digit ``j = 1`` is most significant."""
    q, d = dist.q, dist.d
    tensor = dist.probs.reshape((q,) * d)
    rows = []
    for j in range(d):
        axes = tuple(a for a in range(d) if a != j)
        rows.append(tensor.sum(axis=axes))
    return np.array(rows).reshape(d, q)


def sum_marginal_entropies_qary(dist: JointDistribution) -> float:
    return float(sum(entropy_of(row) for row in qary_marginals(dist)))


# -- generators ---------------------------------------------------------------

def gen_zipf(m: int, s: float) -> JointDistribution:
    """Zipf law ``P(k) ~ k^-s`` with rank ``k`` placed on symbol ``k - 1``."""
    if m < 1 or s < 0:
        raise ValueError("need m >= 1 and s >= 0")
    w = np.arange(1, m + 1, dtype=float) ** (-s)
    return JointDistribution(w / math.fsum(w))


def gen_uniform_simplex(m: int, rng) -> JointDistribution:
    """Flat Dirichlet draw as normalized exponential spacings."""
    rng = np.random.default_rng(rng)
    e = rng.exponential(size=m)
    return JointDistribution(e / math.fsum(e))


def uniform_simplex_batch(m: int, size: int, rng) -> np.ndarray:
    """``(size, m)`` array of flat Dirichlet draws."""
    rng = np.random.default_rng(rng)
    e = rng.exponential(size=(size, m))
    return e / e.sum(axis=1, keepdims=True)


def gen_markov(d: int, alpha: float, beta: float | None = None,
               p0: float | None = None) -> JointDistribution:
    """Law of ``d`` consecutive bits of a binary Markov chain.

    ``alpha`` is P(0 -> 1) and ``beta`` is P(1 -> 0); ``beta=None`` gives the
    symmetric chain. ``p0`` is P(first bit = 0); by default the chain starts
    in its stationary law.
    """
    beta = alpha if beta is None else beta
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError("flip probabilities must lie in (0, 1)")
    trans = np.array([[1 - alpha, alpha], [beta, 1 - beta]])
    if p0 is None:
        stat = np.array([beta, alpha]) / (alpha + beta)
    elif 0 <= p0 <= 1:
        stat = np.array([p0, 1 - p0])
    else:
        raise ValueError("p0 must lie in [0, 1]")
    bits = bit_matrix(d)
    p = stat[bits[:, 0]].astype(float)
    for j in range(1, d):
        p = p * trans[bits[:, j - 1], bits[:, j]]
    return JointDistribution(p / math.fsum(p))


def gen_markov_symmetric(d: int, alpha: float) -> JointDistribution:
    return gen_markov(d, alpha)


def empirical_distribution(samples, m: int):
    """Counts and maximum-likelihood distribution of a symbol sequence."""
    x = np.asarray(samples, dtype=np.int64).ravel()
    if x.size == 0:
        raise ValueError("no samples")
    if x.min() < 0 or x.max() >= m:
        raise ValueError("sample outside [0, m)")
    counts = np.bincount(x, minlength=m)
    return EmpiricalCounts(counts), JointDistribution(counts / x.size)


def sample(dist: JointDistribution, n: int, rng) -> np.ndarray:
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


# -- text formats -------------------------------------------------------------

def write_distribution(path, dist: JointDistribution) -> None:
    with open(path, "w") as fh:
        fh.write(f"{dist.m}\n")
        for v in dist.probs:
            fh.write(f"{v:.17g}\n")


def read_distribution(path) -> JointDistribution:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty distribution file")
    m = int(lines[0])
    if len(lines) - 1 != m:
        raise ValueError(f"{path}: header says {m} entries, found {len(lines) - 1}")
    return JointDistribution(np.array([float(v) for v in lines[1:]]))


def write_samples(path, samples) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(samples).ravel():
            fh.write(f"{int(v)}\n")


def read_samples(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([int(ln) for ln in fh if ln.strip()], dtype=np.int64)
