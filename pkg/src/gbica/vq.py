"""Entropy-constrained vector quantization, its binary-component variant,
fixed lattice quantizers and the Gaussian rate-distortion reference."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bica_relax import relaxed_bica_binary
from .entropy_coding import kt_code_length
from .probability import JointDistribution, entropy_of, zero_indicator
from .transforms import order_permutation

CONV_TOL = 1e-9


@dataclass
class QuantizerModel:
    """Cluster assignment, centroids and per-cluster code lengths.

    ``labels[s]`` indexes ``centroids``. ``lengths`` are in bits. ``trace``
    holds the Lagrangian after each assignment step and ``step_trace`` the
    value after every individual step.
    """
    labels: np.ndarray
    centroids: np.ndarray
    lengths: np.ndarray
    lam: float
    trace: list = field(default_factory=list)
    step_trace: list = field(default_factory=list)
    words: np.ndarray | None = None

    @property
    def probs(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.centroids)) / self.labels.size

    def distortion(self, samples) -> float:
        x = np.asarray(samples, dtype=float)
        return float(np.mean(np.sum((x - self.centroids[self.labels]) ** 2, axis=1)))

    def rate(self) -> float:
        """Average code length in bits per sample."""
        return float(np.mean(self.lengths[self.labels]))

    def objective(self, samples) -> float:
        return self.distortion(samples) + self.lam * self.rate()


def _as_points(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _init_centroids(x: np.ndarray, k: int, rng) -> np.ndarray:
    if k < 1:
        raise ValueError("need at least one cluster")
    rng = np.random.default_rng(rng)
    idx = rng.choice(x.shape[0], size=min(k, x.shape[0]), replace=False)
    return x[idx].copy()


def _sqdist(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.sum((x[:, None, :] - c[None, :, :]) ** 2, axis=2)


def _centroids(x, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    return sums, counts


def lloyd(samples, m_clusters: int, max_iters: int = 100, rng=None, init=None) -> QuantizerModel:
    """Plain k-means; empty clusters are dropped. ``trace`` is the distortion
    after each assignment step."""
    x = _as_points(samples)
    c = np.array(init, dtype=float) if init is not None else _init_centroids(x, m_clusters, rng)
    trace = []
    for _ in range(max_iters):
        dist = _sqdist(x, c)
        labels = np.argmin(dist, axis=1)
        trace.append(float(np.mean(dist[np.arange(x.shape[0]), labels])))
        sums, counts = _centroids(x, labels, len(c))
        keep = counts > 0
        remap = np.cumsum(keep) - 1
        c = sums[keep] / counts[keep, None]
        labels = remap[labels]
        if len(trace) > 1 and trace[-2] - trace[-1] < CONV_TOL:
            break
    return QuantizerModel(labels, c, np.zeros(len(c)), 0.0, trace)


def ecvq(samples, m_clusters: int, lam: float, max_iters: int = 100, rng=None,
         init=None) -> QuantizerModel:
    """Biased clustering, ideal code lengths, centroid update, repeated.

    Lengths start uniform at ``log2(m_clusters)``. Clusters that lose all
    their samples are dropped for good.
    """
    x = _as_points(samples)
    n = x.shape[0]
    c = np.array(init, dtype=float) if init is not None else _init_centroids(x, m_clusters, rng)
    lengths = np.full(len(c), math.log2(max(len(c), 1)))
    trace, steps = [], []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        # assignment: nearest centroid biased by lam * length
        dist = _sqdist(x, c)
        score = dist + lam * lengths[None, :]
        labels = np.argmin(score, axis=1)
        val = float(np.mean(score[np.arange(n), labels]))
        trace.append(val)
        steps.append(val)
        # lengths: -log2 of cluster frequency, empty clusters dropped
        sums, counts = _centroids(x, labels, len(c))
        keep = counts > 0
        remap = np.cumsum(keep) - 1
        labels = remap[labels]
        counts, sums, c = counts[keep], sums[keep], c[keep]
        p = counts / n
        lengths = -np.log2(p)
        steps.append(float(np.mean(np.sum((x - c[labels]) ** 2, axis=1)) + lam * np.dot(p, lengths)))
        # centroids
        c = sums / counts[:, None]
        steps.append(float(np.mean(np.sum((x - c[labels]) ** 2, axis=1)) + lam * np.dot(p, lengths)))
        if len(trace) > 1 and trace[-2] - trace[-1] < CONV_TOL:
            break
    return QuantizerModel(labels, c, lengths, lam, trace, steps)


def marginal_code_lengths(probs, table: np.ndarray) -> np.ndarray:
    """Per-symbol length ``sum_j -log2 P(Y_j = y_j)`` after relabeling by ``table``."""
    p = np.asarray(probs, dtype=float)
    m = p.size
    d = m.bit_length() - 1
    zero = zero_indicator(d)
    placed = np.bincount(table, weights=p, minlength=m)
    pi0 = placed @ zero
    words = table
    z = zero[words]
    with np.errstate(divide="ignore"):
        l0, l1 = -np.log2(pi0), -np.log2(1.0 - pi0)
    return np.where(z == 1, l0[None, :], l1[None, :]).sum(axis=1)


def _relabel(p: np.ndarray, k: int | None) -> np.ndarray:
    dist = JointDistribution(p)
    if k is None:
        return order_permutation(dist).table
    return relaxed_bica_binary(dist, k=k)[0].table


def bica_ecvq(samples, m_clusters: int, lam: float, k: int | None = None, max_iters: int = 100,
              rng=None, init=None) -> QuantizerModel:
    """ECVQ whose codes are built per binary component of a relabeled index.

    Cluster indices live in ``2^b`` words. Each length step relabels the
    indices (order permutation, or relaxed search when ``k`` is given) and
    keeps whichever of the new and previous relabelings gives the lower
    objective. Dropped clusters stay in the index space with zero mass.
    """
    if m_clusters < 2 or m_clusters & (m_clusters - 1):
        raise ValueError("m_clusters must be a power of two")
    x = _as_points(samples)
    n = x.shape[0]
    c = np.array(init, dtype=float) if init is not None else _init_centroids(x, m_clusters, rng)
    if len(c) != m_clusters:
        raise ValueError("need one initial centroid per cluster")
    alive = np.ones(m_clusters, dtype=bool)
    lengths = np.full(m_clusters, math.log2(m_clusters))
    table = np.arange(m_clusters)
    trace, steps = [], []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        dist = _sqdist(x, c)
        bias = np.where(alive, lam * lengths if lam else 0.0, np.inf)
        score = dist + bias[None, :]
        labels = np.argmin(score, axis=1)
        val = float(np.mean(score[np.arange(n), labels]))
        trace.append(val)
        steps.append(val)
        counts = np.bincount(labels, minlength=m_clusters)
        alive = counts > 0
        p = counts / n
        mean_d = float(np.mean(dist[np.arange(n), labels]))
        best = None
        for cand in (table, _relabel(p, k)):
            lens = marginal_code_lengths(p, cand)
            obj = mean_d + lam * float(np.dot(p[alive], lens[alive]))
            if best is None or obj < best[0] - 1e-15:
                best = (obj, cand, lens)
        _, table, lengths = best
        steps.append(best[0])
        sums, _ = _centroids(x, labels, m_clusters)
        c = c.copy()
        c[alive] = sums[alive] / counts[alive, None]
        steps.append(float(np.mean(np.sum((x - c[labels]) ** 2, axis=1)))
                     + lam * float(np.dot(p[alive], lengths[alive])))
        if len(trace) > 1 and trace[-2] - trace[-1] < CONV_TOL:
            break
    lengths = np.where(alive, lengths, np.inf)
    return QuantizerModel(labels, c, lengths, lam, trace, steps, words=table)


# -- lattices -------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    family: str = "Z"
    delta: float = 1.0
    radius: float = 5.0

    def __post_init__(self):
        if self.family not in ("Z", "D"):
            raise ValueError("lattice family must be 'Z' or 'D'")
        if not self.delta > 0:
            raise ValueError("scale must be positive")


@dataclass
class LatticeResult:
    points: np.ndarray
    symbols: np.ndarray
    counts: np.ndarray
    cells: np.ndarray
    distortion: float

    @property
    def n_cells(self) -> int:
        return self.counts.size

    def joint_distribution(self) -> JointDistribution:
        """Occupied-cell frequencies, zero-padded to a power-of-two alphabet."""
        size = 1 << max(1, (self.counts.size - 1).bit_length())
        p = np.zeros(size)
        p[: self.counts.size] = self.counts / self.counts.sum()
        return JointDistribution(p)


def nearest_z(u: np.ndarray) -> np.ndarray:
    return np.round(u)


def nearest_d(u: np.ndarray) -> np.ndarray:
    """Nearest point of the checkerboard lattice (integer vectors with even sum)."""
    f = np.round(u)
    odd = (f.sum(axis=1) % 2) != 0
    if odd.any():
        # re-round the worst coordinate the other way
        err = u - f
        j = np.argmax(np.abs(err), axis=1)
        rows = np.flatnonzero(odd)
        jj = j[rows]
        e = err[rows, jj]
        f[rows, jj] += np.where(e >= 0, 1.0, -1.0)
    return f


def lattice_quantize(samples, spec: LatticeSpec, sigma=None) -> LatticeResult:
    """Nearest lattice point inside a sphere of radius ``spec.radius`` (in
    per-dimension standard deviations); samples beyond it are first pulled
    onto the sphere. ``distortion`` is the mean squared error per dimension."""
    x = _as_points(samples)
    s = np.std(x, axis=0) if sigma is None else np.broadcast_to(np.asarray(sigma, dtype=float), x.shape[1])
    s = np.where(s > 0, s, 1.0)
    z = x / s
    norm = np.linalg.norm(z, axis=1)
    far = norm > spec.radius
    z = z.copy()
    z[far] *= (spec.radius / norm[far])[:, None]
    u = z * s / spec.delta
    lat = nearest_z(u) if spec.family == "Z" else nearest_d(u)
    points = lat * spec.delta
    cells, symbols, counts = np.unique(lat.astype(np.int64), axis=0, return_inverse=True, return_counts=True)
    distortion = float(np.mean((x - points) ** 2))
    return LatticeResult(points, symbols.ravel(), counts, cells, distortion)


def marginal_joint_gap(counts, k: int | None = None) -> tuple[float, float]:
    """Empirical joint entropy and the binary-marginal sum after relabeling."""
    c = np.asarray(counts, dtype=float)
    size = 1 << max(1, (c.size - 1).bit_length())
    p = np.zeros(size)
    p[: c.size] = c / c.sum()
    table = _relabel(p, k)
    placed = np.bincount(table, weights=p, minlength=size)
    pi0 = placed @ zero_indicator(size.bit_length() - 1)
    joint = entropy_of(p)
    marg = math.fsum(entropy_of([q, 1.0 - q]) for q in pi0)
    return joint, marg


def lattice_cell_count(spec: LatticeSpec, sigma) -> int:
    """Approximate number of lattice points inside the clipping ellipsoid.

    This is the alphabet a decoder has to allow for; it does not know which
    cells the data actually hit.
    """
    s = np.atleast_1d(np.asarray(sigma, dtype=float))
    d = s.size
    ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * spec.radius ** d * float(np.prod(s))
    cell = spec.delta ** d * (2.0 if spec.family == "D" else 1.0)
    return max(1, math.ceil(ball / cell))


def adaptive_rate(symbols, alphabet: int) -> float:
    """Ideal add-1/2 adaptive code length in bits per sample."""
    s = np.asarray(symbols)
    return kt_code_length(s, alphabet) / s.size


def gaussian_rate_distortion(d: int, D: float) -> float:
    """``max((d/2) log2(d/D), 0)`` for a standard normal vector under total
    squared-error distortion ``D``."""
    if d < 1:
        raise ValueError("d must be positive")
    if not D > 0:
        raise ValueError("distortion must be positive")
    return max(0.5 * d * math.log2(d / D), 0.0)


__all__ = [
    "QuantizerModel", "lloyd", "ecvq", "bica_ecvq", "marginal_code_lengths",
    "LatticeSpec", "LatticeResult", "lattice_quantize", "nearest_z", "nearest_d",
    "marginal_joint_gap", "adaptive_rate", "lattice_cell_count", "gaussian_rate_distortion",
]
