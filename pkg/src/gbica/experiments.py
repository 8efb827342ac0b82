"""Reproducible experiment harness. Each experiment returns rows of named
numbers that can be written as CSV; all computation lives in the library
modules."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bica_linear, bica_relax, universal, vq
from .entropy_coding import huffman_build
from .probability import (
    JointDistribution,
    binary_entropy,
    entropy_of,
    gen_uniform_simplex,
    gen_zipf,
    sample,
)
from .transforms import apply, cost, order_permutation


@dataclass
class ExperimentReport:
    id: str
    params: dict
    seed: int
    columns: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("GBICA_THREADS", "1")))
    except ValueError:
        raise ValueError("GBICA_THREADS must be an integer") from None


def _parallel(fn, jobs):
    n = thread_count()
    if n == 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs))


def _trial_seeds(seed: int, count: int):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _block_entropies(dist: JointDistribution, widths) -> float:
    """Sum of entropies of contiguous bit groups (MSB first)."""
    d = dist.d
    p = dist.probs.reshape([2] * d)
    total, start = 0.0, 0
    for w in widths:
        axes = tuple(a for a in range(d) if not start <= a < start + w)
        total += entropy_of(p.sum(axis=axes).ravel())
        start += w
    return total


# -- experiments ---------------------------------------------------------------

def classic_zipf(params, seed):
    m = int(params.get("m", 1 << 10))
    s_grid = params.get("s_grid", [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4])
    rows = []
    for s in s_grid:
        dist = gen_zipf(m, float(s))
        y = apply(order_permutation(dist), dist)
        d = y.d
        rows.append({
            "s": float(s),
            "H": dist.entropy(),
            "huffman_len": huffman_build(dist.probs).average_length(dist.probs),
            "marginal_len": float(np.sum(binary_entropy(y.marginals()))),
            "twoblock_len": _block_entropies(y, [d - d // 2, d // 2]),
        })
    return ["s", "H", "huffman_len", "marginal_len", "twoblock_len"], rows


def universal_blocks(params, seed):
    d = int(params.get("d", 12))
    n = int(params.get("n", 10 ** 5))
    s = float(params.get("s", 1.2))
    iters = int(params.get("iters", 20))
    k = int(params.get("k", 8))
    blocks = params.get("B_list", [2, 3, 4])
    x = sample(gen_zipf(1 << d, s), n, np.random.default_rng(seed))
    baseline = universal.whole_alphabet_total(x, 1 << d)

    def run(B):
        return B, universal.blockwise_pipeline(x, d, B, max_iters=iters, k=k, rng=seed + B)

    rows = []
    for B, st in _parallel(run, [b for b in blocks if d % b == 0]):
        for i, (bs, tot) in enumerate(zip(st.block_trace, st.totals), start=1):
            rows.append({"B": B, "iteration": i, "sum_marginal_entropy": st.marginal_trace[i],
                         "sum_block_entropy": bs, "total_bits": tot, "selected": int(i == st.I0),
                         "baseline_bits": baseline})
    cols = ["B", "iteration", "sum_marginal_entropy", "sum_block_entropy", "total_bits",
            "selected", "baseline_bits"]
    return cols, rows


def adaptive(params, seed):
    d_list = params.get("d_list", [6])
    n_list = params.get("n_list", [100, 200, 500, 1000])
    s = float(params.get("s", 1.0))
    from .entropy_coding import adaptive_arithmetic_encode
    rows = []
    for d in d_list:
        m = 1 << int(d)
        dist = gen_zipf(m, s)
        for n in n_list:
            x = sample(dist, int(n), np.random.default_rng([seed, int(d), int(n)]))
            counts = np.bincount(x, minlength=m)
            rows.append({
                "d": int(d), "n": int(n),
                "empirical_entropy": entropy_of(counts[counts > 0] / n),
                "adaptive_arith": adaptive_arithmetic_encode(x, m).nbits / n,
                "perm_marginal": universal.container_bits(
                    universal.permutation_coded_encode(x, m, "adaptive", "marginal")) / n,
                "perm_block": universal.container_bits(
                    universal.permutation_coded_encode(x, m, "adaptive", "block")) / n,
                "fixed_block": universal.container_bits(
                    universal.permutation_coded_encode(x, m, "fixed", "block", reference=dist)) / n,
            })
    return ["d", "n", "empirical_entropy", "adaptive_arith", "perm_marginal", "perm_block",
            "fixed_block"], rows


def mixture_2d(n: int, rng) -> np.ndarray:
    """Two unit-variance Gaussian blobs, weights 0.7 / 0.3, centers 3 apart per axis."""
    rng = np.random.default_rng(rng)
    x = rng.standard_normal((n, 2))
    x[rng.random(n) < 0.3] += 3.0
    return x


def ecvq_sweep(params, seed):
    n = int(params.get("n", 1000))
    clusters = int(params.get("m", 16))
    lambdas = params.get("lambdas", [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0])
    x = mixture_2d(n, seed)
    init = x[np.random.default_rng(seed + 1).choice(n, clusters, replace=False)]
    rows = []
    for lam in lambdas:
        a = vq.ecvq(x, clusters, float(lam), init=init)
        b = vq.bica_ecvq(x, clusters, float(lam), init=init)
        rows.append({"lambda": float(lam), "distortion": a.distortion(x), "rate_joint": a.rate(),
                     "bica_distortion": b.distortion(x), "rate_marginal_sum": b.rate()})
    return ["lambda", "distortion", "rate_joint", "bica_distortion", "rate_marginal_sum"], rows


def lattice_sweep(params, seed):
    d = int(params.get("d", 3))
    n = int(params.get("n", 10 ** 5))
    family = params.get("family", "Z")
    deltas = params.get("deltas", [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0])
    x = np.random.default_rng(seed).standard_normal((n, d))
    sigma = x.std(axis=0)
    rows = []
    for delta in deltas:
        spec = vq.LatticeSpec(family, float(delta))
        r = vq.lattice_quantize(x, spec, sigma=sigma)
        joint, marg = vq.marginal_joint_gap(r.counts)
        alphabet = max(r.n_cells, vq.lattice_cell_count(spec, sigma))
        rows.append({"delta": float(delta), "distortion": r.distortion, "cells": r.n_cells,
                     "rate_joint": joint / d, "rate_marginal_sum": marg / d,
                     "rate_adaptive": vq.adaptive_rate(r.symbols, alphabet) / d,
                     "rate_bound": vq.gaussian_rate_distortion(d, d * r.distortion) / d})
    return ["delta", "distortion", "cells", "rate_joint", "rate_marginal_sum", "rate_adaptive",
            "rate_bound"], rows


def linear_compare(params, seed):
    d_list = params.get("d_list", [2, 3, 4, 5, 6, 8])
    trials = int(params.get("trials", 20))
    jobs = [(d, t, s) for d in d_list for t, s in enumerate(_trial_seeds(seed + d, trials))]

    def run(job):
        d, t, s = job
        dist = gen_uniform_simplex(1 << d, np.random.default_rng(s))
        h = dist.entropy()
        _, greedy = bica_linear.greedy_linear_bica(dist)
        row = {"d": d, "trial": t, "order_cost": cost(dist, order_permutation(dist)),
               "linear_greedy_cost": greedy,
               "linear_lower_bound": max(0.0, bica_linear.linear_lower_bound(dist) - h),
               "identity_cost": cost(dist)}
        row["relaxed_cost"] = bica_relax.relaxed_bica_binary(dist)[1] if d <= 8 else math.nan
        return row

    cols = ["d", "trial", "identity_cost", "order_cost", "relaxed_cost", "linear_greedy_cost",
            "linear_lower_bound"]
    return cols, _parallel(run, jobs)


EXPERIMENTS = {
    "classic-zipf": classic_zipf,
    "universal-blocks": universal_blocks,
    "adaptive": adaptive,
    "ecvq": ecvq_sweep,
    "lattice": lattice_sweep,
    "linear-compare": linear_compare,
}


def run_experiment(exp_id: str, params: dict | None = None, seed: int = 0) -> ExperimentReport:
    if exp_id not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {exp_id!r}; choose from {sorted(EXPERIMENTS)}")
    params = dict(params or {})
    cols, rows = EXPERIMENTS[exp_id](params, int(seed))
    return ExperimentReport(exp_id, params, int(seed), cols, rows)


# -- word-frequency ingestion ----------------------------------------------------

def ingest_word_frequencies(path, d: int):
    """Read ``word<TAB>count`` lines into a distribution over ``2^d`` symbols.

    Symbol 0 is the most frequent word; ties keep file order. Words beyond
    the first ``2^d`` have their mass folded into the last symbol. Returns
    the distribution and the list of words by symbol (``None`` for unused
    symbols).
    """
    counts: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count'")
            word, raw = parts
            try:
                c = int(raw)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: count {raw!r} is not an integer") from None
            if c < 0 or not word:
                raise ValueError(f"{path}:{lineno}: empty word or negative count")
            counts[word] = counts.get(word, 0) + c
    if not counts:
        raise ValueError(f"{path}: no entries")
    m = 1 << d
    ranked = sorted(counts.items(), key=lambda kv: -kv[1])  # stable: file order on ties
    weights = np.zeros(m)
    words: list = [None] * m
    for i, (w, c) in enumerate(ranked):
        slot = min(i, m - 1)
        weights[slot] += c
        if i < m:
            words[i] = w
    total = weights.sum()
    if total <= 0:
        raise ValueError(f"{path}: all counts are zero")
    return JointDistribution(weights / total), words


def write_symbol_map(path, words) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, w in enumerate(words):
            if w is not None:
                fh.write(f"{i}\t{w}\n")


__all__ = ["ExperimentReport", "run_experiment", "EXPERIMENTS", "ingest_word_frequencies",
           "write_symbol_map", "mixture_2d", "thread_count"]
