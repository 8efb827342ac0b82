"""Piecewise-linear relaxation of the sum-of-marginal-entropies objective.

With every marginal entropy replaced by a linear piece, the objective becomes
linear in the placement of probabilities on words, and the best placement is
a sort: the largest probability goes to the word with the smallest
coefficient. Enumerating which piece each component sits on, and keeping
placements that land inside the pieces they assumed, solves the relaxed
problem exactly.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .probability import JointDistribution, binary_entropy, qary_marginals, zero_indicator
from .transforms import PermutationTransform, cost

DEFAULT_K = 8
FEAS_TOL = 1e-9
ROW_BUDGET_BYTES = 1 << 30
CHUNK_ROWS = 1024


@dataclass(frozen=True)
class PiecewiseLinearBound:
    """k linear pieces over ``[lo, hi]``; piece v covers ``[breaks[v], breaks[v+1]]``."""

    breaks: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray
    kind: str

    @property
    def k(self) -> int:
        return self.slopes.size

    def region(self, p):
        p = np.asarray(p, dtype=float)
        r = np.searchsorted(self.breaks[1:-1], p, side="right")
        return r

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        r = self.region(p)
        return self.slopes[r] * p + self.intercepts[r]


def _phi(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


def _hb(p):
    return binary_entropy(np.clip(p, 0.0, 1.0))


def _dhb(p):
    return math.log2((1.0 - p) / p)


def _dphi(p):
    return -math.log2(p) - 1.0 / math.log(2.0)


def _line(f, df, t):
    a = df(t)
    return a, float(f(t)) - a * t


def _next_tangent(f, df, t, hi, gap):
    """Next tangent point after ``t`` whose crossing with the line at ``t`` has the given gap."""
    a1, b1 = _line(f, df, t)

    def crossing_gap(u):
        a2, b2 = _line(f, df, u)
        if a1 - a2 <= 0:
            return 0.0
        x = (b2 - b1) / (a1 - a2)
        return a1 * x + b1 - float(f(x))

    if crossing_gap(hi) <= gap:
        return hi
    lo_u, hi_u = t, hi
    for _ in range(100):
        mid = 0.5 * (lo_u + hi_u)
        if crossing_gap(mid) <= gap:
            lo_u = mid
        else:
            hi_u = mid
    return lo_u


def _hb_scalar(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _phi_scalar(p: float) -> float:
    return -p * math.log2(p) if p > 0.0 else 0.0


def _tangent_points(f, df, lo, hi, gap, limit=10_000):
    # first tangent: gap at the left end equals the target
    eps = 1e-15
    left, right = lo + eps, hi
    a, b = _line(f, df, right)
    if a * lo + b - float(f(lo)) <= gap:
        return [hi]
    for _ in range(100):
        mid = 0.5 * (left + right)
        a, b = _line(f, df, mid)
        if a * lo + b - float(f(lo)) <= gap:
            left = mid
        else:
            right = mid
    pts = [left]
    while pts[-1] < hi:
        nxt = _next_tangent(f, df, pts[-1], hi, gap)
        if nxt <= pts[-1] * (1 + 1e-15):
            nxt = hi
        pts.append(nxt)
        if len(pts) > limit:
            break
    return pts


@functools.lru_cache(maxsize=None)
def _tangent_bound(which: str, k: int) -> PiecewiseLinearBound:
    f, df, lo, hi = ((_hb_scalar, _dhb, 0.0, 0.5) if which == "binary"
                     else (_phi_scalar, _dphi, 0.0, 1.0))
    g_lo, g_hi = 0.0, 2.0
    for _ in range(64):
        g = 0.5 * (g_lo + g_hi)
        if len(_tangent_points(f, df, lo, hi, g, limit=k)) <= k:
            g_hi = g
        else:
            g_lo = g
    pts = _tangent_points(f, df, lo, hi, g_hi)
    lines = [_line(f, df, t) for t in pts]
    slopes = np.array([a for a, _ in lines])
    inter = np.array([b for _, b in lines])
    xs = [(inter[v + 1] - inter[v]) / (slopes[v] - slopes[v + 1]) for v in range(len(pts) - 1)]
    breaks = np.array([lo, *xs, hi])
    return PiecewiseLinearBound(breaks, slopes, inter, "tangent")


def build_pwl_bound(k: int = DEFAULT_K, kind: str = "tangent") -> PiecewiseLinearBound:
    """Piecewise-linear bound on the binary entropy over ``[0, 1/2]``.

    ``kind="tangent"`` is the lower envelope of ``k`` tangent lines placed
    so that the largest gap above the entropy is as small as possible; it
    bounds the entropy from above everywhere. ``kind="chord"`` interpolates
    the entropy at ``k + 1`` evenly spaced points; it is exact at the
    breakpoints and lies below the entropy between them.
    """
    if k < 1:
        raise ValueError("need at least one piece")
    if kind == "tangent":
        return _tangent_bound("binary", k)
    if kind != "chord":
        raise ValueError(f"unknown bound kind {kind!r}")
    xs = np.linspace(0.0, 0.5, k + 1)
    ys = _hb(xs)
    slopes = np.diff(ys) / np.diff(xs)
    inter = ys[:-1] - slopes * xs[:-1]
    return PiecewiseLinearBound(xs, slopes, inter, "chord")


def build_phi_bound(k: int = DEFAULT_K) -> PiecewiseLinearBound:
    """Tangent-envelope upper bound of ``-P log2 P`` over ``[0, 1]``."""
    if k < 1:
        raise ValueError("need at least one piece")
    return _tangent_bound("phi", k)


# -- binary exhaustive variant ------------------------------------------------

def region_assignments(d: int, k: int) -> np.ndarray:
    """All multisets of d regions out of k, as non-decreasing rows."""
    return np.array(list(itertools.combinations_with_replacement(range(k), d)), dtype=np.int64).reshape(-1, d)


def slope_matrix(d: int, regions, bound: PiecewiseLinearBound) -> np.ndarray:
    """``(2^d, d)`` matrix: the slope of component j's region where bit j is 0."""
    a = bound.slopes[np.asarray(regions)]
    return zero_indicator(d) * a[None, :]


def coefficient_rows(d: int, k: int, bound: PiecewiseLinearBound | None = None,
                     budget: int = ROW_BUDGET_BYTES):
    """Region assignments and their coefficient rows (one row per assignment).

    Row entry ``i`` is the summed slope over the zero bits of word ``i``.
    """
    bound = bound or build_pwl_bound(k)
    n_rows = math.comb(d + k - 1, d)
    need = n_rows * (1 << d) * 8
    if need > budget:
        raise MemoryError(f"{n_rows} rows x {1 << d} words needs {need / 2**20:.0f} MiB, "
                          f"budget is {budget / 2**20:.0f} MiB")
    assign = region_assignments(d, bound.k)
    return assign, bound.slopes[assign] @ zero_indicator(d).T


def unique_coefficients(row) -> np.ndarray:
    return np.unique(np.round(np.asarray(row, dtype=float), 12))


@functools.lru_cache(maxsize=16)
def _sorted_rows(d: int, k: int, kind: str):
    bound = build_pwl_bound(k, kind)
    assign, rows = coefficient_rows(d, k, bound)
    # ties go to the higher word index, so a flat piece leaves its bit at P(0) <= 1/2
    m = rows.shape[1]
    order = (m - 1 - np.argsort(rows[:, ::-1], axis=1, kind="stable")).astype(np.int32)
    return bound, assign, rows, order


def relaxed_bica_binary(dist: JointDistribution, k: int = DEFAULT_K, kind: str = "tangent",
                        max_d: int = 16, refine: bool = True):
    """Best relabeling found through the piecewise-linear relaxation.

    Every feasible placement (each component's marginal inside the piece it
    was assumed to lie on) is scored by its true cost and the best one is
    kept. With ``refine`` the winner is then polished by tangent descent
    (see ``tangent_refine``), which can only lower the cost.

    Returns
    -------
    transform, cost, pi
        ``pi`` holds the marginals ``P(Y_j = 0)`` of the transformed source.
    """
    d, m = dist.d, dist.m
    if d > max_d:
        raise ValueError(f"relaxed search limited to d <= {max_d}")
    if d == 0:
        return PermutationTransform.identity(1), 0.0, np.zeros(0)
    bound, assign, rows, order = _sorted_rows(d, k, kind)
    src = np.argsort(-dist.probs, kind="stable")
    p_desc = dist.probs[src]
    zero = zero_indicator(d)
    lo = bound.breaks[assign] - FEAS_TOL
    hi = bound.breaks[assign + 1] + FEAS_TOL
    best = (math.inf, math.inf, -1)
    n_feasible = 0
    for start in range(0, assign.shape[0], CHUNK_ROWS):
        sl = slice(start, start + CHUNK_ROWS)
        o = order[sl]
        placed = np.empty(o.shape)
        np.put_along_axis(placed, o, np.broadcast_to(p_desc, o.shape), axis=1)
        pi = placed @ zero
        ok = np.all((pi >= lo[sl]) & (pi <= hi[sl]), axis=1)
        if not ok.any():
            continue
        n_feasible += int(ok.sum())
        true = np.sum(_hb(pi), axis=1)
        pwl = np.einsum("ij,ij->i", rows[sl], placed) + bound.intercepts[assign[sl]].sum(axis=1)
        true[~ok] = np.inf
        i = int(np.argmin(true))
        if (true[i], pwl[i]) < best[:2]:
            best = (true[i], pwl[i], start + i)
    if n_feasible == 0:
        raise RuntimeError("no region assignment admitted its own solution")
    row = best[2]
    table = np.empty(m, dtype=np.int64)
    table[src] = order[row]
    if refine:
        table = tangent_refine(dist, table)
    t = PermutationTransform(table)
    pi = (np.bincount(table, weights=dist.probs, minlength=m)) @ zero
    return t, cost(dist, t), pi


def tangent_refine(dist: JointDistribution, table: np.ndarray, max_steps: int = 50) -> np.ndarray:
    """Re-sort with the entropy's tangent slopes at the current marginals.

    The tangents bound the concave objective from above and touch it at the
    current point, so each accepted step lowers the true cost; stop when a
    step fails to.
    """
    d, m = dist.d, dist.m
    zero = zero_indicator(d)
    src = np.argsort(-dist.probs, kind="stable")
    p_desc = dist.probs[src]

    def value(tab):
        pi = np.bincount(tab, weights=dist.probs, minlength=m) @ zero
        return float(np.sum(_hb(pi))), pi

    cur, pi = value(table)
    for _ in range(max_steps):
        q = np.clip(pi, 1e-15, 1 - 1e-15)
        coef = zero @ np.log2((1 - q) / q)
        order = m - 1 - np.argsort(coef[::-1], kind="stable")
        cand = np.empty(m, dtype=np.int64)
        cand[src] = order
        val, npi = value(cand)
        if val >= cur - 1e-13:
            break
        table, cur, pi = cand, val, npi
    return table


def pwl_objective(dist: JointDistribution, transform: PermutationTransform,
                  bound: PiecewiseLinearBound) -> float:
    """Bound value of a relabeling, each marginal placed on the piece it falls in."""
    from .transforms import apply
    pi = np.clip(apply(transform, dist).marginals(), 0.0, 1.0)
    pi = np.minimum(pi, 1.0 - pi)
    return float(np.sum(bound(pi)))


# -- q-ary objective descent -------------------------------------------------

def _digits(q: int, d: int) -> np.ndarray:
    idx = np.arange(q ** d)
    return np.stack([(idx // q ** (d - 1 - j)) % q for j in range(d)], axis=1)


def _solve_cell(p_desc, coef):
    order = coef.size - 1 - np.argsort(coef[::-1], kind="stable")
    placed = np.empty_like(p_desc)
    placed[order] = p_desc
    return order, placed


def objective_descent_qary(dist: JointDistribution, q: int | None = None, k: int = DEFAULT_K,
                           n_init: int = 20, rng=None, return_trace: bool = False):
    """Descent over relaxation cells for a q-ary alphabet of ``q**d`` symbols.

    For ``q = 2`` a cell is one region of the binary bound per component. For
    ``q > 2`` it is one region of the ``-P log P`` bound per component value.
    Starting from random cells, solve the cell's linear problem, move to the
    cell containing the solution, and stop once it stays put; the best true
    cost over restarts is returned.
    """
    q = dist.q if q is None else q
    if q < 2:
        raise ValueError("q must be at least 2")
    if dist.q != q:
        dist = JointDistribution(dist.probs, q=q)
    d, m = dist.d, dist.m
    rng = np.random.default_rng(rng)
    src = np.argsort(-dist.probs, kind="stable")
    p_desc = dist.probs[src]
    if q == 2:
        bound = build_pwl_bound(k)
        ind = zero_indicator(d)[:, :, None]  # (m, d, 1): the value-0 slot
        n_slots = 1
    else:
        bound = build_phi_bound(k)
        dig = _digits(q, d)
        ind = (dig[:, :, None] == np.arange(q)[None, None, :]).astype(float)
        n_slots = q

    def coefficients(cell):
        a = bound.slopes[cell]  # (d, slots)
        return np.einsum("ijv,jv->i", ind, a), bound.intercepts[cell].sum()

    def marginals(placed):
        return np.einsum("i,ijv->jv", placed, ind)

    def canon(cell):
        # binary components are exchangeable: a cell is a multiset of regions
        return np.sort(cell, axis=0) if q == 2 else cell

    # only restarts that settle in the cell containing their own solution
    # count; if none does, fall back to the best cell visited
    best = {True: (math.inf, None), False: (math.inf, None)}
    traces = []
    for _ in range(n_init):
        cell = canon(rng.integers(0, bound.k, size=(d, n_slots)))
        seen = set()
        trace = []
        prev_val = math.inf
        while True:
            coef, inter = coefficients(cell)
            order, placed = _solve_cell(p_desc, coef)
            val = float(coef @ placed + inter)
            marg = marginals(placed)
            new_cell = canon(bound.region(np.clip(marg, 0.0, bound.breaks[-1])))
            settled = np.array_equal(new_cell, cell)
            key = new_cell.tobytes()
            trace.append(val)
            if settled or key in seen or val > prev_val + 1e-12:
                break
            seen.add(cell.tobytes())
            prev_val = val
            cell = new_cell
        lo = bound.breaks[cell] - FEAS_TOL
        hi = bound.breaks[cell + 1] + FEAS_TOL
        feasible = settled and bool(np.all((marg >= lo) & (marg <= hi)))
        table = np.empty(m, dtype=np.int64)
        table[src] = order
        placed_probs = np.empty(m)
        placed_probs[table] = dist.probs
        if q == 2:
            true = float(np.sum(_hb(placed_probs @ zero_indicator(d))))
        else:
            true = float(np.sum(_phi(marginals(placed_probs))))
        traces.append(trace)
        if true < best[feasible][0]:
            best[feasible] = (true, table)
    best_cost, best_table = best[True] if best[True][1] is not None else best[False]
    t = PermutationTransform(best_table)
    c = max(0.0, best_cost - dist.entropy())
    return (t, c, traces) if return_trace else (t, c)


def qary_cost(dist: JointDistribution, transform: PermutationTransform) -> float:
    placed = np.empty(dist.m)
    placed[transform.table] = dist.probs
    moved = JointDistribution(placed, q=dist.q)
    return max(0.0, float(sum(np.sum(_phi(row)) for row in qary_marginals(moved))) - dist.entropy())
