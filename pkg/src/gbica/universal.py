"""Universal coding: redundancy formulas, block-wise size accounting, the
shuffle-and-relabel pipeline, and permutation-based adaptive coders.

Container written by the permutation coders::

    b"GBIC"  magic
    u8       version (1)
    u8       scheme (0 fixed, 1 adaptive, 2 sliding window)
    u8       mode (0 marginal, 1 block)
    varint   d, B, b, n, window length
    fixed scheme only:
      u8     reference flag (0 hash only, 1 embedded descriptor)
      8 B    truncated SHA-256 of the reference table
      varint descriptor length, descriptor bytes (if embedded)
    per block: varint payload bits, payload bytes
"""
from __future__ import annotations

import bisect
import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bica_relax import relaxed_bica_binary
from .bitio import TruncatedStream, read_varint, write_varint
from .entropy_coding import (
    ArithmeticDecoder,
    ArithmeticEncoder,
    KTModel,
    Payload,
    kt_code_length,
    state_bits_for,
)
from .probability import JointDistribution, entropy_of
from .transforms import PermutationTransform, decode_descriptor, encode_descriptor, order_permutation

LOG2E = math.log2(math.e)
AUTO_LOW, AUTO_HIGH = 0.1, 10.0

REGIME_SMALL = "m=o(n)"
REGIME_LARGE = "n=o(m)"
REGIME_THETA = "m=theta(n)"
REGIME_PATTERNS = "patterns"
REGIME_EXPLICIT = "explicit-dictionary"
_REGIME_ALIASES = {
    "m=o(n)": REGIME_SMALL, "small": REGIME_SMALL,
    "n=o(m)": REGIME_LARGE, "large": REGIME_LARGE,
    "m=theta(n)": REGIME_THETA, "theta": REGIME_THETA,
}


# -- redundancy -----------------------------------------------------------------

@dataclass(frozen=True)
class RedundancyEstimate:
    bits: float
    regime: str
    m: int
    n: int
    alpha: float | None = None
    l: float = 0.0
    n0: int | None = None


def theta_constants(alpha: float):
    """``(A, B, C)`` of the linear-growth regime."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    c = 0.5 + 0.5 * math.sqrt(1.0 + 4.0 / alpha)
    a = c + 2.0 / alpha
    b = alpha * c ** (alpha + 2.0) * math.exp(-1.0 / c)
    return a, b, c


def minimax_redundancy(m: int, n: int, regime: str = "auto", l: float = 0.0) -> RedundancyEstimate:
    """Leading-term worst-case redundancy for i.i.d. length-``n`` sequences.

    ``regime="auto"`` picks by the ratio ``m/n``: at most 0.1 means the
    alphabet is small, at least 10 means it is large, anything between uses
    the linear regime with ``alpha = m/n``. In the linear regime ``l`` is the
    sub-linear part of ``m = alpha n + l``.
    """
    if m < 2 or n < 1:
        raise ValueError("need m >= 2 and n >= 1")
    if regime == "auto":
        ratio = m / n
        regime = REGIME_SMALL if ratio <= AUTO_LOW else REGIME_LARGE if ratio >= AUTO_HIGH else REGIME_THETA
    try:
        regime = _REGIME_ALIASES[regime]
    except KeyError:
        raise ValueError(f"unknown regime {regime!r}") from None
    if regime == REGIME_SMALL:
        bits = ((m - 1) / 2.0 * math.log2(n / m) + m / 2.0 * LOG2E
                + m * LOG2E / 3.0 * math.sqrt(m / n))
        return RedundancyEstimate(bits, regime, m, n)
    if regime == REGIME_LARGE:
        bits = (n * math.log2(m / n) + 1.5 * n * n / m * LOG2E - 1.5 * n / m * LOG2E)
        return RedundancyEstimate(bits, regime, m, n)
    alpha = (m - l) / n
    a, b, c = theta_constants(alpha)
    bits = n * math.log2(b) + l * math.log2(c) - math.log2(math.sqrt(a))
    return RedundancyEstimate(bits, regime, m, n, alpha=alpha, l=l)


def patterns_bound(n: int, n0: int, m: int, mode: str = "default") -> RedundancyEstimate:
    """Dictionary of first appearances plus the pattern's redundancy.

    ``default`` charges ``(3/2) log2(e) n^(1/3)`` for the pattern;
    ``paper-example`` charges the bare ``n^(1/3)``.
    """
    if not 0 <= n0 <= min(n, m):
        raise ValueError("need 0 <= n0 <= min(n, m)")
    cube = round(n ** (1.0 / 3.0), 12)
    if mode == "default":
        pattern = 1.5 * LOG2E * cube
    elif mode == "paper-example":
        pattern = cube
    else:
        raise ValueError(f"unknown patterns mode {mode!r}")
    return RedundancyEstimate(n0 * math.log2(m) + pattern, REGIME_PATTERNS, m, n, n0=n0)


def explicit_dictionary_bits(n0: int, d: int) -> RedundancyEstimate:
    """Cost of listing the ``n0`` observed symbols, ``d`` bits each."""
    return RedundancyEstimate(float(n0 * d), REGIME_EXPLICIT, 1 << d, n0, n0=n0)


def block_redundancy(n: int, b: int, B: int) -> float:
    return B * ((2 ** b - 1) / 2.0) * math.log2(n / 2 ** b)


def total_size_blocks(n: int, b: int, B: int, block_entropies) -> float:
    """``n * sum(block entropies)`` plus one small-alphabet term per block."""
    if 2 ** b >= n:
        warnings.warn(f"2^b = {2 ** b} >= n = {n}: the per-block redundancy term is outside its regime",
                      stacklevel=2)
    return n * math.fsum(np.atleast_1d(block_entropies)) + block_redundancy(n, b, B)


def whole_alphabet_total(samples, m: int, regime: str = REGIME_THETA) -> float:
    """Standard compression baseline: ``n * H_hat`` plus the minimax term."""
    x = np.asarray(samples, dtype=np.int64)
    h = _empirical_entropy(x, m)
    return x.size * h + minimax_redundancy(m, x.size, regime).bits


def shuffle_description_bits(d: int) -> int:
    return math.ceil(math.lgamma(d + 1) / math.log(2) - 1e-12)


# -- block-wise pipeline ----------------------------------------------------------

def _empirical_entropy(values: np.ndarray, size: int) -> float:
    counts = np.bincount(values, minlength=size)
    return entropy_of(counts[counts > 0] / values.size)


def _bits_of(y: np.ndarray, d: int) -> np.ndarray:
    # column j is bit j+1 (MSB first)
    return ((y[:, None] >> np.arange(d - 1, -1, -1)) & 1).astype(np.int8)


def marginal_entropy_sum(y: np.ndarray, d: int) -> float:
    p1 = _bits_of(y, d).mean(axis=0)
    p1 = p1[(p1 > 0) & (p1 < 1)]
    return math.fsum(-(p1 * np.log2(p1) + (1 - p1) * np.log2(1 - p1)))


def _block_values(bits: np.ndarray, comps) -> np.ndarray:
    b = len(comps)
    weights = 1 << np.arange(b - 1, -1, -1)
    return bits[:, list(comps)].astype(np.int64) @ weights


def block_entropy_sum(y: np.ndarray, d: int, partition) -> float:
    bits = _bits_of(y, d)
    return math.fsum(_empirical_entropy(_block_values(bits, c), 1 << len(c)) for c in partition)


@dataclass
class BlockPipelineState:
    """Everything the shuffle-and-relabel search produced.

    ``marginal_trace[0]`` is the starting marginal sum; entry ``i >= 1`` is the
    sum after pass ``i``. ``block_trace[i-1]`` and ``partitions[i-1]`` belong
    to pass ``i``.
    """
    d: int
    B: int
    b: int
    n: int
    seed: int | None
    partitions: list = field(default_factory=list)
    transforms: list = field(default_factory=list)
    marginal_trace: list = field(default_factory=list)
    block_trace: list = field(default_factory=list)
    totals: list = field(default_factory=list)
    I0: int = 0
    total_bits: float = math.inf

    @property
    def objective_trace(self) -> list:
        return self.marginal_trace


def _pass_total(n, b, B, d, block_sum, passes):
    return (n * block_sum + block_redundancy(n, b, B)
            + passes * B * b * 2 ** b + passes * shuffle_description_bits(d))


def _relabel_block(z: np.ndarray, b: int, k: int):
    """Relaxed relabeling of one block, kept only if it lowers the marginal sum."""
    size = 1 << b
    counts = np.bincount(z, minlength=size)
    dist = JointDistribution(counts / counts.sum())
    before = marginal_entropy_sum(z, b)
    t, _, _ = relaxed_bica_binary(dist, k=k)
    after = marginal_entropy_sum(t.table[z], b)
    if after < before - 1e-12:
        return t
    return PermutationTransform.identity(size)


def blockwise_pipeline(samples, d: int, B: int, max_iters: int = 50, k: int = 8, rng=None,
                       n_shuffles: int = 64, patience: int | None = None) -> BlockPipelineState:
    """Alternate per-block relaxed relabeling with random component shuffles.

    The starting partition is the best of ``n_shuffles`` random ones (plus the
    identity) by block-entropy sum. Each pass relabels every block, records
    the sums, then shuffles. The search stops after ``max_iters`` shuffles or
    once ``patience`` consecutive passes fail to lower the marginal sum. The
    reported pass ``I0`` minimizes the total size, with ``ceil(log2 d!)``
    bits charged for every partition used.
    """
    if d % B:
        raise ValueError("B must divide d")
    b = d // B
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    y = np.asarray(samples, dtype=np.int64).copy()
    n = y.size
    if n == 0:
        raise ValueError("no samples")
    if y.min() < 0 or y.max() >= 1 << d:
        raise ValueError("sample outside [0, 2^d)")

    def split(perm):
        return [tuple(int(c) for c in perm[v * b:(v + 1) * b]) for v in range(B)]

    bits = _bits_of(y, d)
    cands = [np.arange(d)] + [rng.permutation(d) for _ in range(n_shuffles)]
    scores = [math.fsum(_empirical_entropy(_block_values(bits, c), 1 << b) for c in split(p))
              for p in cands]
    partition = split(cands[int(np.argmin(scores))])

    state = BlockPipelineState(d=d, B=B, b=b, n=n, seed=seed)
    state.marginal_trace.append(marginal_entropy_sum(y, d))
    stale = 0
    for it in range(max_iters + 1):
        bits = _bits_of(y, d)
        ts = []
        for comps in partition:
            z = _block_values(bits, comps)
            t = _relabel_block(z, b, k)
            ts.append(t)
            z2 = t.table[z]
            for pos, c in enumerate(comps):
                bits[:, c] = (z2 >> (b - 1 - pos)) & 1
        y = bits.astype(np.int64) @ (1 << np.arange(d - 1, -1, -1))
        msum = marginal_entropy_sum(y, d)
        bsum = block_entropy_sum(y, d, partition)
        state.partitions.append(partition)
        state.transforms.append(ts)
        # guard against round-off: relabeling is accepted only when it helps
        msum = min(msum, state.marginal_trace[-1])
        state.marginal_trace.append(msum)
        state.block_trace.append(bsum)
        state.totals.append(_pass_total(n, b, B, d, bsum, it + 1))
        stale = stale + 1 if msum >= state.marginal_trace[-2] - 1e-12 else 0
        if patience is not None and stale >= patience:
            break
        if it < max_iters:
            partition = split(rng.permutation(d))
    i0 = int(np.argmin(state.totals))
    state.I0 = i0 + 1
    state.total_bits = state.totals[i0]
    return state


# -- order tracking for adaptive coders --------------------------------------------

class OrderTracker:
    """Order permutation of running counts, updated incrementally.

    Symbols are ranked ascending by ``(count, symbol)``, so never-seen symbols
    take the lowest words in index order and the most frequent symbol takes
    word ``m - 1``.
    """

    def __init__(self, m: int):
        self.m = m
        self.counts: dict[int, int] = {}
        self._seen: list[int] = []
        self._keys: list[tuple[int, int]] = []

    def word(self, s: int) -> int:
        c = self.counts.get(s)
        base = self.m - len(self._seen)
        if c is None:
            return s - bisect.bisect_left(self._seen, s)
        return base + bisect.bisect_left(self._keys, (c, s))

    def symbol(self, w: int) -> int:
        base = self.m - len(self._seen)
        if w >= base:
            return self._keys[w - base][1]
        # smallest fixed point of s = w + #seen(<= s) is the w-th unseen symbol
        s = w
        while True:
            nxt = w + bisect.bisect_right(self._seen, s)
            if nxt == s:
                return s
            s = nxt

    def update(self, s: int) -> None:
        c = self.counts.get(s)
        if c is None:
            bisect.insort(self._seen, s)
            c = 0
        else:
            del self._keys[bisect.bisect_left(self._keys, (c, s))]
        self.counts[s] = c + 1
        bisect.insort(self._keys, (c + 1, s))

    def table(self) -> np.ndarray:
        return np.array([self.word(s) for s in range(self.m)], dtype=np.int64)


# -- permutation-coded streams -----------------------------------------------------

MAGIC = b"GBIC"
VERSION = 1
SCHEMES = {"fixed": 0, "adaptive": 1, "window": 2}
MODES = {"marginal": 0, "block": 1}
_SCHEME_NAMES = {v: k for k, v in SCHEMES.items()}
_MODE_NAMES = {v: k for k, v in MODES.items()}


@dataclass(frozen=True)
class Container:
    scheme: str
    mode: str
    d: int
    B: int
    b: int
    n: int
    window: int
    reference_hash: bytes | None
    reference: PermutationTransform | None
    payloads: list


def _layout(d: int, mode: str, blocks: int = 2):
    if mode == "marginal":
        return d, 1
    if mode == "block":
        blocks = min(blocks, d)
        return blocks, -(-d // blocks)
    raise ValueError(f"unknown mode {mode!r}")


def _widths(d: int, B: int, b: int) -> list[int]:
    widths = []
    left = d
    for _ in range(B):
        w = min(b, left)
        widths.append(w)
        left -= w
    if left or min(widths) < 1:
        raise ValueError(f"cannot split {d} bits into {B} blocks of {b}")
    return widths


def _log2_size(m: int) -> int:
    if m < 2 or m & (m - 1):
        raise ValueError("alphabet size must be a power of two >= 2")
    return m.bit_length() - 1


def reference_table(reference, m: int) -> PermutationTransform:
    """Shared fixed relabeling from a distribution, weights, ranking or transform.

    A ranking lists symbols from most to least frequent.
    """
    if isinstance(reference, PermutationTransform):
        t = reference
    elif isinstance(reference, JointDistribution):
        t = order_permutation(reference)
    else:
        arr = np.asarray(reference)
        if arr.dtype.kind in "iu" and arr.size == m and np.array_equal(np.sort(arr), np.arange(m)):
            table = np.empty(m, dtype=np.int64)
            table[arr] = np.arange(m - 1, -1, -1)
            t = PermutationTransform(table, kind="order")
        else:
            w = arr.astype(float)
            t = order_permutation(JointDistribution(w / w.sum()))
    if t.m != m:
        raise ValueError(f"reference covers {t.m} symbols, expected {m}")
    return t


def reference_hash(t: PermutationTransform) -> bytes:
    return hashlib.sha256(t.table.astype("<i8").tobytes()).digest()[:8]


class _BlockCoders:
    def __init__(self, widths, encode: bool, payloads=None):
        self.widths = widths
        self.shifts = [sum(widths[v + 1:]) for v in range(len(widths))]
        self.models = [KTModel(1 << w) for w in widths]
        sb = [state_bits_for(mod.max_total()) for mod in self.models]
        if encode:
            self.coders = [ArithmeticEncoder(s) for s in sb]
        else:
            self.coders = [ArithmeticDecoder(p, s) for p, s in zip(payloads, sb)]

    def put(self, word: int) -> None:
        for w, sh, mod, enc in zip(self.widths, self.shifts, self.models, self.coders):
            v = (word >> sh) & ((1 << w) - 1)
            lo, hi = mod.interval(v)
            enc.encode(lo, hi, mod.total)
            mod.update(v)

    def get(self) -> int:
        word = 0
        for sh, mod, dec in zip(self.shifts, self.models, self.coders):
            v = dec.decode(mod)
            mod.update(v)
            word |= v << sh
        return word

    def finish(self) -> list[Payload]:
        return [enc.finish() for enc in self.coders]


def _check_symbols(x: np.ndarray, m: int) -> None:
    if x.size and (x.min() < 0 or x.max() >= m):
        raise ValueError("symbol index outside [0, m)")


def _encode_words(x: np.ndarray, m: int, widths, window: int | None, fixed: PermutationTransform | None):
    coders = _BlockCoders(widths, encode=True)
    if fixed is not None:
        for w in fixed.table[x]:
            coders.put(int(w))
        return coders.finish()
    tracker = OrderTracker(m)
    pending = []
    for s in x.tolist():
        coders.put(tracker.word(s))
        pending.append(s)
        if len(pending) == window:
            for p in pending:
                tracker.update(p)
            pending.clear()
    return coders.finish()


def _decode_words(payloads, n: int, m: int, widths, window: int | None,
                  fixed: PermutationTransform | None) -> np.ndarray:
    coders = _BlockCoders(widths, encode=False, payloads=payloads)
    out = np.empty(n, dtype=np.int64)
    if fixed is not None:
        inv = fixed.inverse().table
        for i in range(n):
            out[i] = inv[coders.get()]
        return out
    tracker = OrderTracker(m)
    pending = []
    for i in range(n):
        s = tracker.symbol(coders.get())
        out[i] = s
        pending.append(s)
        if len(pending) == window:
            for p in pending:
                tracker.update(p)
            pending.clear()
    return out


def _write_container(scheme, mode, d, B, b, n, window, payloads, ref=None, embed=False) -> bytes:
    out = bytearray(MAGIC)
    out += bytes([VERSION, SCHEMES[scheme], MODES[mode]])
    for v in (d, B, b, n, window):
        write_varint(out, v)
    if scheme == "fixed":
        out.append(1 if embed else 0)
        out += reference_hash(ref)
        if embed:
            desc = encode_descriptor(ref)
            write_varint(out, len(desc))
            out += desc
    for p in payloads:
        write_varint(out, p.nbits)
        out += p.data
    return bytes(out)


def read_container(data: bytes) -> Container:
    if data[:4] != MAGIC:
        raise ValueError("not a permutation-coded container (bad magic)")
    if len(data) < 7 or data[4] != VERSION:
        raise ValueError("unsupported container version")
    try:
        scheme, mode = _SCHEME_NAMES[data[5]], _MODE_NAMES[data[6]]
    except KeyError:
        raise ValueError("unknown scheme or mode byte") from None
    pos = 7
    vals = []
    for _ in range(5):
        v, pos = read_varint(data, pos)
        vals.append(v)
    d, B, b, n, window = vals
    h = ref = None
    if scheme == "fixed":
        if pos + 9 > len(data):
            raise TruncatedStream("reference header truncated")
        embed = data[pos]
        h = bytes(data[pos + 1:pos + 9])
        pos += 9
        if embed:
            size, pos = read_varint(data, pos)
            if pos + size > len(data):
                raise TruncatedStream("reference descriptor truncated")
            ref = decode_descriptor(bytes(data[pos:pos + size]))
            pos += size
    payloads = []
    for _ in range(B):
        nbits, pos = read_varint(data, pos)
        nbytes = (nbits + 7) >> 3
        if pos + nbytes > len(data):
            raise TruncatedStream("block payload truncated")
        payloads.append(Payload(bytes(data[pos:pos + nbytes]), nbits))
        pos += nbytes
    return Container(scheme, mode, d, B, b, n, window, h, ref, payloads)


def permutation_coded_encode(samples, m: int, scheme: str = "adaptive", mode: str = "block",
                             reference=None, embed_reference: bool = False, blocks: int = 2) -> bytes:
    """Relabel by an order permutation, then code each component or block adaptively.

    ``fixed`` uses one shared relabeling from ``reference`` (stored by hash,
    or in full with ``embed_reference``). ``adaptive`` re-ranks by the counts
    of all preceding symbols before every symbol, on both sides.
    """
    d = _log2_size(m)
    x = np.asarray(samples, dtype=np.int64).ravel()
    _check_symbols(x, m)
    B, b = _layout(d, mode, blocks)
    widths = _widths(d, B, b)
    if scheme == "fixed":
        if reference is None:
            raise ValueError("the fixed scheme needs a reference order")
        ref = reference_table(reference, m)
        payloads = _encode_words(x, m, widths, None, ref)
        return _write_container("fixed", mode, d, B, b, x.size, 0, payloads, ref, embed_reference)
    if scheme == "adaptive":
        payloads = _encode_words(x, m, widths, 1, None)
        return _write_container("adaptive", mode, d, B, b, x.size, 1, payloads)
    raise ValueError(f"unknown scheme {scheme!r}")


def permutation_coded_decode(data: bytes, reference=None) -> np.ndarray:
    c = read_container(data)
    m = 1 << c.d
    widths = _widths(c.d, c.B, c.b)
    if c.scheme == "fixed":
        ref = c.reference
        if ref is None:
            if reference is None:
                raise ValueError("stream references a shared order that was not supplied")
            ref = reference_table(reference, m)
        if reference_hash(ref) != c.reference_hash:
            raise ValueError("reference order does not match the stream's hash")
        return _decode_words(c.payloads, c.n, m, widths, None, ref)
    return _decode_words(c.payloads, c.n, m, widths, max(c.window, 1), None)


def sliding_window_encode(samples, m: int, l: int, mode: str = "marginal", blocks: int = 2) -> bytes:
    """Relabel each length-``l`` window by the order of all earlier windows.

    Component or block models keep adapting symbol by symbol.
    """
    if l < 1:
        raise ValueError("window length must be >= 1")
    d = _log2_size(m)
    x = np.asarray(samples, dtype=np.int64).ravel()
    _check_symbols(x, m)
    B, b = _layout(d, mode, blocks)
    payloads = _encode_words(x, m, _widths(d, B, b), l, None)
    return _write_container("window", mode, d, B, b, x.size, l, payloads)


def sliding_window_decode(data: bytes) -> np.ndarray:
    c = read_container(data)
    if c.scheme != "window":
        raise ValueError("not a sliding-window stream")
    return _decode_words(c.payloads, c.n, 1 << c.d, _widths(c.d, c.B, c.b), c.window, None)


def container_bits(data: bytes) -> int:
    """Total payload bits, headers excluded."""
    return sum(p.nbits for p in read_container(data).payloads)


# -- ideal code lengths (no coder round-off) ----------------------------------------

def window_words(samples, m: int, l: int) -> np.ndarray:
    """Words produced by the sliding-window relabeling (``l=1`` is fully adaptive)."""
    tracker = OrderTracker(m)
    x = np.asarray(samples, dtype=np.int64).ravel().tolist()
    out = np.empty(len(x), dtype=np.int64)
    for start in range(0, len(x), l):
        chunk = x[start:start + l]
        out[start:start + len(chunk)] = [tracker.word(s) for s in chunk]
        for s in chunk:
            tracker.update(s)
    return out


def permutation_code_length(samples, m: int, l: int, mode: str = "marginal", blocks: int = 2) -> float:
    """Ideal adaptive length of the sliding-window scheme, in bits."""
    d = _log2_size(m)
    words = window_words(samples, m, l)
    B, b = _layout(d, mode, blocks)
    widths = _widths(d, B, b)
    total = 0.0
    for v, w in enumerate(widths):
        shift = sum(widths[v + 1:])
        total += kt_code_length((words >> shift) & ((1 << w) - 1), 1 << w)
    return total


def windowed_kt_code_length(samples, m: int, l: int) -> float:
    """Whole-alphabet add-1/2 coding whose model only learns at window ends."""
    x = np.asarray(samples, dtype=np.int64).ravel()
    n = x.size
    window_start = (np.arange(n) // l) * l
    # occurrences of the same symbol at positions before the window start
    keys = np.sort(x * (n + 1) + np.arange(n))
    prior = (np.searchsorted(keys, x * (n + 1) + window_start)
             - np.searchsorted(keys, x * (n + 1)))
    return float(-np.sum(np.log2((prior + 0.5) / (window_start + m / 2.0))))


class _FrozenModel:
    """Add-1/2 model whose updates are held back until ``flush``."""

    def __init__(self, m: int):
        self.inner = KTModel(m)
        self.pending: list[int] = []

    @property
    def total(self):
        return self.inner.total

    def interval(self, s):
        return self.inner.interval(s)

    def find(self, v):
        return self.inner.find(v)

    def update(self, s):
        self.pending.append(s)

    def flush(self):
        for s in self.pending:
            self.inner.update(s)
        self.pending.clear()

    def max_total(self):
        return self.inner.max_total()


def windowed_arithmetic_encode(samples, m: int, l: int) -> Payload:
    """Whole-alphabet baseline for the sliding-window comparison."""
    model = _FrozenModel(m)
    enc = ArithmeticEncoder(state_bits_for(model.max_total()))
    for i, s in enumerate(np.asarray(samples, dtype=np.int64).tolist()):
        lo, hi = model.interval(s)
        enc.encode(lo, hi, model.total)
        model.update(s)
        if (i + 1) % l == 0:
            model.flush()
    return enc.finish()


def windowed_arithmetic_decode(payload: Payload, m: int, l: int, n: int) -> np.ndarray:
    model = _FrozenModel(m)
    dec = ArithmeticDecoder(payload, state_bits_for(model.max_total()))
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = dec.decode(model)
        model.update(s)
        out[i] = s
        if (i + 1) % l == 0:
            model.flush()
    return out


__all__ = [
    "RedundancyEstimate", "minimax_redundancy", "patterns_bound", "explicit_dictionary_bits",
    "total_size_blocks", "whole_alphabet_total", "BlockPipelineState", "blockwise_pipeline",
    "OrderTracker", "permutation_coded_encode", "permutation_coded_decode",
    "sliding_window_encode", "sliding_window_decode", "read_container", "container_bits",
    "permutation_code_length", "windowed_kt_code_length", "windowed_arithmetic_encode",
    "windowed_arithmetic_decode", "theta_constants",
]
