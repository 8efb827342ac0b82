"""Huffman, canonical Huffman and integer arithmetic coding, all bit-exact.

Stream layout written by ``encode_stream``::

    b"GBCS"  magic
    u8       version (1)
    u8       coder id (0 canonical Huffman, 1 static arithmetic, 2 adaptive arithmetic)
    varint   m, n
    ...      codebook (Huffman) or frequency table (static arithmetic)
    varint   payload length in bits
    bytes    payload, last byte zero-padded
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bitio import BitReader, BitWriter, TruncatedStream, read_varint, write_varint

MAGIC = b"GBCS"
VERSION = 1
CODER_HUFFMAN, CODER_ARITH, CODER_ADAPTIVE = 0, 1, 2


@dataclass(frozen=True)
class Payload:
    data: bytes
    nbits: int


# -- Huffman ------------------------------------------------------------------

@dataclass(frozen=True)
class HuffmanCodebook:
    lengths: dict
    codes: dict

    def code_string(self, sym) -> str:
        return format(self.codes[sym], f"0{self.lengths[sym]}b")

    def kraft_sum(self) -> float:
        return math.fsum(2.0 ** -l for l in self.lengths.values())

    def average_length(self, probs) -> float:
        return math.fsum(probs[s] * l for s, l in self.lengths.items())


def huffman_lengths(weights) -> dict:
    """Optimal code lengths for the positive-weight symbols (ties by insertion order)."""
    items = [(float(w), s) for s, w in enumerate(weights) if w > 0] if not isinstance(weights, dict) \
        else [(float(w), s) for s, w in weights.items() if w > 0]
    if not items:
        raise ValueError("no symbol has positive weight")
    if len(items) == 1:
        return {items[0][1]: 1}
    counter = itertools.count()
    heap = [(w, next(counter), [s]) for w, s in items]
    heapq.heapify(heap)
    depth = {s: 0 for _, s in items}
    while len(heap) > 1:
        w1, _, a = heapq.heappop(heap)
        w2, _, b = heapq.heappop(heap)
        for s in a + b:
            depth[s] += 1
        heapq.heappush(heap, (w1 + w2, next(counter), a + b))
    return depth


def huffman_build(weights) -> HuffmanCodebook:
    """Huffman code for a probability/count vector or a ``{symbol: weight}`` dict."""
    return canonicalize_lengths(huffman_lengths(weights))


def canonicalize_lengths(lengths: dict) -> HuffmanCodebook:
    """Consecutive codes within each length, symbols ordered by (length, symbol)."""
    codes = {}
    code = 0
    prev = None
    for sym in sorted(lengths, key=lambda s: (lengths[s], s)):
        l = lengths[sym]
        if prev is not None:
            code = (code + 1) << (l - prev)
        codes[sym] = code
        prev = l
    return HuffmanCodebook(dict(lengths), codes)


def canonicalize(codebook) -> HuffmanCodebook:
    """Canonical form of any prefix code, given as a codebook or ``{symbol: "bits"}``."""
    if isinstance(codebook, HuffmanCodebook):
        lengths = codebook.lengths
    else:
        lengths = {s: len(bits) for s, bits in codebook.items()}
    return canonicalize_lengths(lengths)


def is_prefix_free(codebook: HuffmanCodebook) -> bool:
    words = sorted(codebook.code_string(s) for s in codebook.lengths)
    return all(not b.startswith(a) for a, b in zip(words, words[1:]))


def _width(n: int) -> int:
    return max(1, (n - 1).bit_length())


MAXLEN_BITS = 6


def serialize_codebook(codebook: HuffmanCodebook, m: int) -> Payload:
    """Max length, per-length counts, then symbols in canonical order (bit-packed)."""
    lengths = codebook.lengths
    max_len = max(lengths.values())
    if max_len >= 1 << MAXLEN_BITS:
        raise ValueError("code length too large to serialize")
    w_count = _width(m + 1)
    w_sym = _width(m)
    out = BitWriter()
    out.write_bits(max_len, MAXLEN_BITS)
    hist = [0] * (max_len + 1)
    for l in lengths.values():
        hist[l] += 1
    for l in range(1, max_len + 1):
        out.write_bits(hist[l], w_count)
    for sym in sorted(lengths, key=lambda s: (lengths[s], s)):
        out.write_bits(int(sym), w_sym)
    return Payload(out.getvalue(), out.nbits)


def deserialize_codebook(reader: BitReader, m: int) -> HuffmanCodebook:
    max_len = reader.read_bits(MAXLEN_BITS)
    w_count, w_sym = _width(m + 1), _width(m)
    hist = [reader.read_bits(w_count) for _ in range(max_len)]
    lengths = {}
    for l, cnt in enumerate(hist, start=1):
        for _ in range(cnt):
            sym = reader.read_bits(w_sym)
            if sym >= m or sym in lengths:
                raise ValueError("corrupt codebook")
            lengths[sym] = l
    if not lengths:
        raise ValueError("empty codebook")
    return canonicalize_lengths(lengths)


def explicit_table_bits(codebook: HuffmanCodebook, m: int) -> int:
    """Size of a plain (symbol, length, code) table, for comparison."""
    return sum(_width(m) + MAXLEN_BITS + l for l in codebook.lengths.values())


def prefix_encode(samples, codebook: HuffmanCodebook) -> Payload:
    out = BitWriter()
    lengths, codes = codebook.lengths, codebook.codes
    for s in samples:
        s = int(s)
        if s not in lengths:
            raise KeyError(f"symbol {s} has no code")
        out.write_bits(codes[s], lengths[s])
    return Payload(out.getvalue(), out.nbits)


def prefix_decode(payload: Payload, codebook: HuffmanCodebook, n: int) -> np.ndarray:
    lookup = {(l, codebook.codes[s]): s for s, l in codebook.lengths.items()}
    max_len = max(codebook.lengths.values())
    reader = BitReader(payload.data, payload.nbits)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        code = 0
        for l in range(1, max_len + 1):
            code = (code << 1) | reader.read_bit()
            sym = lookup.get((l, code))
            if sym is not None:
                out[i] = sym
                break
        else:
            raise ValueError("bit pattern matches no codeword")
    return out


# -- arithmetic coding ---------------------------------------------------------

class StaticModel:
    """Fixed integer frequencies."""

    def __init__(self, freqs):
        f = np.asarray(freqs, dtype=np.int64)
        if np.any(f < 0) or f.sum() == 0:
            raise ValueError("frequencies must be non-negative with a positive total")
        self.freqs = f
        self.cum = np.concatenate([[0], np.cumsum(f)]).tolist()
        self._total = int(self.cum[-1])

    @classmethod
    def from_probs(cls, probs, total_bits: int = 16) -> "StaticModel":
        p = np.asarray(probs, dtype=float)
        scale = 1 << total_bits
        f = np.where(p > 0, np.maximum(1, np.floor(p * (scale - p.size))), 0).astype(np.int64)
        return cls(f)

    @property
    def total(self) -> int:
        return self._total

    def interval(self, sym: int):
        lo, hi = self.cum[sym], self.cum[sym + 1]
        if hi == lo:
            raise ValueError(f"symbol {sym} has zero probability under the model")
        return lo, hi

    def find(self, value: int) -> int:
        return int(np.searchsorted(self.cum, value, side="right")) - 1

    def update(self, sym: int) -> None:
        pass

    def probability(self, sym: int) -> float:
        return self.freqs[sym] / self._total

    def max_total(self) -> int:
        return self._total


class KTModel:
    """Adaptive add-1/2 estimator, ``P(s) = (c_s + 1/2) / (n + m/2)``.

    Frequencies are stored doubled (``2 c_s + 1``); counts are halved once
    the total passes ``cap``.
    """

    def __init__(self, m: int, cap: int | None = None):
        self.m = m
        self.cap = cap if cap is not None else max(1 << 16, 4 * m)
        self.counts = [0] * m
        self._tree = [0] * (m + 1)
        self._total = 0
        for s in range(m):
            self._add(s, 1)

    def _add(self, sym: int, delta: int) -> None:
        self._total += delta
        i = sym + 1
        while i <= self.m:
            self._tree[i] += delta
            i += i & -i

    def _prefix(self, sym: int) -> int:
        s = 0
        i = sym
        while i > 0:
            s += self._tree[i]
            i -= i & -i
        return s

    @property
    def total(self) -> int:
        return self._total

    def interval(self, sym: int):
        lo = self._prefix(sym)
        return lo, lo + 2 * self.counts[sym] + 1

    def find(self, value: int) -> int:
        pos = 0
        rem = value
        step = 1 << self.m.bit_length()
        while step:
            nxt = pos + step
            if nxt <= self.m and self._tree[nxt] <= rem:
                pos = nxt
                rem -= self._tree[nxt]
            step >>= 1
        return pos

    def probability(self, sym: int) -> float:
        return (2 * self.counts[sym] + 1) / self._total

    def update(self, sym: int) -> None:
        self.counts[sym] += 1
        self._add(sym, 2)
        if self._total > self.cap:
            self.counts = [c // 2 for c in self.counts]
            self._tree = [0] * (self.m + 1)
            self._total = 0
            for s, c in enumerate(self.counts):
                self._add(s, 2 * c + 1)

    def max_total(self) -> int:
        return self.cap + 2


def state_bits_for(max_total: int) -> int:
    """Coder register width: 32 bits unless the model total needs more headroom."""
    return max(32, max_total.bit_length() + 15)


class ArithmeticEncoder:
    """Integer arithmetic coder with carry-free E1/E2/E3 renormalization."""

    def __init__(self, state_bits: int = 32):
        self.bits = state_bits
        self.full = 1 << state_bits
        self.half = self.full >> 1
        self.quarter = self.half >> 1
        self.mask = self.full - 1
        self.low, self.high = 0, self.mask
        self.pending = 0
        self.out = BitWriter()

    def _emit(self, bit: int) -> None:
        self.out.write_bit(bit)
        for _ in range(self.pending):
            self.out.write_bit(bit ^ 1)
        self.pending = 0

    def encode(self, lo: int, hi: int, total: int) -> None:
        if total > self.quarter:
            raise OverflowError("model total exceeds coder precision")
        rng = self.high - self.low + 1
        self.high = self.low + hi * rng // total - 1
        self.low = self.low + lo * rng // total
        half, quarter = self.half, self.quarter
        while True:
            if self.high < half:
                self._emit(0)
            elif self.low >= half:
                self._emit(1)
                self.low -= half
                self.high -= half
            elif self.low >= quarter and self.high < half + quarter:
                self.pending += 1
                self.low -= quarter
                self.high -= quarter
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def finish(self) -> Payload:
        # any value in [low, high] works, and the decoder pads with zeros:
        # send nothing if zero is inside, otherwise the single bit 1 (= half)
        if not (self.low == 0 and self.pending == 0):
            self._emit(1)
        data = self.out.getvalue()
        nbits = self.out.nbits
        # trailing zeros are implied by the padding
        while nbits > 0:
            byte = data[(nbits - 1) >> 3]
            if (byte >> (7 - ((nbits - 1) & 7))) & 1:
                break
            nbits -= 1
        return Payload(data[: (nbits + 7) >> 3], nbits)


class ArithmeticDecoder:
    def __init__(self, payload: Payload, state_bits: int = 32):
        self.bits = state_bits
        self.full = 1 << state_bits
        self.half = self.full >> 1
        self.quarter = self.half >> 1
        self.mask = self.full - 1
        self.low, self.high = 0, self.mask
        self.reader = BitReader(payload.data, payload.nbits, pad=True)
        self.code = self.reader.read_bits(state_bits)

    def decode(self, model) -> int:
        total = model.total
        rng = self.high - self.low + 1
        value = ((self.code - self.low + 1) * total - 1) // rng
        sym = model.find(value)
        lo, hi = model.interval(sym)
        self.high = self.low + hi * rng // total - 1
        self.low = self.low + lo * rng // total
        half, quarter = self.half, self.quarter
        while True:
            if self.high < half:
                pass
            elif self.low >= half:
                self.low -= half
                self.high -= half
                self.code -= half
            elif self.low >= quarter and self.high < half + quarter:
                self.low -= quarter
                self.high -= quarter
                self.code -= quarter
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.code = (self.code << 1) | self.reader.read_bit()
        return sym


def arithmetic_encode(samples, model, state_bits: int | None = None) -> Payload:
    """Code ``samples`` with ``model`` (updated after each symbol if adaptive)."""
    enc = ArithmeticEncoder(state_bits or state_bits_for(model.max_total()))
    for s in samples:
        s = int(s)
        lo, hi = model.interval(s)
        enc.encode(lo, hi, model.total)
        model.update(s)
    return enc.finish()


def arithmetic_decode(payload: Payload, model, n: int, state_bits: int | None = None) -> np.ndarray:
    dec = ArithmeticDecoder(payload, state_bits or state_bits_for(model.max_total()))
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = dec.decode(model)
        model.update(s)
        out[i] = s
    return out


def adaptive_arithmetic_encode(samples, m: int) -> Payload:
    return arithmetic_encode(samples, KTModel(m))


def adaptive_arithmetic_decode(payload: Payload, m: int, n: int) -> np.ndarray:
    return arithmetic_decode(payload, KTModel(m), n)


def kt_code_length(samples, m: int) -> float:
    """Ideal adaptive code length in bits, ``-sum log2 P_KT`` (no halving)."""
    x = np.asarray(samples, dtype=np.int64).ravel()
    if x.size == 0:
        return 0.0
    # how many times each sample's symbol occurred before it
    order = np.argsort(x, kind="stable")
    sx = x[order]
    starts = np.flatnonzero(np.r_[True, sx[1:] != sx[:-1]])
    run_start = np.repeat(starts, np.diff(np.r_[starts, x.size]))
    prior = np.empty(x.size, dtype=np.int64)
    prior[order] = np.arange(x.size) - run_start
    return float(-np.sum(np.log2((prior + 0.5) / (np.arange(x.size) + m / 2.0))))


# -- self-describing streams --------------------------------------------------

def _header(coder: int, m: int, n: int) -> bytearray:
    out = bytearray(MAGIC)
    out += bytes([VERSION, coder])
    write_varint(out, m)
    write_varint(out, n)
    return out


def encode_stream(samples, m: int, coder: str = "adaptive", probs=None) -> bytes:
    """Self-describing byte stream; ``coder`` is huffman, arith or adaptive."""
    x = np.asarray(samples, dtype=np.int64).ravel()
    if x.size and (x.min() < 0 or x.max() >= m):
        raise ValueError("symbol outside [0, m)")
    if coder == "huffman":
        weights = np.bincount(x, minlength=m) if probs is None else np.asarray(probs)
        cb = huffman_build(weights)
        out = _header(CODER_HUFFMAN, m, x.size)
        book = serialize_codebook(cb, m)
        write_varint(out, book.nbits)
        out += book.data
        payload = prefix_encode(x, cb)
    elif coder == "arith":
        weights = np.bincount(x, minlength=m) if probs is None else np.asarray(probs, dtype=float)
        model = StaticModel.from_probs(weights / weights.sum())
        out = _header(CODER_ARITH, m, x.size)
        for f in model.freqs:
            write_varint(out, int(f))
        payload = arithmetic_encode(x, model)
    elif coder == "adaptive":
        out = _header(CODER_ADAPTIVE, m, x.size)
        payload = adaptive_arithmetic_encode(x, m)
    else:
        raise ValueError(f"unknown coder {coder!r}")
    write_varint(out, payload.nbits)
    out += payload.data
    return bytes(out)


def decode_stream(data: bytes) -> np.ndarray:
    if data[:4] != MAGIC:
        raise ValueError("not a coded stream (bad magic)")
    if len(data) < 6 or data[4] != VERSION:
        raise ValueError("unsupported stream version")
    coder = data[5]
    m, pos = read_varint(data, 6)
    n, pos = read_varint(data, pos)
    if coder == CODER_HUFFMAN:
        book_bits, pos = read_varint(data, pos)
        nbytes = (book_bits + 7) >> 3
        if pos + nbytes > len(data):
            raise TruncatedStream("codebook truncated")
        cb = deserialize_codebook(BitReader(data[pos:pos + nbytes], book_bits), m)
        pos += nbytes
    elif coder == CODER_ARITH:
        freqs = []
        for _ in range(m):
            f, pos = read_varint(data, pos)
            freqs.append(f)
        model = StaticModel(freqs)
    elif coder != CODER_ADAPTIVE:
        raise ValueError(f"unknown coder id {coder}")
    nbits, pos = read_varint(data, pos)
    payload = Payload(data[pos:], nbits)
    if len(payload.data) * 8 < nbits:
        raise TruncatedStream("payload shorter than its recorded length")
    if coder == CODER_HUFFMAN:
        return prefix_decode(payload, cb, n)
    if coder == CODER_ARITH:
        return arithmetic_decode(payload, model, n)
    return adaptive_arithmetic_decode(payload, m, n)
