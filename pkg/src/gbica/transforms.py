"""Invertible symbol relabelings and their cost.

A transform is stored as a lookup table: input symbol ``i`` becomes output
symbol ``table[i]``. Applying it to a distribution moves ``probs[i]`` to
position ``table[i]``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .bitio import TruncatedStream
from .probability import (
    JointDistribution,
    entropy_of,
    marginal_bit_probs,
    sum_marginal_entropies,
)

TAG_EXPLICIT, TAG_ORDER, TAG_BLOCK_ORDER, TAG_LINEAR = 0, 1, 2, 3


@dataclass(frozen=True)
class PermutationTransform:
    table: np.ndarray
    kind: str = "explicit"
    b: int | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64).ravel()
        if not np.array_equal(np.sort(t), np.arange(t.size)):
            raise ValueError("transform table is not a bijection")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def m(self) -> int:
        return self.table.size

    @classmethod
    def identity(cls, m: int) -> "PermutationTransform":
        return cls(np.arange(m))

    def inverse(self) -> "PermutationTransform":
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(self.m)
        return PermutationTransform(inv)

    def __call__(self, symbols):
        return self.table[np.asarray(symbols, dtype=np.int64)]

    def then(self, other: "PermutationTransform") -> "PermutationTransform":
        """Apply ``self`` first, then ``other``."""
        return PermutationTransform(other.table[self.table])


def invert(transform: PermutationTransform) -> PermutationTransform:
    return transform.inverse()


def apply(transform: PermutationTransform, dist: JointDistribution) -> JointDistribution:
    if transform.m != dist.m:
        raise ValueError("transform and distribution sizes differ")
    out = np.empty_like(dist.probs)
    out[transform.table] = dist.probs
    return JointDistribution(out, q=dist.q)


def cost(dist: JointDistribution, transform: PermutationTransform | None = None) -> float:
    """Sum of bit-marginal entropies after the transform minus the joint entropy."""
    target = dist if transform is None else apply(transform, dist)
    return max(0.0, sum_marginal_entropies(target) - entropy_of(dist.probs))


def ranks_ascending(values) -> np.ndarray:
    """Rank of every entry in a stable ascending sort (ties by index)."""
    v = np.asarray(values)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.int64)
    ranks[order] = np.arange(v.size)
    return ranks


def order_permutation(dist) -> PermutationTransform:
    """Send the i-th smallest probability to symbol i."""
    probs = dist.probs if isinstance(dist, JointDistribution) else np.asarray(dist)
    return PermutationTransform(ranks_ascending(probs), kind="order")


def block_order_permutation(dist, b: int) -> PermutationTransform:
    """Sort ascending inside each contiguous block of ``2**b`` symbols."""
    probs = dist.probs if isinstance(dist, JointDistribution) else np.asarray(dist)
    m = probs.size
    d = m.bit_length() - 1
    if not 1 <= b <= d:
        raise ValueError(f"block size b={b} must lie in [1, {d}]")
    size = 1 << b
    blocks = probs.reshape(-1, size)
    order = np.argsort(blocks, axis=1, kind="stable")
    local = np.empty_like(order)
    np.put_along_axis(local, order, np.arange(size)[None, :].repeat(blocks.shape[0], 0), axis=1)
    table = (local + (np.arange(blocks.shape[0]) * size)[:, None]).ravel()
    return PermutationTransform(table, kind="block-order", b=b)


def linear_transform(rows, d: int) -> PermutationTransform:
    """Transform ``y = W x`` over GF(2).

    ``rows[j]`` is a d-bit mask whose MSB multiplies bit 1 of ``x``; the
    result's bit ``j + 1`` is the parity of ``rows[j] & x``.
    """
    rows = [int(r) for r in rows]
    if len(rows) != d:
        raise ValueError("need exactly d rows")
    x = np.arange(1 << d, dtype=np.int64)
    y = np.zeros_like(x)
    for j, mask in enumerate(rows):
        par = _parity(x & mask)
        y |= par << (d - 1 - j)
    return PermutationTransform(y, kind="linear", matrix=np.array(rows, dtype=np.int64))


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    shift = 32
    while shift:
        v ^= v >> shift
        shift >>= 1
    return v & 1


# -- descriptors --------------------------------------------------------------
#
# byte 0      tag (0 explicit, 1 order, 2 block-order, 3 linear)
# byte 1      d
# explicit    m little-endian uint32 entries (the table)
# order       uint32 count c, then c uint32 symbols in ascending-probability
#             order; unlisted symbols precede them in index order
# block-order byte b, then m uint32 entries (the table)
# linear      d little-endian uint64 row masks

def encode_descriptor(t: PermutationTransform) -> bytes:
    m = t.m
    d = m.bit_length() - 1
    head = bytes([0, d])
    if t.kind == "linear" and t.matrix is not None:
        return bytes([TAG_LINEAR, d]) + struct.pack(f"<{d}Q", *[int(r) for r in t.matrix])
    if t.kind == "block-order" and t.b is not None:
        return bytes([TAG_BLOCK_ORDER, d, t.b]) + t.table.astype("<u4").tobytes()
    if t.kind == "order":
        order = t.inverse().table  # output rank -> input symbol
        # trailing ranks that cannot be recovered from index order are listed
        listed = _order_suffix(order)
        return (bytes([TAG_ORDER, d]) + struct.pack("<I", listed.size)
                + listed.astype("<u4").tobytes())
    return head + t.table.astype("<u4").tobytes()


def order_from_suffix(m: int, listed) -> np.ndarray:
    """Rebuild ``rank -> symbol`` from the listed top of an ascending order."""
    listed = np.asarray(listed, dtype=np.int64)
    mask = np.ones(m, dtype=bool)
    mask[listed] = False
    return np.concatenate([np.flatnonzero(mask), listed])


def _order_suffix(order: np.ndarray) -> np.ndarray:
    # the unlisted head is the longest strictly increasing prefix
    drops = np.flatnonzero(np.diff(order) < 0)
    k = order.size if drops.size == 0 else int(drops[0]) + 1
    return order[k:]


def decode_descriptor(data: bytes) -> PermutationTransform:
    if len(data) < 2:
        raise TruncatedStream("descriptor too short")
    tag, d = data[0], data[1]
    m = 1 << d
    try:
        if tag == TAG_EXPLICIT:
            return PermutationTransform(np.frombuffer(data[2:2 + 4 * m], "<u4").astype(np.int64))
        if tag == TAG_BLOCK_ORDER:
            b = data[2]
            table = np.frombuffer(data[3:3 + 4 * m], "<u4").astype(np.int64)
            return PermutationTransform(table, kind="block-order", b=b)
        if tag == TAG_ORDER:
            (c,) = struct.unpack_from("<I", data, 2)
            listed = np.frombuffer(data[6:6 + 4 * c], "<u4").astype(np.int64)
            if listed.size != c:
                raise TruncatedStream("order descriptor truncated")
            order = order_from_suffix(m, listed)
            table = np.empty(m, dtype=np.int64)
            table[order] = np.arange(m)
            return PermutationTransform(table, kind="order")
        if tag == TAG_LINEAR:
            rows = struct.unpack_from(f"<{d}Q", data, 2)
            return linear_transform(rows, d)
    except (struct.error, ValueError) as exc:
        if isinstance(exc, TruncatedStream):
            raise
        raise TruncatedStream(f"bad descriptor payload: {exc}") from exc
    raise ValueError(f"unknown descriptor tag {tag}")


def descriptor_size(t: PermutationTransform) -> int:
    return len(encode_descriptor(t))


__all__ = [
    "PermutationTransform", "apply", "invert", "cost", "order_permutation",
    "block_order_permutation", "linear_transform", "encode_descriptor",
    "decode_descriptor", "marginal_bit_probs",
]
