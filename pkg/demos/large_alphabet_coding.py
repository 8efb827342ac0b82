"""Compressing a large-alphabet i.i.d. source: whole-alphabet coding against
block-wise coding after relabeling, with real byte counts.

Run: python demos/large_alphabet_coding.py
"""
import numpy as np

from gbica import universal
from gbica.entropy_coding import decode_stream, encode_stream
from gbica.probability import gen_zipf, sample

d, n = 12, 20_000
m = 1 << d
dist = gen_zipf(m, 1.2)
x = sample(dist, n, np.random.default_rng(3))
print(f"{n} samples from Zipf(1.2) over 2^{d} symbols, H = {dist.entropy():.3f} bits")

print("\nSize estimates (bits per sample)")
print(f"  whole alphabet, n*H_hat + redundancy  {universal.whole_alphabet_total(x, m) / n:.3f}")
for B in (2, 3):
    st = universal.blockwise_pipeline(x, d, B, max_iters=10, rng=0)
    print(f"  {B} blocks, selected pass {st.I0:2d}          {st.total_bits / n:.3f}")

print("\nActual streams (bits per sample)")
for coder in ("huffman", "arith", "adaptive"):
    data = encode_stream(x, m, coder)
    assert np.array_equal(decode_stream(data), x)
    print(f"  {coder:9s}                  {8 * len(data) / n:.3f}")
for scheme, mode in [("adaptive", "marginal"), ("adaptive", "block"), ("fixed", "block")]:
    data = universal.permutation_coded_encode(x, m, scheme, mode, reference=dist)
    assert np.array_equal(universal.permutation_coded_decode(data, reference=dist), x)
    print(f"  permutation {scheme:8s} {mode:8s} {8 * len(data) / n:.3f}")
data = universal.sliding_window_encode(x, m, 100, "block")
assert np.array_equal(universal.sliding_window_decode(data), x)
print(f"  sliding window l=100, block   {8 * len(data) / n:.3f}")
