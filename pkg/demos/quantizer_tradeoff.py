"""Rate against distortion for clustered and lattice quantizers, coding the
index jointly or bit by bit.

Run: python demos/quantizer_tradeoff.py
"""
import numpy as np

from gbica import vq
from gbica.experiments import mixture_2d

x = mixture_2d(2000, 0)
init = x[np.random.default_rng(1).choice(len(x), 16, replace=False)]
print("2D Gaussian mixture, 16 clusters")
print(f"{'lambda':>7s} {'D joint':>8s} {'R joint':>8s} {'D bits':>8s} {'R bits':>8s}")
for lam in (0.05, 0.2, 0.5, 1.0, 2.0):
    a = vq.ecvq(x, 16, lam, init=init)
    b = vq.bica_ecvq(x, 16, lam, init=init)
    print(f"{lam:7.2f} {a.distortion(x):8.4f} {a.rate():8.4f} {b.distortion(x):8.4f} {b.rate():8.4f}")

z = np.random.default_rng(2).standard_normal((50_000, 3))
print("\nCubic lattice on 3D standard normal data (bits per dimension)")
# "plug-in" is the empirical joint entropy, which undercounts once cells outnumber
# samples; "adaptive" is the length an add-1/2 coder actually achieves
print(f"{'delta':>6s} {'MSE':>8s} {'plug-in':>8s} {'bitwise':>8s} {'adaptive':>9s} {'R(D)':>7s}")
sigma = z.std(axis=0)
for delta in (0.1, 0.25, 0.5, 1.0, 2.0):
    spec = vq.LatticeSpec("Z", delta)
    r = vq.lattice_quantize(z, spec, sigma=sigma)
    joint, marg = vq.marginal_joint_gap(r.counts)
    adaptive = vq.adaptive_rate(r.symbols, max(r.n_cells, vq.lattice_cell_count(spec, sigma)))
    bound = vq.gaussian_rate_distortion(3, 3 * r.distortion) / 3
    print(f"{delta:6.2f} {r.distortion:8.5f} {joint / 3:8.3f} {marg / 3:8.3f} {adaptive / 3:9.3f} "
          f"{bound:7.3f}")
