"""How much does coding bits independently cost, and how far can relabeling cut it?

Run: python demos/relabeling_tour.py
"""
import numpy as np

from gbica import bica_exact, bica_linear, bica_relax
from gbica.probability import JointDistribution, gen_uniform_simplex, gen_zipf
from gbica.theory import avg_case_cost_bound, worst_case_cost, worst_case_limit
from gbica.transforms import block_order_permutation, cost, order_permutation

rng = np.random.default_rng(7)

print("Zipf(s=1) over 2^10 symbols, labels shuffled")
dist = JointDistribution(rng.permutation(gen_zipf(1 << 10, 1.0).probs))
print(f"  joint entropy           {dist.entropy():8.4f} bits")
print(f"  identity labels, cost   {cost(dist):8.4f}")
print(f"  order permutation, cost {cost(dist, order_permutation(dist)):8.4f}")
print(f"  block order (b=6), cost {cost(dist, block_order_permutation(dist, 6)):8.4f}")

print("\nFlat-simplex draws at d=10 (mean over 200)")
draws = [gen_uniform_simplex(1 << 10, rng) for _ in range(200)]
print(f"  identity   {np.mean([cost(p) for p in draws]):.4f}")
print(f"  order      {np.mean([cost(p, order_permutation(p)) for p in draws]):.4f}"
      f"   (large-m limit of the bound {avg_case_cost_bound(10):.4f})")

print("\nWorst case grows like log2(m)")
for d in (4, 8, 16):
    print(f"  m=2^{d:<2d} cost {worst_case_cost(1 << d):.4f}  per bit {worst_case_cost(1 << d) / d:.4f}")
print(f"  limit per bit {worst_case_limit():.4f}")

print("\nOne d=3 instance, every solver")
p = gen_uniform_simplex(8, rng)
_, bnb = bica_exact.branch_and_bound_optimal(p)
_, relaxed, _ = bica_relax.relaxed_bica_binary(p)
_, descent = bica_relax.objective_descent_qary(p, n_init=10, rng=1)
_, greedy = bica_linear.greedy_linear_bica(p)
for name, c in [("identity", cost(p)), ("order", cost(p, order_permutation(p))),
                ("relaxed k=8", relaxed), ("descent", descent), ("linear greedy", greedy),
                ("branch and bound", bnb)]:
    print(f"  {name:17s} {c:.5f}")
