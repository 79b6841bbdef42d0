"""Sample a hyperfractal city: mobiles on streets and gNBs at crossings.

Run with ``python3 demos/01_sample_a_map.py``.
"""
import numpy as np

from hyperdrones import (
    GnbParams, MapParams, MobileParams, build_grid, fractal_dim_gnb, fractal_dim_mobiles,
    sample_gnbs, sample_mobiles,
)

depth = 10
grid = build_grid(MapParams(depth))

# Mobiles: a node lands on a level-l street with probability p q^l.
# p = 1/2 gives q = 1/2 and a fractal dimension of 3.
n = 5000
mobiles = sample_mobiles(MobileParams(n, 0.5, depth), grid, seed=1)
print(f"mobile dimension d_F = {fractal_dim_mobiles(0.5):.3f}")
print("nodes per street level:", np.bincount(mobiles.level))

# gNBs: each crossing of levels (h, v) is occupied with a mean that decays like (q'/2)^(h+v).
p_prime = 0.1
theta = 1.2 * fractal_dim_gnb(p_prime) / 4
gnbs = sample_gnbs(GnbParams.from_theta(n, theta, p_prime, depth), grid, seed=2)
print(f"gNB dimension d_r = {fractal_dim_gnb(p_prime):.3f}, {len(gnbs)} gNBs placed")
print("gNBs per crossing class h + v:", np.bincount(gnbs.h + gnbs.v))

# The same seed always gives the same map.
again = sample_mobiles(MobileParams(n, 0.5, depth), grid, seed=1)
print("reproducible:", np.array_equal(again.positions, mobiles.positions))
