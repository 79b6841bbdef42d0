"""Drone garages: keep a subset of relays so that every point within R of a relay
stays within R of a garage."""
import math

import numpy as np

from hyperdrones import (
    EliminationConfig, GnbParams, MapParams, build_grid, eliminate_garages, garage_count_curve,
    radio_range, sample_gnbs, verify_covering_transfer,
)

n, depth = 5000, 12
grid = build_grid(MapParams(depth))
relays = sample_gnbs(GnbParams.from_theta(n, 0.7, 0.1, depth), grid, seed=5)
R_n = radio_range(n, math.sqrt(10))
print(f"{len(relays)} relays, R_n = {R_n:.4f}")

radii = [m * R_n for m in (0, 5, 10, 20, 40, 80)]
for torus in (False, True):
    curve = garage_count_curve(relays, radii, torus=torus)
    print("torus" if torus else "plane", [count for _, count in curve])

# Check the covering property on random test points.
R = 20 * R_n
garages = eliminate_garages(relays, EliminationConfig(R, torus=True), grid)
points = np.random.default_rng(6).random((10_000, 2))
check = verify_covering_transfer(points, relays, garages, R, torus=True)
print(f"{garages.count} garages at R = 20 R_n, covering property holds: {check.passed}")
