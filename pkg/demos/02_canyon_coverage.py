"""Canyon coverage and the drones needed to reach isolated nodes.

A node is covered only by a gNB on its own street within range R.
Otherwise a chain of drones relays it along one or two street legs.
"""
import math

from hyperdrones import (
    HORIZONTAL, GnbParams, MapParams, MobileParams, PointOnStreet, Street, build_grid, coverage_report,
    drones_needed, radio_range, sample_gnbs, sample_mobiles,
)
from hyperdrones.processes import GnbSet

# A hand-built example on a depth-3 map: one gNB at the centre crossing.
gnbs = GnbSet.from_positions([(0.5, 0.5)], depth=3)
R = 0.1
for a in (0.55, 0.75, 0.95):
    node = PointOnStreet(Street(HORIZONTAL, 0, 0), a)
    k, best, path = drones_needed(node, gnbs, R)
    print(f"node at x={a}: {k} drones via a {path.kind} path of length {path.length:.3f}")

# A sampled city at the scale used for the garage study.
n, depth = 5000, 12
grid = build_grid(MapParams(depth))
mobiles = sample_mobiles(MobileParams(n, 0.5, depth), grid, seed=3)
relays = sample_gnbs(GnbParams.from_theta(n, 0.7, 0.1, depth), grid, seed=4)
report = coverage_report(mobiles, relays, radio_range(n, math.sqrt(10)))
print(f"isolated nodes: {report.isolated_count} of {n}")
print(f"drones to serve them all: {report.total_drones}")
print("hop histogram:", dict(sorted(report.hop_histogram.items())))
