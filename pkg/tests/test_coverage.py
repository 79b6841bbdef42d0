import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdrones.coverage import (
    UNREACHABLE,
    RadioParams,
    assess,
    coverage_report,
    drones_needed,
    is_covered,
    radio_range,
)
from hyperdrones.geometry import HORIZONTAL, VERTICAL, ConfigurationError, MapParams, Street, build_grid
from hyperdrones.processes import GnbParams, GnbSet, MobileParams, MobileSample, sample_gnbs, sample_mobiles

from oracles import as_point, brute_force_drones, toy_instance


def test_radio_range_examples():
    assert radio_range(100, 1) == pytest.approx(0.1)
    assert radio_range(1000, math.sqrt(10)) == pytest.approx(0.1)
    assert radio_range(10_000, math.sqrt(10)) == pytest.approx(0.0316, abs=1e-4)
    assert RadioParams(400).R == pytest.approx(0.05)
    with pytest.raises(ConfigurationError):
        radio_range(0.5)
    with pytest.raises(ConfigurationError):
        RadioParams(100, c=0.0)


# a depth-3 map: central horizontal street y = 1/2
DEPTH = 3
CENTRE_H = Street(HORIZONTAL, 0, 0)


def gnbs_at(*positions, depth=DEPTH):
    return GnbSet.from_positions(positions, depth=depth)


def test_gnb_at_node_position_covers():
    node = CENTRE_H.point(0.25)
    assert is_covered(node, gnbs_at((0.25, 0.5)), R=0.01)


def test_far_same_street_gnb_does_not_cover():
    R = 0.1
    node = CENTRE_H.point(0.1)
    gnbs = gnbs_at((0.25, 0.5))                 # 1.5 R away
    assert not is_covered(node, gnbs, R)
    assert is_covered(node, gnbs, 0.15)          # exactly R away still counts


def test_parallel_street_gnb_does_not_cover():
    # the gNB sits on the parallel street y = 9/16, Euclidean distance about 0.06
    node = CENTRE_H.point(0.3)
    assert not is_covered(node, gnbs_at((0.3125, 0.5625)), R=0.3)
    assert is_covered(node, gnbs_at((0.3125, 0.5)), R=0.3)


def test_drones_needed_examples():
    R = 0.1
    k, best, path = drones_needed(CENTRE_H.point(0.45), gnbs_at((0.5, 0.5)), R)
    assert (k, path.kind) == (0, "one-leg")
    k, best, path = drones_needed(CENTRE_H.point(0.25), gnbs_at((0.5, 0.5)), R)
    assert (k, path.kind, path.length) == (2, "one-leg", pytest.approx(0.25))
    assert best.position == (0.5, 0.5)
    # a two-leg path of length 2.5 R: 0.125 along the street, 0.125 up
    k, best, path = drones_needed(CENTRE_H.point(0.375), gnbs_at((0.25, 0.625)), R)
    assert (k, path.kind) == (3, "two-leg")
    assert path.length == pytest.approx(0.25)
    assert path.corner == (0.25, 0.5)


def test_corner_gnb_within_range_still_needs_a_drone():
    node = CENTRE_H.point(0.5)
    k, _, path = drones_needed(node, gnbs_at((0.5, 0.5625)), R=0.1)
    assert k == 1 and path.kind == "two-leg"


def test_unreachable_without_gnbs():
    grid = build_grid(MapParams(6))
    mobiles = sample_mobiles(MobileParams(50, 0.5, 6), grid, seed=1)
    empty = GnbSet(np.zeros(0, np.int64), np.zeros(0, np.int64), 6)
    rep = coverage_report(mobiles, empty, 0.1)
    assert rep.unreachable_count == 50
    assert rep.hop_histogram == {"unreachable": 50}
    assert rep.isolated_count == 50
    assert drones_needed(CENTRE_H.point(0.5), GnbSet(np.zeros(0, np.int64), np.zeros(0, np.int64), DEPTH), 0.1) == (
        UNREACHABLE, None, None)


def test_every_crossing_occupied_leaves_nobody_isolated():
    U = 5
    grid = build_grid(MapParams(U))
    arr = grid.intersection_arrays()
    gnbs = GnbSet.from_positions(zip(arr["x"], arr["y"]), depth=U)
    mobiles = sample_mobiles(MobileParams(2000, 0.4, U), grid, seed=8)
    rep = coverage_report(mobiles, gnbs, R=2.0 ** -(U + 1))
    assert rep.isolated_count == 0
    assert rep.total_drones == 0
    assert rep.hop_histogram == {1: 2000}


@pytest.mark.parametrize("seed", range(5))
def test_toy_instances_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    for _ in range(40):
        gnbs, nodes, R, torus = toy_instance(rng)
        gset = GnbSet.from_positions(gnbs, depth=2)
        for node in nodes:
            want = brute_force_drones(node, gnbs, R, torus)
            k, best, path = drones_needed(as_point(node), gset, float(R), torus)
            assert k == want[0]
            assert best.position == tuple(float(v) for v in want[1])
            assert path.kind == want[2]
            assert path.length == pytest.approx(float(want[3]), abs=1e-12)


def sampled_pair(seed, n=600, U=10, theta=0.9, p_prime=0.2):
    grid = build_grid(MapParams(U))
    mobiles = sample_mobiles(MobileParams(n, 0.5, U), grid, seed)
    gnbs = sample_gnbs(GnbParams.from_theta(n, theta, p_prime, U), grid, seed + 1000)
    return mobiles, gnbs


def test_report_consistency():
    mobiles, gnbs = sampled_pair(3)
    R = radio_range(600, 1.0)
    rep = coverage_report(mobiles, gnbs, R)
    drones = rep.result.drones
    assert rep.isolated_count == int(np.sum(drones >= 1))
    assert rep.total_drones == int(drones.sum())
    assert sum(rep.hop_histogram.values()) == len(mobiles)
    assert rep.total_drones >= rep.isolated_count
    for i in range(0, len(mobiles), 37):
        node = rep.per_node[i]
        assert node.isolated == (node.drones_needed >= 1)
        assert node.isolated == (not is_covered(node.node, gnbs, R))
        if not node.isolated:
            assert node.path.kind == "one-leg" and node.path.length <= R


def test_vectorised_matches_single_node_calls():
    mobiles, gnbs = sampled_pair(4, n=200)
    R = 0.07
    res = assess(mobiles, gnbs, R, torus=True)
    for i, point in enumerate(mobiles.points):
        k, best, _ = drones_needed(point, gnbs, R, torus=True)
        assert k == res.drones[i]
        assert best.position == tuple(gnbs.positions[res.best[i]])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_adding_a_gnb_never_hurts(seed, torus):
    mobiles, gnbs = sampled_pair(seed, n=150, U=7)
    R = 0.06
    before = assess(mobiles, gnbs, R, torus).drones
    rng = np.random.default_rng(seed)
    free = [(x, y) for x, y in zip(rng.integers(1, 256, 50), rng.integers(1, 256, 50))
            if not np.any((gnbs.x_tick == x) & (gnbs.y_tick == y))]
    x, y = free[0]
    more = GnbSet(np.append(gnbs.x_tick, x), np.append(gnbs.y_tick, y), gnbs.depth)
    after = assess(mobiles, more, R, torus).drones
    if len(gnbs):
        assert np.all(after <= before)
    else:
        assert np.all(after >= 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.005, 0.2), st.floats(1.0, 3.0))
def test_drones_non_increasing_in_range(seed, R, factor):
    mobiles, gnbs = sampled_pair(seed, n=150, U=7)
    if len(gnbs) == 0:
        return
    small = assess(mobiles, gnbs, R).drones
    large = assess(mobiles, gnbs, R * factor).drones
    assert np.all(large <= small)


def test_hop_histogram_shape_at_reference_scale():
    n, U = 5000, 14
    grid = build_grid(MapParams(U))
    d_r = 2 * math.log2(2 / 0.9)
    mobiles = sample_mobiles(MobileParams(n, 0.5, U), grid, seed=21)
    gnbs = sample_gnbs(GnbParams.from_theta(n, 1.2 * d_r / 4, 0.1, U), grid, seed=22)
    hist = coverage_report(mobiles, gnbs, radio_range(n, math.sqrt(10))).hop_histogram
    counts = [hist.get(h, 0) for h in range(1, max(k for k in hist if k != "unreachable") + 1)]
    assert counts[0] == max(counts)
    assert counts[0] + counts[1] > 0.8 * n


def test_mismatched_depth_rejected():
    grid = build_grid(MapParams(5))
    mobiles = sample_mobiles(MobileParams(10, 0.5, 5), grid, seed=0)
    with pytest.raises(ValueError):
        assess(mobiles, gnbs_at((0.5, 0.5), depth=6), 0.1)
    with pytest.raises(ValueError):
        assess(mobiles, gnbs_at((0.5, 0.5), depth=5), 0.0)


def test_single_node_deeper_than_grid_rejected():
    with pytest.raises(ValueError):
        is_covered(Street(VERTICAL, 5, 0).point(0.5), gnbs_at((0.5, 0.5)), 0.1)


def test_exact_multiple_of_range_uses_guarded_ceiling():
    # 0.3 / 0.1 is 3.0000000000000004 in floating point; the chain needs 2 drones
    node = Street(HORIZONTAL, 0, 0).point(0.2)
    k, _, _ = drones_needed(node, gnbs_at((0.5, 0.5)), 0.1)
    assert k == 2
    assert Fraction(0.5) - Fraction(0.2) != Fraction(3, 10)  # the float gap is real
