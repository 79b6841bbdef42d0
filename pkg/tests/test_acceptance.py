"""The ten acceptance criteria, each printing one PASS/FAIL line.

Monte Carlo sigma is the standard error of the replication mean.
"""

import math
import time

import numpy as np
import pytest

from hyperdrones.analytics import BoundParams, isolation_exponent, isolation_exponent_closed, mellin_f
from hyperdrones.coverage import drones_needed, radio_range
from hyperdrones.experiments import ExperimentConfig, derive_seed, run
from hyperdrones.garages import EliminationConfig, eliminate_garages, relay_order, verify_covering_transfer
from hyperdrones.geometry import MapParams, build_grid
from hyperdrones.processes import GnbParams, GnbSet, MobileParams, fractal_dim_gnb, sample_gnbs, sample_mobiles

from conftest import ACCEPTANCE_LINES
from oracles import as_point, brute_force_drones, toy_instance

N_SWEEP = [400, 800, 1600, 3200]
REPS = 50
BASE_SEED = 2024


def report(number, passed, detail):
    line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def sem(values):
    values = np.asarray(values, dtype=float)
    return values.std(ddof=1) / math.sqrt(len(values))


def criterion1_config():
    return ExperimentConfig("isolation-sweep", n_values=N_SWEEP, d_F=3.0, d_r=3.0, theta=1.0, c=1.0,
                            replications=REPS, seed=BASE_SEED)


@pytest.fixture(scope="module")
def criterion1_run():
    start = time.perf_counter()
    result = run(criterion1_config())
    return result, time.perf_counter() - start


def test_criterion_1_isolation_dominance(criterion1_run):
    result, elapsed = criterion1_run
    means, ok, parts = [], True, []
    for params in result.param_sets():
        iso = result.per_rep("isolated_fraction", params)
        bound = result.metric("bound_sum", params)[0].value
        means.append(iso.mean())
        ok &= iso.mean() <= bound + 3 * sem(iso)
        parts.append(f"{params.split(';')[0]}: {iso.mean():.4f}<={bound:.4f}")
    monotone = all(a > b for a, b in zip(means, means[1:]))
    report(1, ok and monotone and elapsed < 120,
           f"{', '.join(parts)}; decreasing={monotone}; {elapsed:.1f}s")


def test_criterion_2_regime_collapse():
    start = time.perf_counter()
    result = run(ExperimentConfig("regime-collapse", n_values=N_SWEEP, d_F=3.0, d_r=3.0, theta=0.5, c=1.0,
                                  replications=REPS, seed=BASE_SEED))
    elapsed = time.perf_counter() - start
    covered = {int(p.split(";")[0][2:]): result.per_rep("covered_fraction", p).mean() for p in result.param_sets()}
    ok = covered[3200] < covered[400] and covered[3200] < 0.5 and elapsed < 120
    report(2, ok, f"covered fraction n=400: {covered[400]:.4f}, n=3200: {covered[3200]:.4f}; {elapsed:.1f}s")


def test_criterion_3_drone_coupling():
    start = time.perf_counter()
    ok, parts = True, []
    for d_r in (3.0, 4.0):
        result = run(ExperimentConfig("drone-sweep", n_values=N_SWEEP, d_F=3.0, d_r=d_r, theta=1.0, c=1.0,
                                      replications=REPS, seed=BASE_SEED))
        for params in result.param_sets():
            drones = result.per_rep("total_drones", params)
            isolated = result.per_rep("isolated_count", params)
            factor = result.metric("series_factor", params)[0].value
            ok &= bool(np.all(drones >= isolated))
            ratio = drones.mean() / isolated.mean()
            # delta-method standard error of the ratio of means
            resid = (drones - ratio * isolated) / isolated.mean()
            ok &= ratio <= factor + 3 * sem(resid)
            parts.append(f"d_r={d_r:g} {params.split(';')[0]}: {ratio:.3f}<={factor:.3f}")
    elapsed = time.perf_counter() - start
    report(3, ok and elapsed < 180, f"{', '.join(parts)}; {elapsed:.1f}s")


def test_criterion_4_mellin():
    params = BoundParams.from_dimensions(3.0, 3.0, 1.0)
    errs = [mellin_f(y, params).relative_error for y in (1e2, 1e4, 1e6, 1e8)]
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    report(4, errs[-1] < 0.05 and decreasing,
           "relative errors " + ", ".join(f"{e:.3e}" for e in errs) + f"; decreasing={decreasing}")


def test_criterion_5_exponent_identity():
    worst = 0.0
    for d_F in np.linspace(2.2, 5.0, 5):
        for d_r in np.linspace(2.0, 6.0, 5):
            for theta in np.linspace(d_r / 4 + 0.01, 2.0, 4):
                params = BoundParams.from_dimensions(float(d_F), float(d_r), float(theta))
                worst = max(worst, abs(isolation_exponent(params) - isolation_exponent_closed(d_F, d_r, theta)))
    report(5, worst <= 1e-12, f"max abs difference {worst:.2e} over 100 points")


def reference_setup(n=5000):
    p_prime = 0.1
    d_r = fractal_dim_gnb(p_prime)
    depth = ExperimentConfig("garage-curve", n_values=[n]).depth_for()
    return p_prime, 1.2 * d_r / 4, depth, radio_range(n, math.sqrt(10))


def test_criterion_6_covering_transfer():
    start = time.perf_counter()
    n = 5000
    p_prime, theta, depth, R_n = reference_setup(n)
    grid = build_grid(MapParams(depth))
    runs = violations = 0
    for s in range(10):
        relays = sample_gnbs(GnbParams.from_theta(n, theta, p_prime, depth), grid, derive_seed(BASE_SEED, s, "relays"))
        points = sample_mobiles(MobileParams(10_000, 0.5, depth), grid, derive_seed(BASE_SEED, s, "test-points"))
        for o in range(10):
            order = relay_order(relays) if o == 0 else relay_order(relays, "by-seed-shuffle",
                                                                   derive_seed(BASE_SEED, 10 * s + o, "order"))
            for mult in (5, 10, 20, 40, 80):
                R = mult * R_n
                for torus in (False, True):
                    gs = eliminate_garages(relays, EliminationConfig(R, order, torus), grid)
                    violations += len(verify_covering_transfer(points, relays, gs, R, torus).violations)
                    runs += 1
    elapsed = time.perf_counter() - start
    report(6, violations == 0 and elapsed < 180,
           f"{violations} violations over {runs} runs x 10^4 test points (plane and torus); {elapsed:.1f}s")


def test_criterion_7_garage_curve():
    start = time.perf_counter()
    result = run(ExperimentConfig("garage-curve", n_values=[5000], torus=True, replications=REPS, seed=BASE_SEED,
                                  radii=[5, 10, 20, 40, 80]))
    elapsed = time.perf_counter() - start
    params = result.param_sets()[0]
    relays = result.per_rep("relays", params)
    curve = np.column_stack([result.per_rep(f"garages_R{m}", params) for m in (0, 5, 10, 20, 40, 80)])
    exact_start = bool(np.all(curve[:, 0] == relays))
    small_end = bool(np.all(curve[:, -1] <= 0.05 * relays))
    monotone = bool(np.all(np.diff(curve, axis=1) <= 0))
    worst = float(np.max(curve[:, -1] / relays))
    report(7, exact_start and small_end and monotone and elapsed < 120,
           f"R=0 equals relays: {exact_start}; max garages(80R_n)/relays {worst:.3f}; "
           f"non-increasing: {monotone}; {elapsed:.1f}s")


def test_criterion_8_hop_histogram():
    start = time.perf_counter()
    result = run(ExperimentConfig("hop-histogram", n_values=[5000], replications=REPS, seed=BASE_SEED))
    elapsed = time.perf_counter() - start
    params = result.param_sets()[0]
    good = 0
    for rep in range(REPS):
        hist = {int(row.metric[4:]): int(row.value) for row in result.rows
                if row.params == params and row.rep == rep and row.metric[4:].isdigit()
                and row.metric.startswith("hop_")}
        top = max(hist)
        counts = np.array([hist.get(h, 0) for h in range(1, top + 1)])
        mode = int(np.argmax(counts)) + 1
        tail = counts[mode - 1:]
        good += mode <= 2 and bool(np.all(np.diff(tail) <= 0))
    report(8, good >= 45 and elapsed < 120, f"{good}/{REPS} replications with mode <= 2 and monotone tail; {elapsed:.1f}s")


def test_criterion_9_toy_oracle():
    rng = np.random.default_rng(BASE_SEED)
    mismatches = nodes = 0
    for _ in range(1000):
        gnbs, points, R, torus = toy_instance(rng)
        gset = GnbSet.from_positions(gnbs, depth=2)
        for node in points:
            want = brute_force_drones(node, gnbs, R, torus)
            k, best, path = drones_needed(as_point(node), gset, float(R), torus)
            nodes += 1
            if (k, best.position, path.kind) != (want[0], tuple(float(v) for v in want[1]), want[2]):
                mismatches += 1
    report(9, mismatches == 0, f"{mismatches} mismatches over 1000 instances ({nodes} nodes)")


def test_criterion_10_determinism(criterion1_run):
    first, _ = criterion1_run
    second = run(criterion1_config())
    same = first.csv_text().encode() == second.csv_text().encode()
    report(10, same, f"byte-identical CSV on rerun: {same} ({len(first.csv_text())} bytes)")
