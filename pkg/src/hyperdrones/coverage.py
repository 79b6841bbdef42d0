"""Canyon-model coverage and drone-chain dimensioning.

A node is covered when a gNB sits on its own street within one radio
range. Otherwise drones bridge the gap: a chain along one street of
length ``d`` needs ``ceil(d/R) - 1`` drones, a chain turning once at a
crossing needs ``ceil(d/R)`` (the corner drone included). The node uses
the cheapest chain to any gNB.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    ConfigurationError,
    Intersection,
    LegPath,
    PointOnStreet,
    axis_distance,
    ceil_ratio,
)
from .processes import GnbSet, MobileSample, _crossing_from_ticks

UNREACHABLE = -1
ONE_LEG = 0
TWO_LEG = 1


def radio_range(n: float, c: float = 1.0) -> float:
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    if not c > 0:
        raise ConfigurationError(f"range scale c must be positive, got {c}")
    return c / math.sqrt(n)


@dataclass(frozen=True)
class RadioParams:
    n: float
    c: float = 1.0

    def __post_init__(self):
        radio_range(self.n, self.c)

    @property
    def R(self) -> float:
        return radio_range(self.n, self.c)


@dataclass(frozen=True)
class NodeCoverage:
    node: PointOnStreet
    isolated: bool
    drones_needed: int
    best_gnb: Optional[Intersection] = None
    path: Optional[LegPath] = None


@dataclass(frozen=True)
class Assessment:
    """Per-node results as arrays, in node order."""

    drones: np.ndarray        # UNREACHABLE when no gNB exists
    covered: np.ndarray
    best: np.ndarray          # index into the gNB set, -1 if none
    kind: np.ndarray          # ONE_LEG / TWO_LEG, -1 if none
    length: np.ndarray
    one_leg: np.ndarray       # distance to the nearest same-street gNB (inf if none)
    two_leg: np.ndarray       # Manhattan distance to the nearest gNB (inf if none)


def _street_tables(gnbs: GnbSet) -> dict:
    """Sorted along-street gNB positions, keyed by (orientation code, street tick)."""
    tables = {}
    scale = gnbs.scale
    for code, fixed, free in ((0, gnbs.y_tick, gnbs.x_tick), (1, gnbs.x_tick, gnbs.y_tick)):
        order = np.lexsort((free, fixed))
        fixed_sorted = fixed[order]
        cuts = np.flatnonzero(np.diff(fixed_sorted)) + 1
        for chunk in np.split(order, cuts):
            if len(chunk):
                tables[(code, int(fixed[chunk[0]]))] = (free[chunk] / scale, chunk)
    return tables


def _nearest_on_street(abscissa: np.ndarray, along: np.ndarray, torus: bool):
    m = len(along)
    pos = np.searchsorted(along, abscissa)
    if torus:
        cands = np.stack([(pos - 1) % m, pos % m])
    else:
        cands = np.stack([np.clip(pos - 1, 0, m - 1), np.clip(pos, 0, m - 1)])
    dist = axis_distance(along[cands], abscissa[None, :], torus)
    # ties go to the smaller along-street coordinate, i.e. the smaller crossing
    key = np.lexsort((along[cands], dist), axis=0)[0]
    cols = np.arange(len(abscissa))
    pick = cands[key, cols]
    return dist[key, cols], pick


def assess(mobiles: MobileSample, gnbs: GnbSet, R: float, torus: bool = False) -> Assessment:
    """Vectorised coverage and drone counts for every mobile."""
    if not R > 0:
        raise ValueError("radio range must be positive")
    n = len(mobiles)
    one = np.full(n, np.inf)
    one_best = np.full(n, -1, dtype=np.int64)
    two = np.full(n, np.inf)
    two_best = np.full(n, -1, dtype=np.int64)
    if n == 0 or len(gnbs) == 0:
        return Assessment(
            drones=np.full(n, UNREACHABLE, dtype=np.int64),
            covered=np.zeros(n, dtype=bool),
            best=np.full(n, -1, dtype=np.int64),
            kind=np.full(n, -1, dtype=np.int64),
            length=np.full(n, np.inf),
            one_leg=one,
            two_leg=two,
        )
    if mobiles.depth != gnbs.depth:
        raise ValueError("mobiles and gNBs must share the grid depth")

    tables = _street_tables(gnbs)
    keys = mobiles.orientation.astype(np.int64) * (gnbs.scale * 2) + mobiles.ticks
    order = np.argsort(keys, kind="stable")
    cuts = np.flatnonzero(np.diff(keys[order])) + 1
    for group in np.split(order, cuts):
        key = (int(mobiles.orientation[group[0]]), int(mobiles.ticks[group[0]]))
        if key not in tables:
            continue
        along, members = tables[key]
        d, pick = _nearest_on_street(mobiles.abscissa[group], along, torus)
        one[group] = d
        one_best[group] = members[pick]

    pts = mobiles.positions
    gpos = gnbs.positions
    tree = cKDTree(gpos, boxsize=1.0 if torus else None)
    kq = min(2, len(gnbs))
    d2, i2 = tree.query(pts, k=kq, p=1)
    if kq == 1:
        d2, i2 = d2[:, None], i2[:, None]
    two[:] = d2[:, 0]
    two_best[:] = i2[:, 0]
    if kq == 2:
        # exact ties: pick the lexicographically smallest crossing
        tied = np.flatnonzero(d2[:, 1] <= d2[:, 0] * (1 + 1e-12) + 1e-15)
        for j in tied:
            cands = tree.query_ball_point(pts[j], r=d2[j, 0] * (1 + 1e-12) + 1e-15, p=1)
            cands = np.asarray(cands, dtype=np.int64)
            dist = np.abs(gpos[cands] - pts[j])
            if torus:
                dist = np.minimum(dist, 1.0 - dist)
            dist = dist.sum(axis=1)
            near = cands[dist <= dist.min() * (1 + 1e-12) + 1e-15]
            two_best[j] = near.min()  # gNB set is sorted by (x, y)

    finite = np.isfinite(one)
    k_one = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    k_one[finite] = np.maximum(0, ceil_ratio(one[finite], R) - 1)
    k_two = ceil_ratio(two, R)

    use_two = (k_two < k_one) | ((k_two == k_one) & (two < one)) | (
        (k_two == k_one) & (two == one) & (two_best < one_best))
    drones = np.where(use_two, k_two, k_one)
    return Assessment(
        drones=drones.astype(np.int64),
        covered=k_one == 0,
        best=np.where(use_two, two_best, one_best),
        kind=np.where(use_two, TWO_LEG, ONE_LEG),
        length=np.where(use_two, two, one),
        one_leg=one,
        two_leg=two,
    )


def _single(node: PointOnStreet, gnbs: GnbSet) -> MobileSample:
    if node.street.level > gnbs.depth:
        raise ValueError(f"node street level {node.street.level} deeper than the grid")
    return MobileSample.from_points([node], depth=gnbs.depth)


def is_covered(node: PointOnStreet, gnbs: GnbSet, R: float, torus: bool = False) -> bool:
    return bool(assess(_single(node, gnbs), gnbs, R, torus).covered[0])


def _path(node_xy, orientation: int, gnb_xy, kind: int, length: float) -> LegPath:
    if kind == ONE_LEG:
        return LegPath("one-leg", float(length))
    if orientation == 0:
        corner = (float(gnb_xy[0]), float(node_xy[1]))
    else:
        corner = (float(node_xy[0]), float(gnb_xy[1]))
    return LegPath("two-leg", float(length), corner)


def drones_needed(node: PointOnStreet, gnbs: GnbSet, R: float, torus: bool = False):
    """``(k, best_gnb, path)`` for one node; ``k == UNREACHABLE`` with no gNB at all."""
    sample = _single(node, gnbs)
    res = assess(sample, gnbs, R, torus)
    k = int(res.drones[0])
    if k == UNREACHABLE:
        return k, None, None
    b = int(res.best[0])
    best = _crossing_from_ticks(int(gnbs.x_tick[b]), int(gnbs.y_tick[b]), gnbs.depth)
    path = _path(node.position, int(sample.orientation[0]), best.position, int(res.kind[0]), res.length[0])
    return k, best, path


class CoverageReport:
    """Coverage outcome of a mobile sample against a gNB set."""

    def __init__(self, mobiles: MobileSample, gnbs: GnbSet, result: Assessment, R: float):
        self.mobiles = mobiles
        self.gnbs = gnbs
        self.result = result
        self.R = R

    @property
    def n(self) -> int:
        return len(self.mobiles)

    @property
    def isolated(self) -> np.ndarray:
        return ~self.result.covered

    @property
    def isolated_count(self) -> int:
        return int(np.sum(self.isolated))

    @property
    def unreachable_count(self) -> int:
        return int(np.sum(self.result.drones == UNREACHABLE))

    @property
    def total_drones(self) -> int:
        d = self.result.drones
        return int(np.sum(d[d != UNREACHABLE]))

    @property
    def isolated_fraction(self) -> float:
        return self.isolated_count / self.n if self.n else 0.0

    @cached_property
    def hop_histogram(self) -> dict:
        """Node count per hop (drones + 1); unreachable nodes under ``"unreachable"``."""
        d = self.result.drones
        counts = Counter((d[d != UNREACHABLE] + 1).tolist())
        hist = {int(k): counts[k] for k in sorted(counts)}
        if self.unreachable_count:
            hist["unreachable"] = self.unreachable_count
        return hist

    @cached_property
    def per_node(self) -> list[NodeCoverage]:
        out = []
        pos = self.mobiles.positions
        gpos = self.gnbs.positions
        for i, node in enumerate(self.mobiles.points):
            k = int(self.result.drones[i])
            best = path = None
            if k != UNREACHABLE:
                b = int(self.result.best[i])
                best = _crossing_from_ticks(int(self.gnbs.x_tick[b]), int(self.gnbs.y_tick[b]), self.gnbs.depth)
                path = _path(pos[i], int(self.mobiles.orientation[i]), gpos[b], int(self.result.kind[i]),
                             self.result.length[i])
            out.append(NodeCoverage(node, bool(self.isolated[i]), k, best, path))
        return out


def coverage_report(mobiles: MobileSample, gnbs: GnbSet, R: float, torus: bool = False) -> CoverageReport:
    return CoverageReport(mobiles, gnbs, assess(mobiles, gnbs, R, torus), R)


__all__ = [
    "UNREACHABLE", "RadioParams", "NodeCoverage", "CoverageReport", "Assessment",
    "radio_range", "is_covered", "drones_needed", "coverage_report", "assess",
]
