"""Garage selection by sequential elimination among relays.

Every relay starts as a garage. Relays are visited once in a fixed
order; a relay is eliminated when four relays visited before it, one in
each sector around it, lie at Manhattan distance strictly below ``R``.
Eliminated relays still count as coverers for later ones.

Sectors default to the diagonal partition (see ``geometry.sector_of``):
with Manhattan distance it is the partition for which a coverer in the
same sector as a point is guaranteed to reach that point, so every
point within ``R`` of some relay stays within ``R`` of a garage. The
axis-aligned quadrants are available for comparison but do not carry
that guarantee.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointOnStreet, ceil_ratio, quadrant_codes, sector_codes, wrap_offset
from .processes import GnbSet, MobileSample

ORDERS = ("by-index", "arbitrary", "by-seed-shuffle")
PARTITIONS = ("diagonal", "axis")


@dataclass(frozen=True)
class EliminationConfig:
    radius: float
    order: Union[str, Sequence[int]] = "by-index"
    torus: bool = False
    seed: Optional[int] = None
    partition: str = "diagonal"

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError(f"coverage radius must be non-negative, got {self.radius}")
        if isinstance(self.order, str) and self.order not in ORDERS:
            raise ValueError(f"unknown order {self.order!r}; expected one of {ORDERS}")
        if isinstance(self.order, str) and self.order == "by-seed-shuffle" and self.seed is None:
            raise ValueError("by-seed-shuffle needs a seed")
        if self.partition not in PARTITIONS:
            raise ValueError(f"unknown partition {self.partition!r}")


@dataclass
class GarageSet:
    relays: GnbSet
    is_garage: np.ndarray                  # indexed like ``relays``
    eliminated: list = field(default_factory=list)   # (relay, (four coverers)), relay indices
    order_used: np.ndarray = None
    radius: float = 0.0
    torus: bool = False

    @property
    def count(self) -> int:
        return int(np.sum(self.is_garage))

    @property
    def garages(self) -> GnbSet:
        return self.relays.subset(self.is_garage)

    @property
    def positions(self) -> np.ndarray:
        return self.relays.positions[self.is_garage]


def relay_order(relays: GnbSet, order="by-index", seed=None) -> np.ndarray:
    """Permutation of relay indices giving the visiting order ``A_1, A_2, ...``."""
    n = len(relays)
    if not isinstance(order, str):
        perm = np.asarray(order, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("explicit order must be a permutation of the relay indices")
        return perm
    if order == "arbitrary":
        return np.arange(n)
    if order == "by-seed-shuffle":
        return np.random.default_rng(seed).permutation(n)
    # coarse crossings first, then by position (relays are stored sorted by (x, y))
    return np.argsort(relays.h + relays.v, kind="stable")


def _offsets(points: np.ndarray, center: np.ndarray, torus: bool):
    dx = points[:, 0] - center[0]
    dy = points[:, 1] - center[1]
    if torus:
        dx, dy = wrap_offset(dx), wrap_offset(dy)
    return dx, dy


def eliminate_garages(relays: GnbSet, cfg: EliminationConfig, grid=None) -> GarageSet:
    if len(relays) == 0:
        raise ValueError("need at least one relay")
    if grid is not None and grid.depth != relays.depth:
        raise ValueError("relays do not belong to this grid")
    perm = relay_order(relays, cfg.order, cfg.seed)
    pos = relays.positions[perm]
    codes_of = sector_codes if cfg.partition == "diagonal" else quadrant_codes
    is_garage = np.ones(len(relays), dtype=bool)
    eliminated = []
    R = cfg.radius
    for rank in range(1, len(perm)):
        earlier = pos[:rank]
        dx, dy = _offsets(earlier, pos[rank], cfg.torus)
        dist = np.abs(dx) + np.abs(dy)
        near = np.flatnonzero(dist < R)
        if len(near) < 4:
            continue
        codes = codes_of(dx[near], dy[near])
        if len(np.unique(codes)) < 4:
            continue
        coverers = []
        for c in range(4):
            members = near[codes == c]
            # nearest coverer in the sector, earliest on ties
            coverers.append(int(perm[members[np.argmin(dist[members])]]))
        relay = int(perm[rank])
        is_garage[relay] = False
        eliminated.append((relay, tuple(coverers)))
    return GarageSet(relays, is_garage, eliminated, perm, R, cfg.torus)


def _positions(points) -> np.ndarray:
    if isinstance(points, (MobileSample, GnbSet)):
        return points.positions
    if len(points) and isinstance(points[0], PointOnStreet):
        return np.array([p.position for p in points], dtype=float)
    return np.asarray(points, dtype=float).reshape(-1, 2)


def nearest_distance(points, targets: np.ndarray, torus: bool = False) -> np.ndarray:
    """Manhattan distance from each point to the closest target crossing.

    From a point on a street to a crossing a two-leg path always exists
    (turn at the crossing's perpendicular street), so this is the L1
    distance, wrapped per axis on the torus.
    """
    pts = _positions(points)
    targets = np.asarray(targets, dtype=float).reshape(-1, 2)
    if len(targets) == 0:
        return np.full(len(pts), np.inf)
    tree = cKDTree(targets, boxsize=1.0 if torus else None)
    d, _ = tree.query(pts, k=1, p=1)
    return np.asarray(d, dtype=float)


@dataclass(frozen=True)
class CoveringCheck:
    checked: int          # test points within R of some relay
    violations: np.ndarray  # indices of test points left without a garage within R

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0


class LemmaViolation(AssertionError):
    pass


def verify_covering_transfer(test_points, relays: GnbSet, garages: GarageSet, R: float,
                             torus: bool = False, strict: bool = False) -> CoveringCheck:
    """Check that every test point within ``R`` of a relay is within ``R`` of a garage.

    With ``strict=True`` a counterexample raises ``LemmaViolation``.
    """
    if garages.radius != R or garages.torus != torus:
        raise ValueError("garages were selected with a different radius or metric")
    d_relay = nearest_distance(test_points, relays.positions, torus)
    d_garage = nearest_distance(test_points, garages.positions, torus)
    reached = d_relay < R
    bad = np.flatnonzero(reached & ~(d_garage < R))
    check = CoveringCheck(int(np.sum(reached)), bad)
    if strict and not check.passed:
        raise LemmaViolation(f"{len(bad)} test points lost their covering garage")
    return check


def garage_hops(nodes, garages: GarageSet, R_n: float, torus: bool = False) -> np.ndarray:
    """Hop count ``max(1, ceil(d / R_n))`` to the closest garage; -1 when there is none."""
    d = nearest_distance(nodes, garages.positions, torus)
    hops = np.full(len(d), -1, dtype=np.int64)
    ok = np.isfinite(d)
    hops[ok] = np.maximum(1, ceil_ratio(d[ok], R_n))
    return hops


def distance_to_closest_garage(nodes, garages: GarageSet, R_n: float, torus: bool = False) -> dict:
    hops = garage_hops(nodes, garages, R_n, torus)
    counts = Counter(hops[hops > 0].tolist())
    hist = {int(k): counts[k] for k in sorted(counts)}
    missing = int(np.sum(hops < 0))
    if missing:
        hist["unreachable"] = missing
    return hist


def garage_count_curve(relays: GnbSet, radii: Sequence[float], order="by-index", torus: bool = False,
                       seed=None, partition: str = "diagonal") -> list[tuple[float, int]]:
    radii = list(radii)
    if radii != sorted(radii):
        raise ValueError("radii must be sorted ascending")
    perm = relay_order(relays, order, seed)
    out = []
    for R in radii:
        gs = eliminate_garages(relays, EliminationConfig(R, perm, torus, partition=partition))
        out.append((R, gs.count))
    return out
