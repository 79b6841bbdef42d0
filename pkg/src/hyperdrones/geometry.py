"""Dyadic street grid of the unit square and canyon (street-bound) distances.

Streets are identified exactly by ``(orientation, level, index)``: the
street sits on the line ``coordinate = (2*index + 1) / 2**(level + 1)``.
A horizontal street fixes ``y`` and its free axis is ``x``; a vertical
street fixes ``x`` and its free axis is ``y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

import numpy as np

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
ORIENTATIONS = (HORIZONTAL, VERTICAL)

MAX_DEPTH = 30
# enumeration of every crossing is only allowed on small grids
MAX_ENUMERATION_DEPTH = 11

QUADRANTS = ("NE", "NW", "SE", "SW")
SECTORS = ("E", "N", "W", "S")


class ConfigurationError(ValueError):
    """Raised for parameter values outside the model's domain."""


@dataclass(frozen=True)
class MapParams:
    depth: int
    torus: bool = False

    def __post_init__(self):
        if isinstance(self.depth, bool) or not isinstance(self.depth, (int, np.integer)):
            raise ConfigurationError(f"depth must be an integer, got {self.depth!r}")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ConfigurationError(f"depth must lie in [1, {MAX_DEPTH}], got {self.depth}")


@dataclass(frozen=True, order=True)
class Street:
    orientation: str
    level: int
    index: int

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.level < 0 or not 0 <= self.index < 2 ** self.level:
            raise ValueError(f"no street with level={self.level}, index={self.index}")

    @property
    def fraction(self) -> Fraction:
        return Fraction(2 * self.index + 1, 2 ** (self.level + 1))

    @property
    def coordinate(self) -> float:
        return (2 * self.index + 1) / 2.0 ** (self.level + 1)

    def point(self, abscissa: float) -> "PointOnStreet":
        return PointOnStreet(self, abscissa)


def street_at(orientation: str, coordinate) -> Street:
    """Recover the street lying on ``coordinate`` (a dyadic rational).

    Raises ``ValueError`` if the coordinate is not of the form
    ``odd / 2**(l+1)`` with ``l <= MAX_DEPTH``.
    """
    frac = Fraction(coordinate)
    den = frac.denominator
    if frac <= 0 or frac >= 1 or den < 2 or den & (den - 1):
        raise ValueError(f"{coordinate!r} is not a street coordinate")
    level = den.bit_length() - 2
    if level > MAX_DEPTH:
        raise ValueError(f"{coordinate!r} lies on no street of level <= {MAX_DEPTH}")
    return Street(orientation, level, (frac.numerator - 1) // 2)


@dataclass(frozen=True)
class PointOnStreet:
    street: Street
    abscissa: float

    def __post_init__(self):
        if not 0.0 <= self.abscissa <= 1.0:
            raise ValueError(f"abscissa must lie in [0, 1], got {self.abscissa}")

    @property
    def position(self) -> tuple[float, float]:
        if self.street.orientation == HORIZONTAL:
            return (self.abscissa, self.street.coordinate)
        return (self.street.coordinate, self.abscissa)


@dataclass(frozen=True, order=True)
class Intersection:
    horizontal: Street
    vertical: Street

    @property
    def x(self) -> float:
        return self.vertical.coordinate

    @property
    def y(self) -> float:
        return self.horizontal.coordinate

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def tag(self) -> tuple[int, int]:
        """``(h, v)``: level of the horizontal street, level of the vertical one."""
        return (self.horizontal.level, self.vertical.level)

    def on(self, orientation: str) -> PointOnStreet:
        """The crossing seen as a point of its street with the given orientation."""
        if orientation == HORIZONTAL:
            return PointOnStreet(self.horizontal, self.x)
        return PointOnStreet(self.vertical, self.y)


@dataclass(frozen=True)
class LegPath:
    kind: str
    length: float
    corner: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in ("one-leg", "two-leg"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.length < 0:
            raise ValueError("path length must be non-negative")
        if (self.kind == "one-leg") != (self.corner is None):
            raise ValueError("only two-leg paths carry a corner")


@dataclass(frozen=True)
class StreetGrid:
    """The truncated street support: every street of level ``0..depth``.

    Streets and crossings are generated on demand; at the deepest levels
    there are far too many crossings to hold in memory.
    """

    params: MapParams

    @property
    def depth(self) -> int:
        return self.params.depth

    @property
    def torus(self) -> bool:
        return self.params.torus

    @property
    def n_streets(self) -> int:
        return 2 * (2 ** (self.depth + 1) - 1)

    @property
    def n_intersections(self) -> int:
        return (2 ** (self.depth + 1) - 1) ** 2

    def streets(self, level: Optional[int] = None) -> Iterator[Street]:
        levels = range(self.depth + 1) if level is None else [level]
        for lvl in levels:
            for orientation in ORIENTATIONS:
                for k in range(2 ** lvl):
                    yield Street(orientation, lvl, k)

    def contains(self, street: Street) -> bool:
        return street.level <= self.depth

    def intersections(self) -> Iterator[Intersection]:
        if self.depth > MAX_ENUMERATION_DEPTH:
            raise ValueError(f"refusing to enumerate {self.n_intersections} crossings")
        horizontals = [s for s in self.streets() if s.orientation == HORIZONTAL]
        verticals = [s for s in self.streets() if s.orientation == VERTICAL]
        for h, v in itertools.product(horizontals, verticals):
            yield Intersection(h, v)

    def intersection_arrays(self) -> dict[str, np.ndarray]:
        """All crossings as arrays ``x, y, h, v`` (levels of the two streets)."""
        if self.depth > MAX_ENUMERATION_DEPTH:
            raise ValueError(f"refusing to enumerate {self.n_intersections} crossings")
        coords, levels = street_coordinates(self.depth)
        x, y = np.meshgrid(coords, coords, indexing="xy")
        v, h = np.meshgrid(levels, levels, indexing="xy")
        return {"x": x.ravel(), "y": y.ravel(), "h": h.ravel(), "v": v.ravel()}


def street_coordinates(depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted coordinates of all lines of levels ``0..depth`` and their levels."""
    scale = 2 ** (depth + 1)
    ticks = np.arange(1, scale, dtype=np.int64)
    trailing = np.zeros_like(ticks)
    t = ticks.copy()
    while np.any(t % 2 == 0):
        even = t % 2 == 0
        trailing[even] += 1
        t[even] //= 2
    return ticks / scale, depth - trailing


def build_grid(params: MapParams) -> StreetGrid:
    if not isinstance(params, MapParams):
        params = MapParams(**params)
    return StreetGrid(params)


def wrap_offset(delta):
    """Signed offset on the unit circle, in ``(-1/2, 1/2]``."""
    return delta - np.ceil(np.asarray(delta) - 0.5)


def axis_distance(a, b, torus: bool = False):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    if torus:
        d = np.minimum(d, 1.0 - d)
    return d


def l1_distance(p, q, torus: bool = False):
    """Manhattan (L1) distance between arrays of ``(x, y)`` positions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return axis_distance(p[..., 0], q[..., 0], torus) + axis_distance(p[..., 1], q[..., 1], torus)


def one_leg_distance(a: PointOnStreet, b: PointOnStreet, torus: bool = False) -> Optional[float]:
    if a.street != b.street:
        return None
    return float(axis_distance(a.abscissa, b.abscissa, torus))


def two_leg_distance(a: PointOnStreet, b: PointOnStreet, torus: bool = False) -> Optional[LegPath]:
    if a.street.orientation == b.street.orientation:
        return None
    if a.street.orientation == HORIZONTAL:
        corner = (b.street.coordinate, a.street.coordinate)
    else:
        corner = (a.street.coordinate, b.street.coordinate)
    # each leg runs along one street, from the point to the crossing
    first = axis_distance(a.abscissa, b.street.coordinate, torus)
    second = axis_distance(b.abscissa, a.street.coordinate, torus)
    return LegPath("two-leg", float(first + second), corner)


PointLike = Union[PointOnStreet, Intersection]


def _representations(obj: PointLike) -> list[PointOnStreet]:
    if isinstance(obj, Intersection):
        return [obj.on(HORIZONTAL), obj.on(VERTICAL)]
    return [obj]


def manhattan_distance(a: PointLike, b: PointLike, torus: bool = False) -> Optional[float]:
    """Shortest one- or two-leg path length; ``None`` when both are undefined.

    A crossing lies on two streets, so every pairing of its two readings
    is tried.
    """
    best = None
    for pa, pb in itertools.product(_representations(a), _representations(b)):
        one = one_leg_distance(pa, pb, torus)
        two = two_leg_distance(pa, pb, torus)
        for d in (one, None if two is None else two.length):
            if d is not None and (best is None or d < best):
                best = d
    return best


def _xy(obj) -> tuple[float, float]:
    if isinstance(obj, (Intersection, PointOnStreet)):
        return obj.position
    x, y = obj
    return float(x), float(y)


def _offset(center, other, torus: bool) -> tuple[float, float]:
    cx, cy = _xy(center)
    ox, oy = _xy(other)
    dx, dy = ox - cx, oy - cy
    if torus:
        dx, dy = float(wrap_offset(dx)), float(wrap_offset(dy))
    if dx == 0 and dy == 0:
        raise ValueError("quadrant of a point relative to itself is undefined")
    return dx, dy


def quadrant_of(center, other, torus: bool = False) -> str:
    """Axis-aligned quadrant of ``other`` around ``center``.

    On-axis points: ``dx == 0`` counts as east, ``dy == 0`` as north.
    """
    dx, dy = _offset(center, other, torus)
    return ("N" if dy >= 0 else "S") + ("E" if dx >= 0 else "W")


def sector_of(center, other, torus: bool = False) -> str:
    """Diagonal sector (E, N, W, S) of ``other`` around ``center``.

    The sectors are the quadrants of the rotated frame ``u = dx + dy``,
    ``w = dx - dy``, in which the Manhattan ball is an axis-aligned square.
    Two points of the same sector within Manhattan distance ``R`` of the
    center are within ``R`` of each other. Ties ``u == 0`` and ``w == 0``
    go to the non-negative side.
    """
    dx, dy = _offset(center, other, torus)
    return _sector_label(dx + dy >= 0, dx - dy >= 0)


def _sector_label(u_pos: bool, w_pos: bool) -> str:
    if u_pos:
        return "E" if w_pos else "N"
    return "S" if w_pos else "W"


def sector_codes(dx, dy) -> np.ndarray:
    """Vectorised sector index: 0=E, 1=N, 2=W, 3=S (same tie rule as ``sector_of``)."""
    u_pos = (np.asarray(dx) + np.asarray(dy)) >= 0
    w_pos = (np.asarray(dx) - np.asarray(dy)) >= 0
    return np.where(u_pos, np.where(w_pos, 0, 1), np.where(w_pos, 3, 2))


def quadrant_codes(dx, dy) -> np.ndarray:
    """Vectorised quadrant index: 0=NE, 1=NW, 2=SE, 3=SW."""
    east = np.asarray(dx) >= 0
    north = np.asarray(dy) >= 0
    return np.where(north, np.where(east, 0, 1), np.where(east, 2, 3))


def ceil_ratio(d, r):
    """``ceil(d / r)`` guarded against round-off when ``d / r`` is an integer."""
    ratio = np.asarray(d, dtype=float) / r
    return np.ceil(ratio * (1.0 - 1e-12)).astype(np.int64)


def level_of_coordinate(coordinate: float) -> int:
    return street_at(HORIZONTAL, coordinate).level


__all__ = [
    "HORIZONTAL", "VERTICAL", "QUADRANTS", "SECTORS", "ConfigurationError",
    "MapParams", "Street", "PointOnStreet", "Intersection", "LegPath", "StreetGrid",
    "build_grid", "street_at", "street_coordinates", "wrap_offset", "axis_distance",
    "l1_distance", "one_leg_distance", "two_leg_distance", "manhattan_distance",
    "quadrant_of", "sector_of", "sector_codes", "quadrant_codes", "ceil_ratio",
    "level_of_coordinate",
]
