"""Hyperfractal point processes on the street grid.

Mobile nodes live on streets: a node lands on a level-``l`` street with
probability ``p q**l`` and is then uniform over that level's streets and
along the street. Base stations (gNBs) live on crossings: each crossing
of a level-``h`` horizontal and a level-``v`` vertical street is occupied
independently with probability ``1 - exp(-mean(h, v))``.

Both processes are truncated at the grid depth ``U``; the mass of deeper
levels is folded into level ``U`` and reported, never dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .geometry import (
    HORIZONTAL,
    VERTICAL,
    ConfigurationError,
    Intersection,
    PointOnStreet,
    Street,
    StreetGrid,
)

LOG2 = math.log(2.0)


def _check_probability(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class MobileParams:
    n: float
    p: float
    depth: int
    poisson: bool = False

    def __post_init__(self):
        _check_probability("p", self.p)
        if not self.n > 0:
            raise ConfigurationError(f"n must be positive, got {self.n}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def d_F(self) -> float:
        return fractal_dim_mobiles(self.q)


@dataclass(frozen=True)
class GnbParams:
    rho: float
    p_prime: float
    depth: int
    theta: Optional[float] = None

    def __post_init__(self):
        _check_probability("p_prime", self.p_prime)
        if not self.rho > 0:
            raise ConfigurationError(f"rho must be positive, got {self.rho}")

    @classmethod
    def from_theta(cls, n: float, theta: float, p_prime: float, depth: int) -> "GnbParams":
        return cls(rho=float(n) ** theta, p_prime=p_prime, depth=depth, theta=theta)

    @property
    def q_prime(self) -> float:
        return 1.0 - self.p_prime

    @property
    def d_r(self) -> float:
        return fractal_dim_gnb(self.p_prime)


# -- intensities and dimensions ---------------------------------------------


def mobile_intensity(level: int, params: MobileParams) -> float:
    """Mean number of mobiles per unit length on a street of the given level."""
    if level < 0:
        raise ValueError("level must be non-negative")
    return params.n * (params.p / 2.0) * (params.q / 2.0) ** level


def gnb_intensity(h: int, v: int, params: GnbParams) -> float:
    """Poisson mean of the auxiliary process on one ``(h, v)`` crossing."""
    if h < 0 or v < 0:
        raise ValueError("levels must be non-negative")
    return params.rho * params.p_prime ** 2 * (params.q_prime / 2.0) ** (h + v)


def fractal_dim_mobiles(q: float) -> float:
    if not 0.0 < q <= 1.0:
        if q == 0.0:
            raise ConfigurationError("q = 0 gives an infinite fractal dimension")
        raise ConfigurationError(f"q must lie in (0, 1], got {q}")
    return math.log(4.0 / q) / LOG2


def fractal_dim_gnb(p_prime: float) -> float:
    if not 0.0 <= p_prime < 1.0:
        if p_prime == 1.0:
            raise ConfigurationError("p' = 1 gives an infinite fractal dimension")
        raise ConfigurationError(f"p' must lie in [0, 1), got {p_prime}")
    return 2.0 * math.log(2.0 / (1.0 - p_prime)) / LOG2


def q_from_dim(d_F: float) -> float:
    if d_F < 2:
        raise ConfigurationError(f"d_F must be >= 2, got {d_F}")
    return 4.0 * 2.0 ** (-d_F)


def p_prime_from_dim(d_r: float) -> float:
    if d_r < 2:
        raise ConfigurationError(f"d_r must be >= 2, got {d_r}")
    return 1.0 - 2.0 * 2.0 ** (-d_r / 2.0)


def level_probabilities(p: float, depth: int) -> np.ndarray:
    """``p q**l`` for ``l < depth``; the whole remaining tail ``q**depth`` sits at ``depth``."""
    q = 1.0 - p
    probs = p * q ** np.arange(depth + 1, dtype=float)
    probs[depth] = q ** depth
    return probs


# -- samples -----------------------------------------------------------------


@dataclass(frozen=True)
class MobileSample:
    """Mobile nodes as parallel arrays.

    ``orientation`` is 0 for horizontal streets and 1 for vertical ones;
    ``index`` is the street index within its level.
    """

    orientation: np.ndarray
    level: np.ndarray
    index: np.ndarray
    abscissa: np.ndarray
    depth: int
    seed: Optional[int] = None
    truncated_mass: float = 0.0

    def __len__(self) -> int:
        return len(self.abscissa)

    @property
    def n(self) -> int:
        return len(self.abscissa)

    @property
    def coordinate(self) -> np.ndarray:
        return (2 * self.index + 1) / 2.0 ** (self.level + 1)

    @property
    def ticks(self) -> np.ndarray:
        """Street coordinate as an integer numerator over ``2**(depth+1)``."""
        return (2 * self.index + 1) << (self.depth - self.level)

    @property
    def positions(self) -> np.ndarray:
        c = self.coordinate
        horizontal = self.orientation == 0
        x = np.where(horizontal, self.abscissa, c)
        y = np.where(horizontal, c, self.abscissa)
        return np.column_stack([x, y])

    @property
    def points(self) -> list[PointOnStreet]:
        out = []
        for o, l, k, a in zip(self.orientation, self.level, self.index, self.abscissa):
            street = Street(VERTICAL if o else HORIZONTAL, int(l), int(k))
            out.append(PointOnStreet(street, float(a)))
        return out

    @classmethod
    def from_points(cls, points, depth: int, seed=None) -> "MobileSample":
        points = list(points)
        return cls(
            orientation=np.array([p.street.orientation == VERTICAL for p in points], dtype=np.int8),
            level=np.array([p.street.level for p in points], dtype=np.int64),
            index=np.array([p.street.index for p in points], dtype=np.int64),
            abscissa=np.array([p.abscissa for p in points], dtype=float),
            depth=depth,
            seed=seed,
        )


@dataclass(frozen=True)
class GnbSet:
    """Occupied crossings, sorted by ``(x, y)``; at most one gNB per crossing.

    Positions are integer numerators over ``2**(depth+1)``.
    """

    x_tick: np.ndarray
    y_tick: np.ndarray
    depth: int
    seed: Optional[int] = None
    truncated_mass: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        order = np.lexsort((self.y_tick, self.x_tick))
        x = np.asarray(self.x_tick, dtype=np.int64)[order]
        y = np.asarray(self.y_tick, dtype=np.int64)[order]
        if len(x) > 1 and np.any((np.diff(x) == 0) & (np.diff(y) == 0)):
            raise ValueError("a crossing can hold at most one gNB")
        scale = 2 ** (self.depth + 1)
        if len(x) and (x.min() < 1 or y.min() < 1 or x.max() >= scale or y.max() >= scale):
            raise ValueError("gNB outside the grid")
        object.__setattr__(self, "x_tick", x)
        object.__setattr__(self, "y_tick", y)

    def __len__(self) -> int:
        return len(self.x_tick)

    @property
    def scale(self) -> int:
        return 2 ** (self.depth + 1)

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.x_tick / self.scale, self.y_tick / self.scale]).reshape(-1, 2)

    @property
    def h(self) -> np.ndarray:
        return self.depth - _trailing_zeros(self.y_tick)

    @property
    def v(self) -> np.ndarray:
        return self.depth - _trailing_zeros(self.x_tick)

    @property
    def intersections(self) -> list[Intersection]:
        out = []
        for xt, yt in zip(self.x_tick, self.y_tick):
            out.append(_crossing_from_ticks(int(xt), int(yt), self.depth))
        return out

    def subset(self, mask) -> "GnbSet":
        mask = np.asarray(mask)
        return GnbSet(self.x_tick[mask], self.y_tick[mask], self.depth, self.seed, self.truncated_mass)

    @classmethod
    def from_intersections(cls, crossings, depth: int, seed=None) -> "GnbSet":
        scale = 2 ** (depth + 1)
        xs, ys = [], []
        for c in crossings:
            if max(c.tag) > depth:
                raise ValueError(f"crossing {c.tag} deeper than the grid")
            xs.append(int(c.vertical.fraction * scale))
            ys.append(int(c.horizontal.fraction * scale))
        return cls(np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64), depth, seed)

    @classmethod
    def from_positions(cls, positions, depth: int, seed=None) -> "GnbSet":
        scale = 2 ** (depth + 1)
        xs, ys = [], []
        for x, y in positions:
            fx, fy = Fraction(x) * scale, Fraction(y) * scale
            if fx.denominator != 1 or fy.denominator != 1:
                raise ValueError(f"({x}, {y}) is not a crossing of a depth-{depth} grid")
            xs.append(int(fx))
            ys.append(int(fy))
        return cls(np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64), depth, seed)


def _trailing_zeros(ticks: np.ndarray) -> np.ndarray:
    t = np.asarray(ticks, dtype=np.int64)
    # lowest set bit, then its exponent
    low = t & -t
    return np.round(np.log2(np.maximum(low, 1))).astype(np.int64)


def _crossing_from_ticks(xt: int, yt: int, depth: int) -> Intersection:
    scale = 2 ** (depth + 1)
    fx, fy = Fraction(xt, scale), Fraction(yt, scale)
    h = fy.denominator.bit_length() - 2
    v = fx.denominator.bit_length() - 2
    return Intersection(
        Street(HORIZONTAL, h, (fy.numerator - 1) // 2),
        Street(VERTICAL, v, (fx.numerator - 1) // 2),
    )


def _check_depth(params_depth: int, grid: StreetGrid) -> None:
    if params_depth != grid.depth:
        raise ConfigurationError(f"params depth {params_depth} differs from grid depth {grid.depth}")


def sample_mobiles(params: MobileParams, grid: StreetGrid, seed) -> MobileSample:
    """Place mobiles by the recursive quadrant descent.

    Stopping at depth ``l`` inside a uniformly chosen sub-square and then
    picking one of its two central half-lines uniformly is the same law as
    drawing the level, a uniform street of that level and a uniform
    abscissa; the latter is what is sampled here. At depth ``U`` the
    descent is forced to stop.
    """
    _check_depth(params.depth, grid)
    rng = np.random.default_rng(seed)
    size = int(rng.poisson(params.n)) if params.poisson else int(round(params.n))
    U = params.depth
    level = rng.choice(U + 1, size=size, p=level_probabilities(params.p, U)).astype(np.int64)
    orientation = rng.integers(0, 2, size=size).astype(np.int8)
    index = rng.integers(0, np.left_shift(1, level)).astype(np.int64) if size else np.zeros(0, np.int64)
    abscissa = rng.random(size)
    return MobileSample(
        orientation=orientation,
        level=level,
        index=index,
        abscissa=abscissa,
        depth=U,
        seed=seed,
        truncated_mass=params.q ** (U + 1),
    )


def gnb_crossing_means(params: GnbParams) -> np.ndarray:
    """Per-crossing Poisson mean for every ``(h, v)`` class, tails folded into level ``U``.

    Entry ``[h, v]`` is the mean on ONE crossing of that class; there are
    ``2**(h+v)`` such crossings.
    """
    U = params.depth
    w = level_probabilities(params.p_prime, U)
    mass = params.rho * np.outer(w, w)
    counts = np.exp2(np.add.outer(np.arange(U + 1), np.arange(U + 1)))
    return mass / counts


def gnb_tail_mass(p_prime: float, depth: int) -> float:
    """Fraction of the auxiliary process that sits beyond level ``depth`` on either axis."""
    tail = (1.0 - p_prime) ** (depth + 1)
    return 1.0 - (1.0 - tail) ** 2


def expected_gnb_count(params: GnbParams) -> float:
    means = gnb_crossing_means(params)
    U = params.depth
    counts = np.exp2(np.add.outer(np.arange(U + 1), np.arange(U + 1)))
    return float(np.sum(counts * -np.expm1(-means)))


def _distinct_cells(rng: np.random.Generator, population: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    if population <= 1 << 20 or 2 * k > population:
        return rng.choice(population, size=k, replace=False).astype(np.int64)
    cells = np.unique(rng.integers(0, population, size=k, dtype=np.int64))
    while len(cells) < k:
        extra = rng.integers(0, population, size=k - len(cells), dtype=np.int64)
        cells = np.unique(np.concatenate([cells, extra]))
    return rng.permutation(cells)[:k]


def sample_gnbs(params: GnbParams, grid: StreetGrid, seed) -> GnbSet:
    """Independent occupancy of every crossing, sampled class by class.

    Within an ``(h, v)`` class all crossings share one occupancy
    probability, so a binomial count followed by a uniform subset of that
    size has exactly the law of independent per-crossing coin flips.
    """
    _check_depth(params.depth, grid)
    rng = np.random.default_rng(seed)
    U = params.depth
    means = gnb_crossing_means(params)
    xs, ys = [], []
    for h in range(U + 1):
        for v in range(U + 1):
            population = 2 ** (h + v)
            prob = -math.expm1(-means[h, v])
            k = int(rng.binomial(population, prob))
            cells = _distinct_cells(rng, population, k)
            a, b = np.divmod(cells, 2 ** v)
            ys.append((2 * a + 1) << (U - h))
            xs.append((2 * b + 1) << (U - v))
    x = np.concatenate(xs) if xs else np.zeros(0, np.int64)
    y = np.concatenate(ys) if ys else np.zeros(0, np.int64)
    return GnbSet(
        x.astype(np.int64),
        y.astype(np.int64),
        U,
        seed=seed,
        truncated_mass=gnb_tail_mass(params.p_prime, U),
    )


# -- crossing counts -----------------------------------------------------------


def count_level_intersections(x: float, H: int, V: int, reach: float, grid: StreetGrid,
                              torus: bool = False) -> int:
    """Number of level-``V`` crossings of a level-``H`` street within ``reach`` of ``x``.

    Level-``V`` crossings sit at the odd multiples of ``2**-(V+1)``; the
    count is done in exact rational arithmetic, so crossings exactly at
    distance ``reach`` are included.
    """
    if not 0 <= H <= grid.depth:
        raise ValueError(f"no street of level {H} in a depth-{grid.depth} grid")
    if not 0 <= V <= grid.depth:
        raise ValueError(f"no crossing level {V} in a depth-{grid.depth} grid")
    if not reach > 0:
        raise ValueError("reach must be positive")
    scale = 2 ** (V + 1)
    lo = (Fraction(x) - Fraction(reach)) * scale
    hi = (Fraction(x) + Fraction(reach)) * scale
    if torus:
        if 2 * Fraction(reach) >= 1:
            return 2 ** V
    else:
        lo = max(lo, Fraction(1))
        hi = min(hi, Fraction(scale - 1))
    # odd integers j with lo <= j <= hi
    first = math.ceil((lo - 1) / 2)
    last = math.floor((hi - 1) / 2)
    return max(0, last - first + 1)
