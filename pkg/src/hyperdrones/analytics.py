"""Closed-form bounds and asymptotics for isolation and drone counts.

Every series is truncated adaptively and returned together with an upper
bound on the discarded tail.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .geometry import ConfigurationError
from .processes import fractal_dim_gnb, fractal_dim_mobiles, p_prime_from_dim, q_from_dim

TAIL_TOLERANCE = 1e-12
MAX_TERMS = 10_000_000


class RegimeWarning(UserWarning):
    """The requested bound is evaluated outside the regime where it is meaningful."""


@dataclass(frozen=True)
class BoundParams:
    theta: float
    p: float
    p_prime: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0 or not 0.0 <= self.p_prime <= 1.0:
            raise ConfigurationError("p and p_prime must lie in [0, 1]")

    @classmethod
    def from_dimensions(cls, d_F: float, d_r: float, theta: float) -> "BoundParams":
        return cls(theta=theta, p=1.0 - q_from_dim(d_F), p_prime=p_prime_from_dim(d_r))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def q_prime(self) -> float:
        return 1.0 - self.p_prime

    @property
    def d_F(self) -> float:
        return fractal_dim_mobiles(self.q)

    @property
    def d_r(self) -> float:
        return fractal_dim_gnb(self.p_prime)

    @property
    def delta(self) -> float:
        return (self.d_F - 2.0) / (self.d_r / 2.0)

    def rho(self, n: float) -> float:
        return float(n) ** self.theta


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail: float
    terms: int
    warning: Optional[str] = None

    def __float__(self) -> float:
        return self.value


def level_threshold(n: float) -> int:
    """Smallest integer ``V`` with ``2**V >= sqrt(n)``."""
    V = 0
    while 4 ** V < n:
        V += 1
    return V


def isolated_prob_level(H: int, n: float, params: BoundParams) -> float:
    """Upper bound on the probability that a node on a level-``H`` street is uncovered."""
    if H < 0:
        raise ValueError("H must be non-negative")
    Vn = level_threshold(n)
    return math.exp(-params.rho(n) * params.p_prime * (params.q_prime / 2.0) ** (Vn + H))


def _geometric_terms(q: float) -> int:
    """Number of terms ``H = 0..H_max`` so that ``q**(H_max+1) < TAIL_TOLERANCE``."""
    if q <= 0.0:
        return 1
    if q >= 1.0:
        raise ConfigurationError("q = 1 leaves no geometric decay to truncate")
    return max(1, math.ceil(math.log(TAIL_TOLERANCE) / math.log(q)))


def _level_sum(y: float, params: BoundParams) -> SeriesValue:
    p, q = params.p, params.q
    if p == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    terms = _geometric_terms(q)
    while True:
        H = np.arange(terms, dtype=float)
        vals = p * q ** H * np.exp(-params.p_prime * (params.q_prime / 2.0) ** H * y)
        total = math.fsum(vals)
        # each discarded term is at most p q**H, so the tail is at most q**terms
        tail = q ** terms if q > 0 else 0.0
        # at large y the sum itself is tiny: keep the tail small relative to it
        if tail <= TAIL_TOLERANCE * max(total, 1e-300) or terms > 20_000:
            return SeriesValue(float(total), tail, terms)
        if total == 0.0:
            # every included term underflowed: the mass sits at deeper levels
            terms *= 2
            continue
        terms = max(terms + 1, math.ceil(math.log(TAIL_TOLERANCE * total) / math.log(q)))


def isolated_fraction_bound_sum(n: float, params: BoundParams) -> SeriesValue:
    """Level-weighted sum bounding the fraction of uncovered nodes."""
    crit = params.d_r / 4.0
    y = float(n) ** (params.theta - crit)
    res = _level_sum(y, params)
    if params.theta <= crit:
        msg = f"theta={params.theta} <= d_r/4={crit}: the bound does not vanish"
        warnings.warn(msg, RegimeWarning, stacklevel=2)
        res = SeriesValue(res.value, res.tail, res.terms, msg)
    return res


def mellin_leading_term(y: float, params: BoundParams) -> float:
    """Residue of the main pole: ``p p'**-delta Gamma(delta) / log(2/q') * y**-delta``."""
    delta = params.delta
    if delta <= 0:
        raise ConfigurationError(f"d_F={params.d_F} <= 2 gives delta <= 0")
    return (params.p * params.p_prime ** (-delta) * math.gamma(delta)
            / math.log(2.0 / params.q_prime) * y ** (-delta))


def isolated_fraction_asymptotic(n: float, params: BoundParams) -> float:
    if params.theta <= params.d_r / 4.0:
        raise ConfigurationError("asymptotic needs theta > d_r/4")
    return mellin_leading_term(float(n) ** (params.theta - params.d_r / 4.0), params)


def isolation_exponent(params: BoundParams) -> float:
    """Power of ``n`` in the isolated fraction, as ``-delta * (theta - d_r/4)``."""
    return -params.delta * (params.theta - params.d_r / 4.0)


def isolation_exponent_closed(d_F: float, d_r: float, theta: float) -> float:
    """Same power written as ``-(d_F-2)/d_r * (2 theta - d_r/2)``."""
    return -(d_F - 2.0) / d_r * (2.0 * theta - d_r / 2.0)


def _oscillation_poles(params: BoundParams, k_max: int) -> np.ndarray:
    L = math.log(2.0 / params.q_prime)
    k = np.concatenate([np.arange(-k_max, 0), np.arange(1, k_max + 1)])
    return params.delta + 2j * math.pi * k / L


def oscillation(y: float, params: BoundParams, k_max: int = 20) -> float:
    """Sum of the residues at the secondary poles ``delta + 2 i k pi / log(2/q')``."""
    s = _oscillation_poles(params, k_max)
    L = math.log(2.0 / params.q_prime)
    terms = params.p / L * np.exp(-s * math.log(params.p_prime)) * special.gamma(s) * np.exp(-s * math.log(y))
    return float(np.real(np.sum(terms)))


def oscillation_amplitude(params: BoundParams, k_max: int = 20) -> float:
    """Bound on |oscillation| relative to the leading term; constant in ``y``."""
    s = _oscillation_poles(params, k_max)
    return float(np.sum(np.abs(special.gamma(s))) / math.gamma(params.delta))


@dataclass(frozen=True)
class MellinCheck:
    y: float
    direct_sum: float
    asymptotic: float
    relative_error: float
    oscillation: float
    corrected_error: float
    amplitude: float
    tail: float


def mellin_f(y: float, params: BoundParams) -> MellinCheck:
    """Compare the level sum ``f(y)`` with its Mellin asymptotic.

    ``relative_error`` uses the leading term only. The secondary poles
    add a log-periodic fluctuation whose relative size is at most
    ``amplitude``; ``corrected_error`` is the error left once that
    fluctuation is added back.
    """
    if not y > 0:
        raise ValueError("y must be positive")
    direct = _level_sum(y, params)
    asym = mellin_leading_term(y, params)
    osc = oscillation(y, params)
    return MellinCheck(
        y=y,
        direct_sum=direct.value,
        asymptotic=asym,
        relative_error=abs(direct.value - asym) / direct.value,
        oscillation=osc,
        corrected_error=abs(direct.value - asym - osc) / direct.value,
        amplitude=oscillation_amplitude(params),
        tail=direct.tail,
    )


def two_leg_isolation_bound(R: float, rho: float, params: BoundParams) -> float:
    """Bound on the probability of no gNB within two-leg distance ``R``."""
    if R < 0:
        raise ValueError("R must be non-negative")
    d_r = params.d_r
    return math.exp(-rho * params.p_prime * params.q_prime * R ** d_r / (1.0 + d_r / 2.0))


def interval_isolation_bound(H: int, R: float, rho: float, params: BoundParams) -> float:
    """Bound on the probability that a length-``R`` stretch of a level-``H`` street has no gNB."""
    if H < 0 or not R > 0:
        raise ValueError("need H >= 0 and R > 0")
    return math.exp(-rho * params.p_prime * (params.q_prime / 2.0) ** H * R ** (params.d_r / 2.0))


def drone_series_factor(n: float, params: BoundParams, k_max: Optional[int] = None) -> SeriesValue:
    """``1 + sum_k (k+1)**(2-d_F) exp(-p' q' n**(theta - d_r/2) k**d_r)``.

    With ``k_max=None`` terms are added until the integral tail bound
    drops below ``TAIL_TOLERANCE``.
    """
    d_F, d_r = params.d_F, params.d_r
    beta = params.p_prime * params.q_prime * float(n) ** (params.theta - d_r / 2.0)
    if beta <= 0.0:
        if d_F <= 3.0:
            raise ConfigurationError("series diverges: no exponential damping and d_F <= 3")
        # pure zeta-like tail, sum_{k>K} (k+1)**(2-d_F) <= (K+1)**(3-d_F)/(d_F-3)

    def tail_after(K: int) -> float:
        power = (K + 2.0) ** (2.0 - d_F)
        if beta <= 0.0:
            return (K + 1.0) ** (3.0 - d_F) / (d_F - 3.0)
        # sum_{k>K} exp(-beta k**d_r) <= int_K^inf exp(-beta x**d_r) dx
        a = 1.0 / d_r
        integral = special.gammaincc(a, beta * K ** d_r) * special.gamma(a) / (d_r * beta ** a)
        return power * integral

    if k_max is None:
        K = 16
        while tail_after(K) >= TAIL_TOLERANCE and K < MAX_TERMS:
            K *= 2
    else:
        K = int(k_max)
    k = np.arange(1, K + 1, dtype=float)
    terms = (k + 1.0) ** (2.0 - d_F) * np.exp(-beta * k ** d_r)
    tail = tail_after(K)
    msg = None
    if tail >= 1e-3:
        msg = f"series truncated at k={K} with tail bound {tail:.3g}; power-law regime"
    return SeriesValue(1.0 + float(math.fsum(terms)), float(tail), K, msg)


def drones_total_bound(n: float, params: BoundParams, k_max: Optional[int] = None) -> SeriesValue:
    """Average drone count ``n I_n`` times the drone series factor."""
    iso = isolated_fraction_bound_sum(n, params)
    factor = drone_series_factor(n, params, k_max)
    value = n * iso.value * factor.value
    tail = n * (iso.tail * factor.value + (iso.value + iso.tail) * factor.tail)
    return SeriesValue(value, tail, factor.terms, iso.warning or factor.warning)
