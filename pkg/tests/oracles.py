"""Independent reference implementations used by the tests.

Everything here is written from the model definitions with exact
rational arithmetic and explicit enumeration, sharing no code with the
package beyond its plain data types.
"""

import math
from fractions import Fraction

import mpmath

from hyperdrones.geometry import HORIZONTAL, VERTICAL, PointOnStreet, Street


def wrap(d, torus):
    d = abs(d)
    return min(d, 1 - d) if torus else d


def brute_force_drones(node, gnbs, R, torus=False, k_cap=64):
    """Minimal drone count by enumeration over every gNB, path kind and ``k``.

    ``node`` is ``(orientation, street_coordinate, abscissa)`` and each gNB
    an ``(x, y)`` pair, all as ``Fraction``. A chain of ``k`` drones along
    one street bridges a length up to ``(k+1) R``; a chain that turns at a
    crossing spends one of its ``k`` drones on the corner and bridges up
    to ``k R``. Returns ``(k, gnb, kind, length)`` minimising
    ``(k, length, gnb)``, or ``None`` when no gNB exists.
    """
    orientation, c, a = node
    options = []
    for gx, gy in gnbs:
        g_streets = {HORIZONTAL: gy, VERTICAL: gx}
        # one leg: the gNB crossing lies on the node's own street
        if g_streets[orientation] == c:
            along = gx if orientation == HORIZONTAL else gy
            options.append(("one-leg", wrap(along - a, torus), (gx, gy)))
        # two legs: walk the node's street to the corner where it meets the
        # gNB's perpendicular street, then walk that street to the gNB
        perpendicular = VERTICAL if orientation == HORIZONTAL else HORIZONTAL
        p_coord = g_streets[perpendicular]
        corner_along = p_coord
        g_along = gy if perpendicular == VERTICAL else gx
        length = wrap(corner_along - a, torus) + wrap(g_along - c, torus)
        options.append(("two-leg", length, (gx, gy)))
    if not options:
        return None
    best = None
    for kind, length, g in options:
        for k in range(k_cap + 1):
            reach = (k + 1) * R if kind == "one-leg" else k * R
            if length <= reach:
                key = (k, length, g)
                if best is None or key < best[0]:
                    best = (key, kind)
                break
    (k, length, g), kind = best
    return k, g, kind, length


def toy_instance(rng, depth=2, max_gnbs=5, max_nodes=10):
    """Random hand-placement style instance on a small grid (exact coordinates)."""
    scale = 2 ** (depth + 1)
    ticks = list(range(1, scale))
    n_g = int(rng.integers(1, max_gnbs + 1))
    cells = set()
    while len(cells) < n_g:
        cells.add((int(rng.choice(ticks)), int(rng.choice(ticks))))
    gnbs = sorted((Fraction(x, scale), Fraction(y, scale)) for x, y in cells)
    nodes = []
    for _ in range(int(rng.integers(1, max_nodes + 1))):
        orientation = HORIZONTAL if rng.random() < 0.5 else VERTICAL
        c = Fraction(int(rng.choice(ticks)), scale)
        if rng.random() < 0.3:
            a = Fraction(int(rng.integers(0, scale + 1)), scale)   # at a crossing or the border
        else:
            a = Fraction(int(rng.integers(0, 1001)), 1000)
        nodes.append((orientation, c, a))
    R = Fraction(int(rng.integers(1, 9)), 16) if rng.random() < 0.5 else Fraction(int(rng.integers(3, 60)), 100)
    torus = bool(rng.random() < 0.5)
    return gnbs, nodes, R, torus


def as_point(node):
    orientation, c, a = node
    den = c.denominator
    street = Street(orientation, den.bit_length() - 2, (c.numerator - 1) // 2)
    return PointOnStreet(street, float(a))


def level_sum_mp(y, p, p_prime, dps=40, terms=3000):
    """``sum_H p q**H exp(-p' (q'/2)**H y)`` in arbitrary precision.

    Summed term by term: at large ``y`` the first terms are vanishingly
    small, which defeats convergence heuristics of adaptive summation.
    """
    with mpmath.workdps(dps):
        p, pp, y = mpmath.mpf(p), mpmath.mpf(p_prime), mpmath.mpf(y)
        q, qq = 1 - p, 1 - pp
        return mpmath.fsum(p * q ** H * mpmath.exp(-pp * (qq / 2) ** H * y) for H in range(terms))


def isolated_prob_level_mp(H, n, theta, p_prime, dps=40):
    with mpmath.workdps(dps):
        Vn = 0
        while 2 ** Vn < mpmath.sqrt(n):
            Vn += 1
        pp = mpmath.mpf(p_prime)
        rho = mpmath.mpf(n) ** theta
        return mpmath.exp(-rho * pp * ((1 - pp) / 2) ** (Vn + H))


def drone_factor_direct(n, theta, p_prime, d_F, d_r, terms):
    beta = p_prime * (1 - p_prime) * n ** (theta - d_r / 2)
    return 1 + math.fsum((k + 1) ** (2 - d_F) * math.exp(-beta * k ** d_r) for k in range(1, terms + 1))
