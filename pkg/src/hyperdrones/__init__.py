"""Hyperfractal street maps, canyon coverage, drone dimensioning and garage selection."""

from .geometry import (
    HORIZONTAL, VERTICAL, MapParams, Street, PointOnStreet, Intersection, LegPath, StreetGrid, ConfigurationError,
    build_grid, one_leg_distance, two_leg_distance, manhattan_distance, quadrant_of, sector_of,
)
from .processes import (
    MobileParams, GnbParams, MobileSample, GnbSet, mobile_intensity, gnb_intensity,
    fractal_dim_mobiles, fractal_dim_gnb, q_from_dim, p_prime_from_dim,
    sample_mobiles, sample_gnbs, count_level_intersections,
)
from .coverage import (
    RadioParams, NodeCoverage, CoverageReport, UNREACHABLE,
    radio_range, is_covered, drones_needed, coverage_report,
)


from .analytics import (
    BoundParams, RegimeWarning, isolated_fraction_bound_sum, isolated_fraction_asymptotic,
    isolation_exponent, drone_series_factor, drones_total_bound, mellin_f,
)
from .garages import EliminationConfig, GarageSet, eliminate_garages, verify_covering_transfer, garage_count_curve
from .experiments import ExperimentConfig, RunResult, run, write_outputs, derive_seed

__version__ = "0.1.0"
