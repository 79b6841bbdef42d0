"""Seeded experiment harness producing CSV rows and a JSON summary."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from . import analytics
from .coverage import UNREACHABLE, coverage_report, radio_range
from .garages import (
    EliminationConfig,
    distance_to_closest_garage,
    eliminate_garages,
    garage_count_curve,
    relay_order,
)
from .geometry import MAX_DEPTH, ConfigurationError, MapParams, build_grid
from .processes import (
    GnbParams,
    MobileParams,
    expected_gnb_count,
    fractal_dim_gnb,
    fractal_dim_mobiles,
    gnb_tail_mass,
    p_prime_from_dim,
    q_from_dim,
    sample_gnbs,
    sample_mobiles,
)

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "sample-map", "isolation-sweep", "regime-collapse", "drone-sweep", "hop-histogram",
    "garage-maps", "garage-curve", "garage-distance", "bounds-table", "mellin-check",
)
CSV_HEADER = ("experiment", "params", "rep", "metric", "value", "seed")
MOBILE_TAIL = 1e-3


@dataclass
class ExperimentConfig:
    """Flat experiment configuration; JSON keys are the field names.

    Mobile law: give ``d_F`` or ``q``. gNB law: give ``d_r`` or ``p_prime``.
    gNB density: ``rho`` (fixed), else ``theta`` (rho = n**theta), else
    ``theta_scale`` (theta = theta_scale * d_r / 4).
    """

    experiment: str
    n_values: list = field(default_factory=lambda: [5000])
    d_F: Optional[float] = None
    q: Optional[float] = None
    d_r: Optional[float] = None
    p_prime: Optional[float] = None
    d_r_values: Optional[list] = None
    theta: Optional[float] = None
    theta_scale: Optional[float] = None
    rho: Optional[float] = None
    c: float = math.sqrt(10.0)
    depth: Optional[int] = None
    replications: int = 50
    seed: int = 0
    torus: bool = False
    radii: list = field(default_factory=lambda: [5, 10, 20, 40, 80])
    order: str = "by-index"
    test_points: int = 10_000
    poisson: bool = False
    y_values: list = field(default_factory=lambda: [1e2, 1e4, 1e6, 1e8])
    out: str = "results"
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"experiment: unknown value {self.experiment!r}")
        if self.d_F is not None and self.q is not None:
            raise ConfigurationError("d_F: give either d_F or q, not both")
        if self.d_r is not None and self.p_prime is not None:
            raise ConfigurationError("d_r: give either d_r or p_prime, not both")
        if self.d_F is None and self.q is None:
            self.d_F = 3.0
        if self.d_r is None and self.p_prime is None and self.d_r_values is None:
            self.p_prime = 0.1
        if self.theta is None and self.rho is None and self.theta_scale is None:
            self.theta_scale = 1.2
        given = [k for k in ("theta", "theta_scale", "rho") if getattr(self, k) is not None]
        if len(given) > 1:
            raise ConfigurationError(f"{given[1]}: give only one of theta, theta_scale, rho")
        try:
            for p in self.mobile_p_values():
                fractal_dim_mobiles(1.0 - p)
            for pp in self.p_prime_values():
                fractal_dim_gnb(pp)
        except ConfigurationError as exc:
            raise ConfigurationError(f"{'d_F' if self.q is None else 'q'}/{'d_r' if self.p_prime is None else 'p_prime'}: {exc}") from None
        if not self.n_values or any(not (isinstance(n, (int, float)) and n >= 1) for n in self.n_values):
            raise ConfigurationError(f"n_values: need a non-empty list of counts >= 1, got {self.n_values}")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigurationError(f"replications: must be an integer >= 1, got {self.replications}")
        if self.depth is not None and not (isinstance(self.depth, int) and 1 <= self.depth <= MAX_DEPTH):
            raise ConfigurationError(f"depth: must be an integer in [1, {MAX_DEPTH}], got {self.depth}")
        if not self.c > 0:
            raise ConfigurationError(f"c: must be positive, got {self.c}")
        if self.rho is not None and not self.rho > 0:
            raise ConfigurationError(f"rho: must be positive, got {self.rho}")
        if any(r < 0 for r in self.radii) or list(self.radii) != sorted(self.radii):
            raise ConfigurationError(f"radii: need ascending non-negative multiples of R_n, got {self.radii}")
        if self.order not in ("by-index", "arbitrary", "by-seed-shuffle"):
            raise ConfigurationError(f"order: unknown value {self.order!r}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"format: must be csv or json, got {self.format!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError(f"seed: must be a non-negative integer, got {self.seed}")
        if self.test_points < 1 or self.workers < 1:
            raise ConfigurationError("test_points/workers: must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in names:
                raise ConfigurationError(f"{key}: unknown configuration key")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str, **overrides) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigurationError("config: expected a flat JSON object")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    # -- resolved parameters

    def mobile_p_values(self) -> list[float]:
        q = self.q if self.q is not None else q_from_dim(self.d_F)
        return [1.0 - q]

    @property
    def p(self) -> float:
        return self.mobile_p_values()[0]

    def p_prime_values(self) -> list[float]:
        if self.d_r_values is not None:
            return [p_prime_from_dim(d) for d in self.d_r_values]
        if self.p_prime is not None:
            return [self.p_prime]
        return [p_prime_from_dim(self.d_r)]

    def theta_for(self, p_prime: float) -> Optional[float]:
        if self.theta is not None:
            return self.theta
        if self.theta_scale is not None:
            return self.theta_scale * fractal_dim_gnb(p_prime) / 4.0
        return None

    def rho_for(self, n: float, p_prime: float) -> float:
        if self.rho is not None:
            return self.rho
        return float(n) ** self.theta_for(p_prime)

    def depth_for(self) -> int:
        """Explicit depth, else the smallest one with mobile tail < 1e-3 and
        deepest crossing pitch well below the smallest radio range."""
        if self.depth is not None:
            return self.depth
        q = 1.0 - self.p
        by_tail = 1 if q == 0 else max(1, math.ceil(math.log(MOBILE_TAIL) / math.log(q)) - 1)
        while q > 0 and q ** (by_tail + 1) >= MOBILE_TAIL:
            by_tail += 1
        R_min = radio_range(max(self.n_values), self.c)
        by_range = math.ceil(math.log2(1.0 / R_min)) + 4
        return int(min(MAX_DEPTH, max(by_tail, by_range)))


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    params: str
    rep: Union[int, str]
    metric: str
    value: float
    seed: Optional[int] = None

    def as_tuple(self):
        return (self.experiment, self.params, self.rep, self.metric, _fmt(self.value),
                "" if self.seed is None else self.seed)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def derive_seed(base_seed: int, replication_index: int, stream_tag: str) -> int:
    """Deterministic 63-bit seed from ``(base, replication, tag)`` via BLAKE2b."""
    msg = f"{int(base_seed)}\x1f{int(replication_index)}\x1f{stream_tag}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "big") >> 1


def _param_string(**kw) -> str:
    parts = []
    for k, v in kw.items():
        parts.append(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}")
    return ";".join(parts)


@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list
    summary: dict

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.as_tuple())
        return buf.getvalue()

    def metric(self, metric: str, params: Optional[str] = None, rep=None) -> list:
        out = []
        for r in self.rows:
            if r.metric == metric and (params is None or r.params == params) and (rep is None or r.rep == rep):
                out.append(r)
        return out

    def per_rep(self, metric: str, params: str) -> np.ndarray:
        return np.array([r.value for r in self.rows
                         if r.metric == metric and r.params == params and isinstance(r.rep, int)])

    def param_sets(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.params not in seen:
                seen.append(r.params)
        return seen


# -- replication tasks (module level so they pickle for process pools) -------


def _sample_pair(cfg_dict: dict, n: int, p_prime: float, rep_seed: int):
    cfg = ExperimentConfig.from_dict(cfg_dict)
    U = cfg.depth_for()
    grid = build_grid(MapParams(U, cfg.torus))
    mobiles = sample_mobiles(MobileParams(n, cfg.p, U, cfg.poisson), grid,
                             derive_seed(rep_seed, 0, "mobiles"))
    gnb_params = GnbParams(cfg.rho_for(n, p_prime), p_prime, U, cfg.theta_for(p_prime))
    gnbs = sample_gnbs(gnb_params, grid, derive_seed(rep_seed, 0, "gnbs"))
    return cfg, grid, mobiles, gnbs


def _coverage_task(args):
    cfg_dict, n, p_prime, rep_seed = args
    cfg, grid, mobiles, gnbs = _sample_pair(cfg_dict, n, p_prime, rep_seed)
    rep = coverage_report(mobiles, gnbs, radio_range(n, cfg.c), cfg.torus)
    nn = max(len(mobiles), 1)
    hist = rep.hop_histogram
    return {
        "mobiles": len(mobiles),
        "gnbs": len(gnbs),
        "isolated_count": rep.isolated_count,
        "isolated_fraction": rep.isolated_count / nn,
        "covered_fraction": 1.0 - rep.isolated_count / nn,
        "total_drones": rep.total_drones,
        "drone_fraction": rep.total_drones / nn,
        "unreachable": rep.unreachable_count,
        "hist": {k: v for k, v in hist.items()},
    }


def _map_task(args):
    cfg_dict, n, p_prime, rep_seed = args
    cfg, grid, mobiles, gnbs = _sample_pair(cfg_dict, n, p_prime, rep_seed)
    levels = np.bincount(mobiles.level, minlength=grid.depth + 1)
    return {
        "mobiles": len(mobiles),
        "gnbs": len(gnbs),
        "level0_fraction": levels[0] / max(len(mobiles), 1),
        "positions": (mobiles.positions.tolist(), gnbs.positions.tolist()),
    }


def _garage_task(args):
    cfg_dict, n, p_prime, rep_seed, kind = args
    cfg, grid, mobiles, gnbs = _sample_pair(cfg_dict, n, p_prime, rep_seed)
    R_n = radio_range(n, cfg.c)
    out = {"relays": len(gnbs)}
    if len(gnbs) == 0:
        return out
    order_seed = derive_seed(rep_seed, 0, "order")
    perm = relay_order(gnbs, cfg.order, order_seed)
    if kind == "curve":
        radii = [0.0] + [float(r) for r in cfg.radii if r > 0]
        out["curve"] = garage_count_curve(gnbs, [r * R_n for r in radii], perm, cfg.torus)
        out["multiples"] = radii
        return out
    out["per_radius"] = {}
    for mult in cfg.radii:
        gs = eliminate_garages(gnbs, EliminationConfig(mult * R_n, perm, cfg.torus), grid)
        entry = {"garages": gs.count}
        if kind == "distance":
            entry["hist"] = distance_to_closest_garage(mobiles, gs, R_n, cfg.torus)
        else:
            entry["positions"] = gs.positions.tolist()
        out["per_radius"][mult] = entry
    if kind == "maps":
        out["relay_positions"] = gnbs.positions.tolist()
    return out


def _parallel_map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# -- runner --------------------------------------------------------------------


class _Sink:
    """Ordered row collector; stochastic rows carry their replication seed."""

    def __init__(self, experiment: str, base_seed: int):
        self.experiment = experiment
        self.base_seed = base_seed
        self.rows: list[ResultRow] = []
        self._reps: dict = {}

    def rep(self, params: str, rep: int, metric: str, value, seed: int) -> None:
        self.rows.append(ResultRow(self.experiment, params, rep, metric, value, seed))
        self._reps.setdefault((params, metric), []).append(float(value))

    def analytic(self, params: str, metric: str, value) -> None:
        self.rows.append(ResultRow(self.experiment, params, "analytic", metric, value, None))

    def aggregate(self, params: str) -> dict:
        agg = {}
        for (p, metric), vals in self._reps.items():
            if p != params:
                continue
            arr = np.asarray(vals)
            mean = float(np.mean(arr))
            std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
            self.rows.append(ResultRow(self.experiment, params, "mean", metric, mean, self.base_seed))
            self.rows.append(ResultRow(self.experiment, params, "stddev", metric, std, self.base_seed))
            agg[metric] = {"mean": mean, "stddev": std, "reps": len(arr)}
        return agg


def _replicate(cfg: ExperimentConfig, params: str, reps: int):
    return [(r, derive_seed(cfg.seed, r, params)) for r in range(reps)]


def run(config: Union[ExperimentConfig, dict]) -> RunResult:
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    handler = _HANDLERS[cfg.experiment]
    sink = _Sink(cfg.experiment, cfg.seed)
    summary: dict[str, Any] = {
        "experiment": cfg.experiment,
        "config": cfg.to_dict(),
        "depth": cfg.depth_for(),
        "truncation": {
            "mobile_tail": (1.0 - cfg.p) ** (cfg.depth_for() + 1),
            "gnb_tail": {f"{pp:.6g}": gnb_tail_mass(pp, cfg.depth_for()) for pp in cfg.p_prime_values()},
        },
        "results": {},
        "warnings": [],
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        handler(cfg, sink, summary)
    for w in caught:
        msg = str(w.message)
        if msg not in summary["warnings"]:
            summary["warnings"].append(msg)
    return RunResult(cfg, sink.rows, summary)


def _coverage_sweep(cfg, sink, summary, metrics, analytic_fn=None):
    cfg_dict = cfg.to_dict()
    for pp in cfg.p_prime_values():
        for n in cfg.n_values:
            params = _param_string(n=n, d_F=fractal_dim_mobiles(1 - cfg.p), d_r=fractal_dim_gnb(pp),
                                   theta=_theta_label(cfg, n, pp), c=cfg.c)
            reps = _replicate(cfg, params, cfg.replications)
            results = _parallel_map(_coverage_task, [(cfg_dict, n, pp, s) for _, s in reps], cfg.workers)
            unreachable = 0
            for (r, s), res in zip(reps, results):
                for m in metrics:
                    if m == "hist":
                        for hop, count in sorted(res["hist"].items(), key=lambda kv: (isinstance(kv[0], str), kv[0])):
                            sink.rep(params, r, f"hop_{hop}", count, s)
                    else:
                        sink.rep(params, r, m, res[m], s)
                unreachable += res["unreachable"]
            if analytic_fn is not None:
                analytic_fn(sink, params, n, pp)
            summary["results"][params] = sink.aggregate(params)
            if unreachable:
                summary["warnings"].append(f"{params}: {unreachable} unreachable nodes over all replications")


def _theta_label(cfg, n, pp):
    th = cfg.theta_for(pp)
    if th is None:
        return math.log(cfg.rho) / math.log(n) if n > 1 else float("nan")
    return float(th)


def _bound_params(cfg, n, pp) -> analytics.BoundParams:
    return analytics.BoundParams(theta=_theta_label(cfg, n, pp), p=cfg.p, p_prime=pp)


def _isolation_analytic(cfg):
    def add(sink, params, n, pp):
        bp = _bound_params(cfg, n, pp)
        sink.analytic(params, "bound_sum", analytics.isolated_fraction_bound_sum(n, bp).value)
        if bp.theta > bp.d_r / 4 and bp.delta > 0:
            sink.analytic(params, "asymptotic", analytics.isolated_fraction_asymptotic(n, bp))
    return add


def _drone_analytic(cfg):
    def add(sink, params, n, pp):
        bp = _bound_params(cfg, n, pp)
        iso = analytics.isolated_fraction_bound_sum(n, bp)
        factor = analytics.drone_series_factor(n, bp)
        sink.analytic(params, "bound_sum", iso.value)
        sink.analytic(params, "series_factor", factor.value)
        sink.analytic(params, "drones_bound_fraction", iso.value * factor.value)
    return add


def _run_isolation_sweep(cfg, sink, summary):
    _coverage_sweep(cfg, sink, summary, ["isolated_count", "isolated_fraction"], _isolation_analytic(cfg))


def _run_regime_collapse(cfg, sink, summary):
    _coverage_sweep(cfg, sink, summary, ["isolated_fraction", "covered_fraction"], _isolation_analytic(cfg))


def _run_drone_sweep(cfg, sink, summary):
    _coverage_sweep(cfg, sink, summary,
                    ["isolated_count", "total_drones", "isolated_fraction", "drone_fraction"],
                    _drone_analytic(cfg))


def _run_hop_histogram(cfg, sink, summary):
    _coverage_sweep(cfg, sink, summary, ["mobiles", "hist"])


def _run_sample_map(cfg, sink, summary):
    cfg_dict = cfg.to_dict()
    summary["maps"] = {}
    for pp in cfg.p_prime_values():
        for n in cfg.n_values:
            params = _param_string(n=n, d_F=fractal_dim_mobiles(1 - cfg.p), d_r=fractal_dim_gnb(pp),
                                   theta=_theta_label(cfg, n, pp))
            reps = _replicate(cfg, params, cfg.replications)
            results = _parallel_map(_map_task, [(cfg_dict, n, pp, s) for _, s in reps], cfg.workers)
            for (r, s), res in zip(reps, results):
                for m in ("mobiles", "gnbs", "level0_fraction"):
                    sink.rep(params, r, m, res[m], s)
            U = cfg.depth_for()
            sink.analytic(params, "expected_gnbs",
                          expected_gnb_count(GnbParams(cfg.rho_for(n, pp), pp, U)))
            summary["results"][params] = sink.aggregate(params)
            mob, gnb = results[0]["positions"]
            summary["maps"][params] = {"mobiles": mob, "gnbs": gnb}


def _garage_sweep(cfg, sink, summary, kind):
    cfg_dict = cfg.to_dict()
    for pp in cfg.p_prime_values():
        for n in cfg.n_values:
            params = _param_string(n=n, d_r=fractal_dim_gnb(pp), theta=_theta_label(cfg, n, pp),
                                   torus=int(cfg.torus))
            reps = _replicate(cfg, params, cfg.replications)
            results = _parallel_map(_garage_task, [(cfg_dict, n, pp, s, kind) for _, s in reps], cfg.workers)
            for (r, s), res in zip(reps, results):
                sink.rep(params, r, "relays", res["relays"], s)
                if kind == "curve":
                    for mult, (_, count) in zip(res.get("multiples", []), res.get("curve", [])):
                        sink.rep(params, r, f"garages_R{mult:g}", count, s)
                    continue
                for mult, entry in res.get("per_radius", {}).items():
                    sink.rep(params, r, f"garages_R{mult:g}", entry["garages"], s)
                    if kind == "distance":
                        for hop, count in sorted(entry["hist"].items(),
                                                 key=lambda kv: (isinstance(kv[0], str), kv[0])):
                            sink.rep(params, r, f"R{mult:g}_hop_{hop}", count, s)
            summary["results"][params] = sink.aggregate(params)
            if kind == "maps" and results:
                first = results[0]
                summary.setdefault("maps", {})[params] = {
                    "relays": first.get("relay_positions", []),
                    "garages": {f"{m:g}": e["positions"] for m, e in first.get("per_radius", {}).items()},
                }


def _run_garage_maps(cfg, sink, summary):
    _garage_sweep(cfg, sink, summary, "maps")


def _run_garage_curve(cfg, sink, summary):
    _garage_sweep(cfg, sink, summary, "curve")


def _run_garage_distance(cfg, sink, summary):
    _garage_sweep(cfg, sink, summary, "distance")


def _run_bounds_table(cfg, sink, summary):
    for pp in cfg.p_prime_values():
        for n in cfg.n_values:
            bp = _bound_params(cfg, n, pp)
            params = _param_string(n=n, d_F=bp.d_F, d_r=bp.d_r, theta=bp.theta)
            iso = analytics.isolated_fraction_bound_sum(n, bp)
            sink.analytic(params, "isolated_prob_level0", analytics.isolated_prob_level(0, n, bp))
            sink.analytic(params, "bound_sum", iso.value)
            sink.analytic(params, "bound_sum_tail", iso.tail)
            sink.analytic(params, "exponent", analytics.isolation_exponent(bp))
            if bp.theta > bp.d_r / 4 and bp.delta > 0:
                asym = analytics.isolated_fraction_asymptotic(n, bp)
                sink.analytic(params, "asymptotic", asym)
                # the leading term is only asymptotically an upper bound
                sink.analytic(params, "asymptotic_below_sum", asym < iso.value)
            try:
                factor = analytics.drone_series_factor(n, bp)
            except ConfigurationError as exc:
                summary["warnings"].append(f"{params}: {exc}")
                continue
            sink.analytic(params, "series_factor", factor.value)
            sink.analytic(params, "drones_bound", n * iso.value * factor.value)


def _run_mellin_check(cfg, sink, summary):
    for pp in cfg.p_prime_values():
        bp = analytics.BoundParams(theta=1.0, p=cfg.p, p_prime=pp)
        params = _param_string(d_F=bp.d_F, d_r=bp.d_r, delta=bp.delta)
        table = []
        for y in cfg.y_values:
            m = analytics.mellin_f(float(y), bp)
            tag = f"{params};y={float(y):.6g}"
            sink.analytic(tag, "direct_sum", m.direct_sum)
            sink.analytic(tag, "asymptotic", m.asymptotic)
            sink.analytic(tag, "relative_error", m.relative_error)
            sink.analytic(tag, "corrected_error", m.corrected_error)
            table.append(dataclasses.asdict(m))
        summary["results"][params] = {"table": table, "oscillation_amplitude": table[0]["amplitude"] if table else None}


_HANDLERS = {
    "sample-map": _run_sample_map,
    "isolation-sweep": _run_isolation_sweep,
    "regime-collapse": _run_regime_collapse,
    "drone-sweep": _run_drone_sweep,
    "hop-histogram": _run_hop_histogram,
    "garage-maps": _run_garage_maps,
    "garage-curve": _run_garage_curve,
    "garage-distance": _run_garage_distance,
    "bounds-table": _run_bounds_table,
    "mellin-check": _run_mellin_check,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_outputs(result: RunResult, out: Optional[str] = None, fmt: Optional[str] = None) -> list[str]:
    out = out or result.config.out
    fmt = fmt or result.config.format
    os.makedirs(out, exist_ok=True)
    stem = os.path.join(out, result.config.experiment)
    written = []
    summary = dict(result.summary)
    if fmt == "csv":
        with open(stem + ".csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(result.csv_text())
        written.append(stem + ".csv")
    else:
        summary["rows"] = [dict(zip(CSV_HEADER, r.as_tuple())) for r in result.rows]
    with open(stem + ".json", "w", encoding="utf-8") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(stem + ".json")
    log.info("wrote %s", ", ".join(written))
    return written
