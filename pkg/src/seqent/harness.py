"""Config-driven, seeded experiments: entropy continuity and the entropy product rule.

Every run is a pure function of its config: seeds are explicit, channel
streams are derived from (seed, channel, eps) with a keyed hash, and report
rows are assembled in a fixed order, so identical configs yield
byte-identical CSV (and SVG) outputs.

CSV schemas (version 1):
    continuity: eps,seed,distance,h_x,h_y,abs_dh,budget,pass_hard,pass_soft
    abramov:    seed,h_base,h_induced,mu_e,residual,overflow_mass,alpha_hat,flagged
    returns:    return_time,count,mass
"""
from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

from .channels import budget, indel_channel, substitute_channel
from .core import Mixture, derive_seed, quasi_generic_path, sample_path
from .entropy import estimate_entropy_rate, undersampling_guard
from .induced import MarkedSet, abramov_check, induce
from .plots import continuity_figure, return_time_figure, save_svg
from .wordio import process_spec_from_dict

CSV_SCHEMA_VERSION = 1
LOG2 = math.log(2.0)

CONTINUITY_COLUMNS = (
    "eps", "seed", "distance", "h_x", "h_y", "abs_dh", "budget", "pass_hard", "pass_soft",
)
ABRAMOV_COLUMNS = (
    "seed", "h_base", "h_induced", "mu_e", "residual", "overflow_mass", "alpha_hat", "flagged",
)
RETURNS_COLUMNS = ("return_time", "count", "mass")


class ConfigError(ValueError):
    """The experiment config is invalid; reported before any run starts."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment batch; thresholds are always in nats."""

    spec: object
    n: int
    m: int
    eps_grid: tuple = (0.01, 0.02, 0.05, 0.1)
    seeds: tuple = tuple(range(20))
    channel: str = "substitution"
    unit: str = "nats"
    slack: float = 0.0
    soft_tolerance: float = 0.1
    block_schedule: int = 32
    marked_symbols: tuple = (1,)
    abramov_m: int = 8
    r_max: int = 32
    abramov_tolerance: float = 0.02

    def __post_init__(self):
        problems = []
        if self.n < 2:
            problems.append(f"n must be >= 2, got {self.n}")
        if self.m < 1 or self.m + 1 > self.n:
            problems.append(f"m must satisfy 1 <= m <= n - 1, got m={self.m}")
        if not self.eps_grid:
            problems.append("eps grid is empty")
        if any(not 0.0 <= e < 1.0 for e in self.eps_grid):
            problems.append(f"eps grid must lie in [0, 1), got {self.eps_grid}")
        if not self.seeds:
            problems.append("seed list is empty")
        if len(set(self.seeds)) != len(self.seeds):
            problems.append("seeds must be distinct")
        if self.channel not in ("substitution", "indel"):
            problems.append(f"unknown channel {self.channel!r}")
        if self.unit not in ("nats", "bits"):
            problems.append(f"unknown unit {self.unit!r}")
        if self.block_schedule < 1:
            problems.append("block_schedule must be >= 1")
        if problems:
            raise ConfigError("; ".join(problems))
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "marked_symbols", tuple(int(s) for s in self.marked_symbols))

    def guard_ok(self):
        """True when (n, m) respects the entropy module's undersampling guard."""
        return self.m <= undersampling_guard(self.n, self.spec.alphabet.size)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        spec = d.pop("spec", None)
        if spec is None:
            raise ConfigError("config needs a 'spec' entry")
        if isinstance(spec, dict):
            spec = process_spec_from_dict(spec)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for key in ("eps_grid", "seeds", "marked_symbols"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(spec=spec, **d)

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


def generate_path(spec, n, seed, block_schedule=32):
    """sample_path for ergodic specs, quasi_generic_path for mixtures."""
    if isinstance(spec, Mixture) and not spec.is_ergodic():
        return quasi_generic_path(spec, n, block_schedule=block_schedule, seed=seed)
    return sample_path(spec, n, seed)


@dataclass(frozen=True)
class ContinuityRow:
    eps: float
    seed: int
    distance: float
    h_x: float
    h_y: float
    abs_dh: float
    budget: float
    pass_hard: bool
    pass_soft: bool


@dataclass(frozen=True)
class ContinuityReport:
    rows: tuple
    channel: str
    alphabet_size: int
    n: int
    m: int
    unit: str

    def all_pass_hard(self):
        return all(r.pass_hard for r in self.rows)

    def medians_by_eps(self):
        grid = sorted({r.eps for r in self.rows})
        return {
            e: statistics.median(r.abs_dh for r in self.rows if r.eps == e) for e in grid
        }

    def write_csv(self, path):
        _write_csv(path, CONTINUITY_COLUMNS, [
            (
                r.eps, r.seed,
                _in_unit(r.distance, "nats", dimensionless=True),
                _in_unit(r.h_x, self.unit), _in_unit(r.h_y, self.unit),
                _in_unit(r.abs_dh, self.unit), _in_unit(r.budget, self.unit),
                r.pass_hard, r.pass_soft,
            )
            for r in self.rows
        ])


def _in_unit(value, unit, dimensionless=False):
    if dimensionless or unit == "nats":
        return value
    return value / LOG2


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def run_continuity(cfg):
    """Perturb seeded paths across the eps grid and compare entropy shifts to the budget.

    For each seed one path x is generated (quasi-generic for mixtures) and
    its slope estimate shared across the grid. eps = 0 rows reuse x itself.
    distance is the exact Hamming density for the substitution channel and
    the certificate bound 1 - |cert|/n for the indel channel.
    """
    l = cfg.spec.alphabet.size
    rows = []
    for seed in cfg.seeds:
        x = generate_path(cfg.spec, cfg.n, seed, cfg.block_schedule)
        h_x = estimate_entropy_rate(x, cfg.m).slope
        for eps in cfg.eps_grid:
            if eps == 0.0:
                y, distance = x, 0.0
            elif cfg.channel == "substitution":
                ch_seed = derive_seed(seed, "continuity", cfg.channel, repr(eps))
                y, changed = substitute_channel(x, eps, ch_seed)
                distance = changed.size / cfg.n
            else:
                ch_seed = derive_seed(seed, "continuity", cfg.channel, repr(eps))
                y, cert = indel_channel(x, eps, ch_seed)
                distance = 1.0 - len(cert) / cfg.n
            h_y = h_x if y is x else estimate_entropy_rate(y, cfg.m).slope
            abs_dh = abs(h_x - h_y)
            b = 0.0 if eps == 0.0 else budget(eps, l)
            rows.append(ContinuityRow(
                eps=eps, seed=seed, distance=distance, h_x=h_x, h_y=h_y,
                abs_dh=abs_dh, budget=b,
                pass_hard=abs_dh <= b + cfg.slack,
                pass_soft=abs_dh <= cfg.soft_tolerance,
            ))
    return ContinuityReport(
        rows=tuple(rows), channel=cfg.channel, alphabet_size=l,
        n=cfg.n, m=cfg.m, unit=cfg.unit,
    )


@dataclass(frozen=True)
class AbramovReport:
    rows: tuple
    return_time_census: object
    unit: str

    def median_residual(self):
        return statistics.median(r.residual for _, r in self.rows)

    def write_csv(self, path):
        _write_csv(path, ABRAMOV_COLUMNS, [
            (
                seed,
                _in_unit(r.h_base, self.unit), _in_unit(r.h_induced, self.unit),
                r.mu_e_hat, _in_unit(r.residual, self.unit),
                r.overflow_mass, r.alpha_hat, r.flagged,
            )
            for seed, r in self.rows
        ])


def run_abramov(cfg):
    """abramov_check across seeds; keeps the first seed's return-time census for plots."""
    marked = MarkedSet(frozenset(cfg.marked_symbols), cfg.spec.alphabet)
    rows = []
    rtc = None
    for seed in cfg.seeds:
        x = generate_path(cfg.spec, cfg.n, seed, cfg.block_schedule)
        result = abramov_check(x, marked, cfg.abramov_m, r_max=cfg.r_max)
        if rtc is None:
            rtc = induce(x, marked).return_time_census()
        rows.append((seed, result))
    return AbramovReport(rows=tuple(rows), return_time_census=rtc, unit=cfg.unit)


def write_returns_csv(rtc, path):
    _write_csv(path, RETURNS_COLUMNS, [
        (int(t), int(c), int(c) / rtc.total) for t, c in zip(rtc.times, rtc.counts)
    ])


def emit_plots(out_dir, continuity_report=None, return_time_census=None):
    """Render the report figures as reproducible SVGs; returns the written paths."""
    if continuity_report is None and return_time_census is None:
        raise ValueError("nothing to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if continuity_report is not None:
        unit = continuity_report.unit
        rows = continuity_report.rows
        if unit == "bits":
            rows = [
                ContinuityRow(
                    eps=r.eps, seed=r.seed, distance=r.distance,
                    h_x=r.h_x / LOG2, h_y=r.h_y / LOG2, abs_dh=r.abs_dh / LOG2,
                    budget=r.budget / LOG2, pass_hard=r.pass_hard, pass_soft=r.pass_soft,
                )
                for r in rows
            ]
        path = out_dir / "continuity.svg"
        save_svg(continuity_figure(rows, unit=unit), path)
        written.append(path)
    if return_time_census is not None:
        path = out_dir / "returns.svg"
        save_svg(return_time_figure(return_time_census), path)
        written.append(path)
    return written


def run_full(cfg, out_dir, emit_svg=True):
    """Continuity plus the entropy product check, with CSV (and SVG) artifacts.

    Returns (continuity_report, abramov_report, paths).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cont = run_continuity(cfg)
    abr = run_abramov(cfg)
    paths = [out_dir / "continuity.csv", out_dir / "abramov.csv", out_dir / "returns.csv"]
    cont.write_csv(paths[0])
    abr.write_csv(paths[1])
    write_returns_csv(abr.return_time_census, paths[2])
    if emit_svg:
        paths.extend(emit_plots(out_dir, cont, abr.return_time_census))
    return cont, abr, paths
