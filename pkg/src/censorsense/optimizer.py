"""Exhaustive threshold search minimizing the average error probability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import (
    MetricReport,
    all_ones_probability_grid,
    avg_error,
    conventional_all_ones_probability,
    metric_report,
)
from .consensus import NetworkConfig
from .sensing import DetectorParams, Thresholds, local_probs, pi_1_given_h0, pi_1_given_h1

MAX_GRID_PAIRS = 10**6


@dataclass(frozen=True)
class GridSpec:
    """Threshold axis ``lo, lo + step, ..., hi`` shared by both thresholds."""

    lo: float = 0.0
    hi: float = 60.0
    step: float = 0.1

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"grid needs 0 <= lo <= hi, got [{self.lo}, {self.hi}]")
        n = self.size
        if n * (n + 1) // 2 > MAX_GRID_PAIRS:
            raise ValueError(f"grid of {n} points exceeds {MAX_GRID_PAIRS} threshold pairs")

    @property
    def size(self) -> int:
        return int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1

    def axis(self) -> np.ndarray:
        # rounding keeps 10.3 from showing up as 10.299999999999999
        return np.round(self.lo + self.step * np.arange(self.size), 10)


@dataclass(frozen=True)
class OptResult:
    thresholds: Thresholds
    p_e: float
    p_d: float
    p_fa: float


@dataclass(frozen=True)
class GainReport:
    """Percentage improvements of censoring over conventional sensing."""

    error: float
    energy: float
    overhead: float


def _axes(det: DetectorParams, grid: GridSpec):
    eta = grid.axis()
    if eta.size == 0:
        raise ValueError("empty threshold grid")
    p1_h1 = np.array([pi_1_given_h1(e, det) for e in eta])
    p1_h0 = np.array([pi_1_given_h0(e, det) for e in eta])
    return eta, p1_h1, p1_h0


def optimize_conventional(cfg: NetworkConfig, det: DetectorParams, grid: GridSpec = GridSpec()) -> OptResult:
    """Best single threshold on the grid; ties go to the smallest threshold."""
    eta, p1_h1, p1_h0 = _axes(det, grid)
    p_d = conventional_all_ones_probability(cfg, p1_h1)
    p_fa = conventional_all_ones_probability(cfg, p1_h0)
    p_e = avg_error(np.atleast_1d(p_d), np.atleast_1d(p_fa), cfg.prior_h0, cfg.prior_h1)
    best = int(np.argmin(p_e))  # first occurrence = smallest eta
    return OptResult(Thresholds.conventional(float(eta[best])), float(p_e[best]), float(np.atleast_1d(p_d)[best]), float(np.atleast_1d(p_fa)[best]))


def optimize_censoring(cfg: NetworkConfig, det: DetectorParams, grid: GridSpec = GridSpec()) -> OptResult:
    """Best threshold pair ``eta0 <= eta1`` on the grid.

    Ties are broken by the narrower censoring band, then by the smaller
    ``eta0``. The diagonal ``eta0 == eta1`` is the conventional detector, so
    the optimum is never worse than :func:`optimize_conventional` on the same
    grid.
    """
    eta, p1_h1, p1_h0 = _axes(det, grid)
    # rows index eta1 (through P(+1)), columns eta0 (through P(-1) = 1 - P(x >= eta0))
    p_d = all_ones_probability_grid(cfg, p1_h1, 1.0 - p1_h1)
    p_fa = all_ones_probability_grid(cfg, p1_h0, 1.0 - p1_h0)
    # eta0 == eta1 is the conventional detector; reuse those values bit for bit
    diag = np.arange(eta.size)
    p_d[diag, diag] = conventional_all_ones_probability(cfg, p1_h1)
    p_fa[diag, diag] = conventional_all_ones_probability(cfg, p1_h0)
    p_e = avg_error(p_d, p_fa, cfg.prior_h0, cfg.prior_h1)
    i1, i0 = np.indices(p_e.shape)
    p_e = np.where(i0 <= i1, p_e, np.inf)
    # lexsort: last key is primary
    order = np.lexsort((i0.ravel(), (i1 - i0).ravel(), p_e.ravel()))
    best1, best0 = np.unravel_index(order[0], p_e.shape)
    return OptResult(
        Thresholds.censoring(float(eta[best0]), float(eta[best1])),
        float(p_e[best1, best0]),
        float(p_d[best1, best0]),
        float(p_fa[best1, best0]),
    )


def _percent_gain(conventional: float, censoring: float, name: str) -> float:
    if conventional == 0:
        raise ZeroDivisionError(f"conventional {name} is zero; gain undefined")
    return (conventional - censoring) / conventional * 100.0


def compute_gains(conv: MetricReport, cens: MetricReport) -> GainReport:
    """Relative savings (percent) in error probability, energy and overhead."""
    return GainReport(
        error=_percent_gain(conv.p_e, cens.p_e, "error probability"),
        energy=_percent_gain(conv.avg_energy, cens.avg_energy, "energy"),
        overhead=_percent_gain(conv.avg_overhead, cens.avg_overhead, "overhead"),
    )


def optimized_comparison(cfg: NetworkConfig, det: DetectorParams, grid: GridSpec = GridSpec()):
    """Optimize both systems and return ``(conv_result, cens_result, conv_metrics, cens_metrics, gains)``."""
    conv = optimize_conventional(cfg, det, grid)
    cens = optimize_censoring(cfg, det, grid)
    conv_metrics = metric_report(cfg, local_probs(conv.thresholds, det), "conventional")
    cens_metrics = metric_report(cfg, local_probs(cens.thresholds, det), "censoring")
    return conv, cens, conv_metrics, cens_metrics, compute_gains(conv_metrics, cens_metrics)
