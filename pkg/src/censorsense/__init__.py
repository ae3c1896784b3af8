"""Censoring-enabled cooperative spectrum sensing with diversity-based binary consensus."""

__version__ = "0.1.0"

from .analytics import (
    MetricReport,
    avg_energy,
    avg_error,
    avg_overhead,
    censoring_pd,
    censoring_pfa,
    conventional_pd,
    conventional_pfa,
    metric_report,
)
from .consensus import NetworkConfig, count_transmissions, global_and, run_consensus, sample_graph
from .montecarlo import SimEstimate, brute_force_exact, simulate
from .optimizer import GridSpec, OptResult, compute_gains, optimize_censoring, optimize_conventional
from .sensing import DetectorParams, LocalDecisionProbs, Thresholds, local_decide, local_probs

__all__ = [
    "DetectorParams",
    "GridSpec",
    "LocalDecisionProbs",
    "MetricReport",
    "NetworkConfig",
    "OptResult",
    "SimEstimate",
    "Thresholds",
    "avg_energy",
    "avg_error",
    "avg_overhead",
    "brute_force_exact",
    "censoring_pd",
    "censoring_pfa",
    "compute_gains",
    "conventional_pd",
    "conventional_pfa",
    "count_transmissions",
    "global_and",
    "local_decide",
    "local_probs",
    "metric_report",
    "optimize_censoring",
    "optimize_conventional",
    "run_consensus",
    "sample_graph",
    "simulate",
]
