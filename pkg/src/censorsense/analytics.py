"""Closed-form performance metrics of censoring and conventional consensus sensing.

Given ``C = c`` censoring nodes and ``n`` nodes voting +1, the vote sum is
``S = 2n + c - M``. Conditioned on ``(c, S)`` each node's scaled vote ``M*y_i``
is approximated as Gaussian with mean ``S`` and variance
``(1-p)(M - b_i^2 - c)/(pK)``; the global-AND probability is the product of
the per-node probabilities that the vote is positive, averaged over the
trinomial law of ``(n, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.special import log_ndtr

from .consensus import NetworkConfig, TiePolicy
from .mathkit import LOG_FLOOR, clamp_probability, log_multinomial, log_multinomial_table
from .sensing import LocalDecisionProbs

Numerator = Literal["sum", "count"]
System = Literal["conventional", "censoring"]

# Stands in for log(0) so that 0 * log(0) evaluates to 0 inside matrix products.
_LOG_ZERO = -1e250
_CHUNK = 4096


@dataclass(frozen=True)
class MetricReport:
    p_d: float
    p_fa: float
    p_e: float
    avg_energy: float
    avg_overhead: float
    expected_censor_count: float


def _log_positive_bracket(mean, sigma, tie_policy: TiePolicy):
    """log P(vote > 0) for a Gaussian vote, or the tie-policy indicator when sigma = 0."""
    mean = np.asarray(mean, dtype=float)
    if sigma > 0:
        return log_ndtr(mean / sigma)
    hit = mean >= 0 if tie_policy == "one_on_tie" else mean > 0
    return np.where(hit, 0.0, -np.inf)


@lru_cache(maxsize=256)
def _censoring_terms(m: int, p: float, k: int, tie_policy: str, numerator: str, variance_scale: float = 1.0):
    """Valid (c, n) index pairs and their log multinomial-times-bracket weights."""
    log_coeff = log_multinomial_table(m)
    cs, ns = [], []
    weights = []
    for c in range(m + 1):
        n = np.arange(m - c + 1)
        s = 2 * n + c - m
        mean = s if numerator == "sum" else n
        var_censor = variance_scale * (1 - p) * (m - c) / (p * k)
        var_sender = variance_scale * (1 - p) * max(m - 1 - c, 0) / (p * k)
        log_w = log_coeff[c, : m - c + 1].copy()
        if c > 0:
            log_w += c * _log_positive_bracket(mean, np.sqrt(var_censor), tie_policy)
        if m - c > 0:
            log_w += (m - c) * _log_positive_bracket(mean, np.sqrt(var_sender), tie_policy)
        cs.append(np.full(n.shape, c))
        ns.append(n)
        weights.append(log_w)
    c_idx = np.concatenate(cs)
    n_idx = np.concatenate(ns)
    exps = np.vstack([n_idx, c_idx, m - n_idx - c_idx]).astype(float)
    log_w = np.concatenate(weights)
    # Probability factors are <= 1, so a weight below the floor bounds its term.
    keep = log_w >= LOG_FLOOR
    return exps[:, keep], log_w[keep]


def _safe_log(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), _LOG_ZERO)


def all_ones_probability(cfg: NetworkConfig, p1, p0, pm1, numerator: Numerator = "sum", *, variance_scale: float = 1.0):
    """Approximate P(every node decides 1) for arrays of local decision probabilities.

    ``p1, p0, pm1`` are broadcast-compatible arrays holding P(+1), P(censor)
    and P(-1) under one hypothesis. Feeding the H1 row gives the detection
    probability, the H0 row the false-alarm probability.

    ``numerator="count"`` replaces the vote sum S in the Gaussian argument by
    the number of +1 votes; it exists only to compare against that variant.
    ``variance_scale`` multiplies the vote variance and is a diagnostic hook
    for negative controls.
    """
    if numerator not in ("sum", "count"):
        raise ValueError(f"unknown numerator variant {numerator!r}")
    p1, p0, pm1 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (p1, p0, pm1)))
    shape = p1.shape
    rows = np.stack([_safe_log(p1).ravel(), _safe_log(p0).ravel(), _safe_log(pm1).ravel()], axis=1)
    exps, log_w = _censoring_terms(cfg.m, float(cfg.p), cfg.k, cfg.tie_policy, numerator, float(variance_scale))
    out = np.empty(rows.shape[0])
    for start in range(0, rows.shape[0], _CHUNK):
        log_terms = rows[start : start + _CHUNK] @ exps
        log_terms += log_w
        np.exp(log_terms, out=log_terms)
        out[start : start + _CHUNK] = log_terms.sum(axis=1)
    out = clamp_probability(out)
    return float(out[0]) if shape == () else np.reshape(out, shape)


def all_ones_probability_grid(cfg: NetworkConfig, p1_axis, pm1_axis, numerator: Numerator = "sum"):
    """All-ones probability on the outer grid of P(+1) values and P(-1) values.

    Entry ``[i, j]`` uses ``p1 = p1_axis[i]``, ``pm1 = pm1_axis[j]`` and
    ``p0 = 1 - p1 - pm1`` (clipped at 0); entries where the two exceed one
    together are meaningless and left to the caller to mask. For each censor
    count ``c`` the sum over ``n`` is a matrix product of power tables, which
    makes a full threshold-pair scan cheap. Agrees with
    :func:`all_ones_probability` to rounding.
    """
    m = cfg.m
    p1_axis = np.asarray(p1_axis, dtype=float)
    pm1_axis = np.asarray(pm1_axis, dtype=float)
    exps, log_w = _censoring_terms(m, float(cfg.p), cfg.k, cfg.tie_policy, numerator)
    weights = np.zeros((m + 1, m + 1))
    weights[exps[1].astype(int), exps[0].astype(int)] = np.exp(log_w)
    if not np.all(np.isfinite(weights)):
        raise OverflowError(f"multinomial weights overflow for m={m}; use all_ones_probability")
    powers = np.arange(m + 1)
    pow1 = p1_axis[:, None] ** powers
    powm1 = pm1_axis[:, None] ** powers
    p0 = np.clip(1.0 - p1_axis[:, None] - pm1_axis[None, :], 0.0, None)
    total = np.zeros((p1_axis.size, pm1_axis.size))
    p0_power = np.ones_like(total)
    for c in range(m + 1):
        width = m - c + 1
        left = pow1[:, :width] * weights[c, :width]
        right = powm1[:, width - 1 :: -1]  # column n holds pm1^(m-c-n)
        total += p0_power * (left @ right.T)
        p0_power *= p0
    return np.clip(total, 0.0, 1.0)


def _validated_row(probs: LocalDecisionProbs, hyp):
    row = probs.row(hyp)
    if abs(sum(row) - 1) > 1e-12 or min(row) < -1e-12:
        raise ValueError(f"invalid probability row {row}")
    return row


def censoring_pd(cfg: NetworkConfig, probs: LocalDecisionProbs, numerator: Numerator = "sum") -> float:
    """Detection probability of the censoring system after ``cfg.k`` steps."""
    return all_ones_probability(cfg, *_validated_row(probs, "H1"), numerator=numerator)


def censoring_pfa(cfg: NetworkConfig, probs: LocalDecisionProbs, numerator: Numerator = "sum") -> float:
    """False-alarm probability of the censoring system after ``cfg.k`` steps."""
    return all_ones_probability(cfg, *_validated_row(probs, "H0"), numerator=numerator)


@lru_cache(maxsize=256)
def _conventional_terms(m: int, p: float, k: int, tie_policy: str, variance_scale: float = 1.0):
    s = np.arange(-m, m + 1, 2)
    ones = (m + s) // 2
    log_binom = np.array([log_multinomial(m, int(j), 0) for j in ones])
    sigma = np.sqrt(variance_scale * (1 - p) * (m - 1) / (p * k))
    log_w = log_binom + m * _log_positive_bracket(s, sigma, tie_policy)
    return ones.astype(float), (m - ones).astype(float), log_w


def conventional_all_ones_probability(cfg: NetworkConfig, p1, *, variance_scale: float = 1.0):
    """Approximate P(every node decides 1) for a non-censoring network; ``p1`` may be an array."""
    p1 = np.asarray(p1, dtype=float)
    ones, zeros, log_w = _conventional_terms(cfg.m, float(cfg.p), cfg.k, cfg.tie_policy, float(variance_scale))
    lp1 = _safe_log(p1)[..., None]
    lq1 = _safe_log(1.0 - p1)[..., None]
    log_terms = log_w + ones * lp1 + zeros * lq1
    log_terms = np.where(log_terms < LOG_FLOOR, -np.inf, log_terms)
    out = clamp_probability(np.exp(log_terms).sum(axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def _conventional_row(probs: LocalDecisionProbs, hyp):
    p1, p0, pm1 = _validated_row(probs, hyp)
    if p0 != 0:
        raise ValueError("conventional formulas need zero censoring probability")
    return p1


def conventional_pd(cfg: NetworkConfig, probs: LocalDecisionProbs) -> float:
    """Detection probability of the conventional (non-censoring) system."""
    return conventional_all_ones_probability(cfg, _conventional_row(probs, "H1"))


def conventional_pfa(cfg: NetworkConfig, probs: LocalDecisionProbs) -> float:
    """False-alarm probability of the conventional (non-censoring) system."""
    return conventional_all_ones_probability(cfg, _conventional_row(probs, "H0"))


def _check_priors(prior_h0, prior_h1):
    if abs(prior_h0 + prior_h1 - 1) > 1e-12:
        raise ValueError(f"priors must sum to 1, got {prior_h0} + {prior_h1}")


def avg_error(p_d, p_fa, prior_h0: float = 0.5, prior_h1: float = 0.5):
    """Prior-weighted error probability: false alarms under H0 plus misses under H1."""
    _check_priors(prior_h0, prior_h1)
    return prior_h0 * p_fa + prior_h1 * (1 - p_d)


def censor_fraction(probs: LocalDecisionProbs, prior_h0: float = 0.5, prior_h1: float = 0.5) -> float:
    _check_priors(prior_h0, prior_h1)
    return prior_h0 * probs.p0_h0 + prior_h1 * probs.p0_h1


def avg_energy(probs: LocalDecisionProbs, prior_h0: float = 0.5, prior_h1: float = 0.5, e_unit: float = 1.0) -> float:
    """Average transmit energy per node; ``e_unit`` is the cost of one decision."""
    if not e_unit > 0:
        raise ValueError("e_unit must be positive")
    return (1 - censor_fraction(probs, prior_h0, prior_h1)) * e_unit


def avg_overhead(probs: LocalDecisionProbs, prior_h0: float, prior_h1: float, k: int) -> float:
    """Average number of messages sent per node over ``k`` steps."""
    if k < 1:
        raise ValueError(f"horizon must be >= 1, got {k}")
    return (1 - censor_fraction(probs, prior_h0, prior_h1)) * k


def expected_censor_count(probs: LocalDecisionProbs, prior_h0: float, prior_h1: float, m: int) -> float:
    return censor_fraction(probs, prior_h0, prior_h1) * m


def metric_report(
    cfg: NetworkConfig,
    probs: LocalDecisionProbs,
    system: System | None = None,
    e_unit: float = 1.0,
    numerator: Numerator = "sum",
) -> MetricReport:
    """All closed-form metrics for one configuration.

    ``system`` defaults to conventional when neither row has censoring mass.
    """
    if system is None:
        system = "conventional" if probs.is_conventional() else "censoring"
    if system == "conventional":
        p_d, p_fa = conventional_pd(cfg, probs), conventional_pfa(cfg, probs)
    elif system == "censoring":
        p_d, p_fa = censoring_pd(cfg, probs, numerator), censoring_pfa(cfg, probs, numerator)
    else:
        raise ValueError(f"unknown system {system!r}")
    h0, h1 = cfg.prior_h0, cfg.prior_h1
    return MetricReport(
        p_d=p_d,
        p_fa=p_fa,
        p_e=avg_error(p_d, p_fa, h0, h1),
        avg_energy=avg_energy(probs, h0, h1, e_unit),
        avg_overhead=avg_overhead(probs, h0, h1, cfg.k),
        expected_censor_count=expected_censor_count(probs, h0, h1, cfg.m),
    )
