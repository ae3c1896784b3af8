"""Energy-detector model: local decision probabilities and signal-level samplers.

The detector output of a secondary user is chi-squared with ``2*TB`` degrees
of freedom, central under H0 and noncentral (noncentrality ``2*gamma``) under
H1, where the received SNR ``gamma`` is exponentially distributed (Rayleigh
fading) with mean ``avg_snr``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .mathkit import clamp_probability, reg_lower_gamma, reg_upper_gamma

Hypothesis = Literal["H0", "H1"]

CENSOR = 0


@dataclass(frozen=True)
class DetectorParams:
    """Energy detector configuration.

    Attributes:
        time_bandwidth: time-bandwidth product TB; the statistic has 2*TB
            degrees of freedom.
        avg_snr_db: mean received SNR in dB.
    """

    time_bandwidth: int = 5
    avg_snr_db: float = 2.0

    def __post_init__(self):
        if int(self.time_bandwidth) != self.time_bandwidth or self.time_bandwidth < 1:
            raise ValueError(f"time_bandwidth must be an integer >= 1, got {self.time_bandwidth}")
        if not math.isfinite(self.avg_snr_db):
            raise ValueError("avg_snr_db must be finite")

    @property
    def avg_snr_linear(self) -> float:
        return 10.0 ** (self.avg_snr_db / 10.0)

    @classmethod
    def from_linear(cls, time_bandwidth: int, avg_snr: float) -> "DetectorParams":
        if not avg_snr > 0:
            raise ValueError("linear SNR must be positive")
        return cls(time_bandwidth, 10.0 * math.log10(avg_snr))


@dataclass(frozen=True)
class Thresholds:
    """Local decision thresholds.

    A conventional detector uses a single threshold ``eta``; a censoring
    detector uses the pair ``eta0 <= eta1`` and stays silent in between.
    """

    kind: Literal["conventional", "censoring"]
    eta: float | None = None
    eta0: float | None = None
    eta1: float | None = None

    def __post_init__(self):
        if self.kind == "conventional":
            if self.eta is None or not self.eta >= 0:
                raise ValueError(f"conventional threshold must be >= 0, got {self.eta}")
        elif self.kind == "censoring":
            if self.eta0 is None or self.eta1 is None:
                raise ValueError("censoring thresholds need both eta0 and eta1")
            if not self.eta0 >= 0:
                raise ValueError(f"eta0 must be >= 0, got {self.eta0}")
            if not self.eta0 <= self.eta1:
                raise ValueError(f"censoring requires eta0 <= eta1, got ({self.eta0}, {self.eta1})")
        else:
            raise ValueError(f"unknown threshold kind {self.kind!r}")

    @classmethod
    def conventional(cls, eta: float) -> "Thresholds":
        return cls("conventional", eta=eta)

    @classmethod
    def censoring(cls, eta0: float, eta1: float) -> "Thresholds":
        return cls("censoring", eta0=eta0, eta1=eta1)

    @property
    def lower(self) -> float:
        return self.eta if self.kind == "conventional" else self.eta0

    @property
    def upper(self) -> float:
        return self.eta if self.kind == "conventional" else self.eta1


@dataclass(frozen=True)
class LocalDecisionProbs:
    """Probabilities of the three local decisions (+1, 0 = censor, -1) under H1 and H0."""

    p1_h1: float
    p0_h1: float
    pm1_h1: float
    p1_h0: float
    p0_h0: float
    pm1_h0: float

    def __post_init__(self):
        for name in ("p1_h1", "p0_h1", "pm1_h1", "p1_h0", "p0_h0", "pm1_h0"):
            value = getattr(self, name)
            if not (-1e-12 <= value <= 1 + 1e-12):
                raise ValueError(f"{name}={value} is not a probability")
        for label, row in (("H1", self.row("H1")), ("H0", self.row("H0"))):
            if abs(sum(row) - 1.0) > 1e-12:
                raise ValueError(f"{label} row sums to {sum(row)!r}, expected 1")

    def row(self, hyp: Hypothesis) -> tuple[float, float, float]:
        """(P(+1), P(0), P(-1)) under the given hypothesis."""
        if hyp == "H1":
            return (self.p1_h1, self.p0_h1, self.pm1_h1)
        if hyp == "H0":
            return (self.p1_h0, self.p0_h0, self.pm1_h0)
        raise ValueError(f"unknown hypothesis {hyp!r}")

    @classmethod
    def from_rows(cls, h1, h0) -> "LocalDecisionProbs":
        return cls(*h1, *h0)

    def is_conventional(self) -> bool:
        return self.p0_h1 == 0 and self.p0_h0 == 0


def _check_eta(eta):
    if not eta >= 0:
        raise ValueError(f"threshold must be >= 0, got {eta}")


def pi_1_given_h0(eta: float, params: DetectorParams) -> float:
    """P(x >= eta | H0) for the central chi-squared statistic, 1 - P(TB, eta/2)."""
    _check_eta(eta)
    return reg_upper_gamma(params.time_bandwidth, eta / 2.0)


def pi_1_given_h1(eta: float, params: DetectorParams) -> float:
    """Rayleigh-averaged detection probability P(x >= eta | H1).

    With ``lam = eta/2``, ``u = TB`` and ``beta = g/(g+1)`` the closed form is

        e^-lam sum_{n<=u-2} lam^n/n!
          + beta^-(u-1) (e^{-lam/(g+1)} - e^-lam sum_{n<=u-2} (lam beta)^n/n!)

    The bracket equals ``e^{-lam/(g+1)} P(u-1, lam beta)``, the tail of the
    exponential series, so it is evaluated as a regularized gamma function
    and combined with ``beta^-(u-1)`` in log space. That avoids the
    catastrophic cancellation of the literal form when the SNR is small.
    """
    _check_eta(eta)
    if math.isinf(eta):
        return 0.0
    u = params.time_bandwidth
    g = params.avg_snr_linear
    lam = eta / 2.0
    if u == 1:
        return clamp_probability(math.exp(-lam / (g + 1.0)))
    head = reg_upper_gamma(u - 1, lam)  # e^-lam sum_{n<=u-2} lam^n/n!
    if lam == 0:
        return clamp_probability(head)
    beta = g / (g + 1.0)
    tail_p = reg_lower_gamma(u - 1, lam * beta)
    if tail_p == 0.0:
        return clamp_probability(head)
    log_tail = math.log(tail_p) - (u - 1) * math.log(beta) - lam / (g + 1.0)
    return clamp_probability(head + math.exp(log_tail))


def pi_1(eta: float, params: DetectorParams, hyp: Hypothesis) -> float:
    if hyp == "H1":
        return pi_1_given_h1(eta, params)
    if hyp == "H0":
        return pi_1_given_h0(eta, params)
    raise ValueError(f"unknown hypothesis {hyp!r}")


def local_probs(thresholds: Thresholds, params: DetectorParams) -> LocalDecisionProbs:
    """Local decision probabilities for a conventional or censoring detector."""
    rows = {}
    for hyp in ("H1", "H0"):
        if thresholds.kind == "conventional":
            p1 = pi_1(thresholds.eta, params, hyp)
            rows[hyp] = (p1, 0.0, 1.0 - p1)
        else:
            p1 = pi_1(thresholds.eta1, params, hyp)
            pm1 = 1.0 - pi_1(thresholds.eta0, params, hyp)
            p0 = max(0.0, 1.0 - p1 - pm1)
            rows[hyp] = (p1, p0, pm1)
    return LocalDecisionProbs.from_rows(rows["H1"], rows["H0"])


def sample_statistics(hyp: Hypothesis, params: DetectorParams, rng: np.random.Generator, size=None):
    """Draw energy-detector outputs.

    Under H1 each draw gets its own exponential SNR, and the statistic is the
    squared norm of ``2*TB`` unit-variance Gaussians whose mean vector has
    squared norm ``2*gamma``.
    """
    dof = 2 * params.time_bandwidth
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    z = rng.standard_normal(shape + (dof,))
    if hyp == "H1":
        gamma = rng.exponential(params.avg_snr_linear, size=shape)
        z[..., 0] += np.sqrt(2.0 * gamma)
    elif hyp != "H0":
        raise ValueError(f"unknown hypothesis {hyp!r}")
    out = np.einsum("...i,...i->...", z, z)
    return float(out) if size is None else out


def sample_statistic(hyp: Hypothesis, params: DetectorParams, rng: np.random.Generator) -> float:
    """Single draw of the detector output under ``hyp``."""
    return sample_statistics(hyp, params, rng)


def local_decide(x, thresholds: Thresholds):
    """Map detector output(s) to local decisions +1, 0 (censor) or -1.

    Upper comparisons are inclusive: ``x == eta1`` gives +1 and ``x == eta0``
    gives 0.
    """
    x_arr = np.asarray(x, dtype=float)
    if thresholds.kind == "conventional":
        out = np.where(x_arr >= thresholds.eta, 1, -1)
    else:
        out = np.where(x_arr >= thresholds.eta1, 1, np.where(x_arr >= thresholds.eta0, CENSOR, -1))
    out = out.astype(np.int8)
    return int(out) if out.ndim == 0 else out
