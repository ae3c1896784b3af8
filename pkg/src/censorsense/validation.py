"""Oracle checks: closed forms against simulation and exact enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import analytics
from .consensus import NetworkConfig
from .montecarlo import brute_force_exact, simulate
from .sensing import DetectorParams, LocalDecisionProbs, Thresholds, local_decide, local_probs, sample_statistics

#: Local decision rows used on tiny networks: one censoring, one conventional.
TINY_PROBS = (
    LocalDecisionProbs.from_rows((0.5, 0.3, 0.2), (0.15, 0.35, 0.5)),
    LocalDecisionProbs.from_rows((0.7, 0.0, 0.3), (0.25, 0.0, 0.75)),
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def mc_tolerance(se: float, floor: float = 0.0, n_se: float = 3.0) -> float:
    return max(n_se * se, floor)


def check_sampler(det: DetectorParams, thr: Thresholds, draws: int = 10**6, seed: int = 0) -> list[Check]:
    """Signal-level trit frequencies against ``local_probs`` within 3 binomial SE."""
    probs = local_probs(thr, det)
    rng = np.random.default_rng(seed)
    checks = []
    for hyp in ("H1", "H0"):
        trits = local_decide(sample_statistics(hyp, det, rng, draws), thr)
        for value, expected in zip((1, 0, -1), probs.row(hyp)):
            freq = float(np.mean(trits == value))
            se = np.sqrt(expected * (1 - expected) / draws)
            ok = abs(freq - expected) <= 3 * se
            checks.append(
                Check(f"sampler {thr.kind} {hyp} trit={value:+d}", ok, f"freq={freq:.5f} formula={expected:.5f} 3SE={3 * se:.5f}")
            )
    return checks


def check_brute_force_vs_mc(trials: int = 10**5, seed: int = 0, ms=(2, 3), ks=(1, 2), ps=(0.3, 0.7, 1.0)) -> list[Check]:
    checks = []
    for m, k, p, (pi, probs), tie in itertools.product(ms, ks, ps, enumerate(TINY_PROBS), ("one_on_tie", "zero_on_tie")):
        cfg = NetworkConfig(m, p, k, tie)
        exact = brute_force_exact(m, k, p, probs, tie)
        est = simulate(cfg, probs, trials=trials, seed=seed)
        for label, hat, ex in (("p_d", est.p_d_hat, exact[0]), ("p_fa", est.p_fa_hat, exact[1])):
            se = max(np.sqrt(ex * (1 - ex) / trials), np.sqrt(hat * (1 - hat) / trials))
            ok = abs(hat - ex) <= 3 * se
            checks.append(
                Check(f"mc~exact m={m} k={k} p={p} probs#{pi} {tie} {label}", ok, f"mc={hat:.5f} exact={ex:.5f} 3SE={3 * se:.5f}")
            )
    return checks


def check_closed_form_at_full_connectivity(ms=(2, 3), ks=(1, 2)) -> list[Check]:
    """At p = 1 the Gaussian approximation degenerates to the exact majority rule."""
    checks = []
    for m, k, (pi, probs), tie in itertools.product(ms, ks, enumerate(TINY_PROBS), ("one_on_tie", "zero_on_tie")):
        cfg = NetworkConfig(m, 1.0, k, tie)
        exact = brute_force_exact(m, k, 1.0, probs, tie)
        closed = (analytics.censoring_pd(cfg, probs), analytics.censoring_pfa(cfg, probs))
        err = max(abs(a - b) for a, b in zip(closed, exact))
        checks.append(Check(f"closed~exact p=1 m={m} k={k} probs#{pi} {tie}", err <= 1e-9, f"max|diff|={err:.2e}"))
    return checks


def check_closed_form_vs_mc(
    cfg: NetworkConfig,
    det: DetectorParams,
    censoring: Thresholds,
    conventional: Thresholds,
    k_values,
    trials: int = 20_000,
    seed: int = 0,
    variance_scale: float = 1.0,
) -> list[Check]:
    """Closed forms against simulation, tolerance max(3 SE, 0.02)."""
    checks = []
    for system, thr in (("censoring", censoring), ("conventional", conventional)):
        probs = local_probs(thr, det)
        for k in k_values:
            cfg_k = cfg.with_k(k)
            if system == "censoring":
                closed = [analytics.all_ones_probability(cfg_k, *probs.row(h), variance_scale=variance_scale) for h in ("H1", "H0")]
            else:
                closed = [
                    analytics.conventional_all_ones_probability(cfg_k, probs.row(h)[0], variance_scale=variance_scale)
                    for h in ("H1", "H0")
                ]
            est = simulate(cfg_k, probs, trials=trials, seed=seed)
            for label, a, hat, se in (("p_d", closed[0], est.p_d_hat, est.se_pd), ("p_fa", closed[1], est.p_fa_hat, est.se_pfa)):
                tol = mc_tolerance(se, 0.02)
                checks.append(
                    Check(f"closed~mc {system} k={k} {label}", abs(a - hat) <= tol, f"closed={a:.5f} mc={hat:.5f} tol={tol:.5f}")
                )
    return checks
