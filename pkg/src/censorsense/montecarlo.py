"""Monte Carlo estimation of the network metrics and exact enumeration on tiny networks.

Trials are simulated in fixed-size blocks. Every block draws from its own
stream derived from ``(seed, hypothesis, block index)``, so estimates do not
depend on how many workers process the blocks or in which order.

Inside a block the ``K`` per-step graphs of one trial are summarised by their
link counts ``N_ij = sum_t a_ij(t)``, which are independent Binomial(K, p)
per unordered pair. The vote statistic only depends on these counts, so this
is the same distribution as drawing ``K`` graphs one by one (as
:func:`censorsense.consensus.run_consensus` does) at a fraction of the cost.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .consensus import NetworkConfig, TiePolicy, decide, vote_statistics
from .sensing import DetectorParams, LocalDecisionProbs, Thresholds, local_decide, sample_statistics

Mode = Literal["decision_level", "signal_level"]

BLOCK_SIZE = 512
_HYP_INDEX = {"H0": 0, "H1": 1}


@dataclass(frozen=True)
class SimEstimate:
    p_d_hat: float
    p_fa_hat: float
    p_e_hat: float
    se_pd: float
    se_pfa: float
    avg_energy_hat: float
    avg_overhead_hat: float
    trials: int
    seed: int


def standard_error(p_hat: float, trials: int) -> float:
    return math.sqrt(max(p_hat * (1 - p_hat), 0.0) / trials)


def block_rng(seed: int, hyp: str, block: int) -> np.random.Generator:
    """Independent stream for one block of trials under one hypothesis."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(_HYP_INDEX[hyp], block))
    return np.random.Generator(np.random.PCG64(ss))


def draw_trits(row, size, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. local decisions with probabilities ``row = (P(+1), P(0), P(-1))``."""
    p1, p0, _ = row
    u = rng.random(size)
    return np.where(u < p1, 1, np.where(u < p1 + p0, 0, -1)).astype(np.int8)


def sample_link_counts(batch: int, m: int, k: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Symmetric ``(batch, m, m)`` link counts accumulated over ``k`` Bernoulli(p) graphs."""
    iu = np.triu_indices(m, 1)
    counts = np.zeros((batch, m, m), dtype=np.float64)
    draws = rng.binomial(k, p, size=(batch, len(iu[0])))
    counts[:, iu[0], iu[1]] = draws
    counts[:, iu[1], iu[0]] = draws
    return counts


def _simulate_block(cfg, hyp, size, rng, mode, row, det, thr):
    if mode == "decision_level":
        trits = draw_trits(row, (size, cfg.m), rng)
    else:
        trits = local_decide(sample_statistics(hyp, det, rng, (size, cfg.m)), thr)
    counts = sample_link_counts(size, cfg.m, cfg.k, cfg.p, rng)
    final = decide(vote_statistics(trits, counts, cfg.k, cfg.p), cfg.tie_policy)
    global_ones = int(np.all(final == 1, axis=1).sum())
    senders = int(np.count_nonzero(trits))
    return global_ones, senders


def _run_hypothesis(cfg, hyp, trials, seed, mode, row, det, thr, workers):
    blocks = [(b, min(BLOCK_SIZE, trials - b * BLOCK_SIZE)) for b in range(math.ceil(trials / BLOCK_SIZE))]

    def job(item):
        index, size = item
        return _simulate_block(cfg, hyp, size, block_rng(seed, hyp, index), mode, row, det, thr)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, blocks))
    else:
        results = [job(item) for item in blocks]
    ones = sum(r[0] for r in results)
    senders = sum(r[1] for r in results)
    return ones / trials, senders / (trials * cfg.m)


def simulate(
    cfg: NetworkConfig,
    probs: LocalDecisionProbs | None = None,
    trials: int = 20_000,
    seed: int = 0,
    mode: Mode = "decision_level",
    det: DetectorParams | None = None,
    thr: Thresholds | None = None,
    workers: int = 1,
    e_unit: float = 1.0,
) -> SimEstimate:
    """Estimate detection, false alarm, error, energy and overhead by simulation.

    ``decision_level`` draws local decisions straight from ``probs``;
    ``signal_level`` draws detector outputs and thresholds them with ``thr``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if mode == "decision_level":
        if probs is None:
            raise ValueError("decision_level mode needs local decision probabilities")
    elif mode == "signal_level":
        if det is None or thr is None:
            raise ValueError("signal_level mode needs detector parameters and thresholds")
    else:
        raise ValueError(f"unknown simulation mode {mode!r}")

    results = {}
    for hyp in ("H1", "H0"):
        row = probs.row(hyp) if probs is not None else None
        results[hyp] = _run_hypothesis(cfg, hyp, trials, seed, mode, row, det, thr, workers)
    p_d, send_h1 = results["H1"]
    p_fa, send_h0 = results["H0"]
    send = cfg.prior_h0 * send_h0 + cfg.prior_h1 * send_h1
    return SimEstimate(
        p_d_hat=p_d,
        p_fa_hat=p_fa,
        p_e_hat=cfg.prior_h0 * p_fa + cfg.prior_h1 * (1 - p_d),
        se_pd=standard_error(p_d, trials),
        se_pfa=standard_error(p_fa, trials),
        avg_energy_hat=send * e_unit,
        avg_overhead_hat=send * cfg.k,
        trials=trials,
        seed=seed,
    )


def brute_force_exact(
    m: int,
    k: int,
    p: float,
    probs: LocalDecisionProbs,
    tie_policy: TiePolicy = "one_on_tie",
) -> tuple[float, float]:
    """Exact (P_d, P_fa) by enumerating every initial assignment and every per-step graph.

    Only feasible for ``m <= 4`` and ``k <= 2``.
    """
    if not (1 <= m <= 4 and 1 <= k <= 2):
        raise ValueError(f"enumeration limited to m <= 4 and k <= 2, got m={m}, k={k}")
    if not 0 < p <= 1:
        raise ValueError(f"link probability must lie in (0, 1], got {p}")
    iu = np.triu_indices(m, 1)
    n_edges = len(iu[0])
    patterns = list(itertools.product((0, 1), repeat=k * n_edges))
    bits = np.array(patterns, dtype=np.int64).reshape(len(patterns), k, n_edges)
    on = bits.sum(axis=(1, 2))
    graph_weight = p**on * (1 - p) ** (k * n_edges - on)
    counts = np.zeros((len(bits), m, m))
    counts[:, iu[0], iu[1]] = bits.sum(axis=1)
    counts[:, iu[1], iu[0]] = bits.sum(axis=1)

    assignments = np.array(list(itertools.product((1, 0, -1), repeat=m)), dtype=np.int8)
    votes = vote_statistics(assignments[:, None, :], counts[None, :, :, :], k, p)
    agree = np.all(decide(votes, tie_policy) == 1, axis=2)  # (assignment, graph)
    agree_prob = agree.astype(float) @ graph_weight

    out = []
    for hyp in ("H1", "H0"):
        lookup = dict(zip((1, 0, -1), probs.row(hyp)))
        weight = np.array([math.prod(lookup[int(b)] for b in a) for a in assignments])
        out.append(float(weight @ agree_prob))
    return out[0], out[1]
