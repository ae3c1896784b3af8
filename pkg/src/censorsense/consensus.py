"""Diversity-based binary consensus over per-step Bernoulli random graphs.

Every node rebroadcasts its initial decision at each of the ``K`` steps. At
the end node ``i`` forms

    y_i = (1/M) * (b_i(0) + 1/(K p) * sum_t sum_j a_ij(t) b_j(0))

and decides 1 when ``y_i`` is nonnegative (or strictly positive, depending on
the tie policy). Censoring nodes (initial decision 0) transmit nothing but
still form ``y_i`` and decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

TiePolicy = Literal["one_on_tie", "zero_on_tie"]

# Vote sums are integers scaled by 1/(Kp); anything this close to zero is a
# true tie carrying float residue from the division.
TIE_ATOL = 1e-9


@dataclass(frozen=True)
class NetworkConfig:
    """Network size, link probability, horizon, tie policy and priors."""

    m: int = 51
    p: float = 0.8
    k: int = 1
    tie_policy: TiePolicy = "one_on_tie"
    prior_h0: float = 0.5
    prior_h1: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not 0 < self.p <= 1:
            raise ValueError(f"link probability must lie in (0, 1], got {self.p}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"horizon k must be an integer >= 1, got {self.k}")
        if self.tie_policy not in ("one_on_tie", "zero_on_tie"):
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")
        if not (0 <= self.prior_h0 <= 1 and 0 <= self.prior_h1 <= 1):
            raise ValueError("priors must be probabilities")
        if abs(self.prior_h0 + self.prior_h1 - 1) > 1e-12:
            raise ValueError(f"priors must sum to 1, got {self.prior_h0} + {self.prior_h1}")

    def with_k(self, k: int) -> "NetworkConfig":
        return NetworkConfig(self.m, self.p, k, self.tie_policy, self.prior_h0, self.prior_h1)


@dataclass(frozen=True)
class ConsensusRun:
    initial: np.ndarray
    votes: np.ndarray
    final: np.ndarray
    steps: int


def sample_graph(m: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Symmetric boolean adjacency with zero diagonal; each pair linked w.p. ``p``."""
    if not 0 < p <= 1:
        raise ValueError(f"link probability must lie in (0, 1], got {p}")
    iu = np.triu_indices(m, 1)
    adj = np.zeros((m, m), dtype=bool)
    adj[iu] = rng.random(len(iu[0])) < p
    return adj | adj.T


def decide(votes, tie_policy: TiePolicy = "one_on_tie"):
    """Final decision bits from vote statistics."""
    votes = np.asarray(votes, dtype=float)
    tie = np.abs(votes) <= TIE_ATOL
    if tie_policy == "one_on_tie":
        return ((votes > 0) | tie).astype(np.int8)
    if tie_policy == "zero_on_tie":
        return ((votes > 0) & ~tie).astype(np.int8)
    raise ValueError(f"unknown tie policy {tie_policy!r}")


def vote_statistics(initial, link_counts, k: int, p: float, m: int | None = None):
    """Votes ``y_i`` from initial trits and link counts ``N_ij = sum_t a_ij(t)``.

    Broadcasts over leading batch axes: ``initial`` is ``(..., M)`` and
    ``link_counts`` is ``(..., M, M)``.
    """
    b = np.asarray(initial, dtype=float)
    m = b.shape[-1] if m is None else m
    received = np.einsum("...ij,...j->...i", np.asarray(link_counts, dtype=float), b)
    return (b + received / (k * p)) / m


def run_consensus(initial, cfg: NetworkConfig, rng: np.random.Generator) -> ConsensusRun:
    """Run the protocol once with ``cfg.k`` independent graph realizations."""
    b = np.asarray(initial, dtype=np.int8)
    if b.shape != (cfg.m,):
        raise ValueError(f"expected {cfg.m} initial decisions, got shape {b.shape}")
    if not np.isin(b, (-1, 0, 1)).all():
        raise ValueError("initial decisions must be -1, 0 or +1")
    counts = np.zeros((cfg.m, cfg.m), dtype=np.int64)
    for _ in range(cfg.k):
        counts += sample_graph(cfg.m, cfg.p, rng)
    votes = vote_statistics(b, counts, cfg.k, cfg.p)
    return ConsensusRun(initial=b, votes=votes, final=decide(votes, cfg.tie_policy), steps=cfg.k)


def global_and(final) -> int:
    """1 iff every node decided 1."""
    final = np.asarray(final)
    if final.size == 0:
        raise ValueError("global_and needs at least one decision")
    return int(np.all(final == 1))


def count_transmissions(initial, k: int) -> int:
    """Messages sent over ``k`` steps; censoring nodes send none."""
    if k < 1:
        raise ValueError(f"horizon must be >= 1, got {k}")
    return int(k * np.count_nonzero(np.asarray(initial)))
