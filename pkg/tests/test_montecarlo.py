import math

import numpy as np
import pytest

from censorsense.analytics import avg_energy, avg_overhead
from censorsense.consensus import NetworkConfig
from censorsense.montecarlo import (
    block_rng,
    brute_force_exact,
    draw_trits,
    sample_link_counts,
    simulate,
    standard_error,
)
from censorsense.sensing import DetectorParams, LocalDecisionProbs, Thresholds, local_probs

FIG3_DET = DetectorParams(5, 2.0)
FIG3_THR = Thresholds.censoring(7.0, 14.6)
FIG3_CENS = local_probs(FIG3_THR, FIG3_DET)


def test_degenerate_rows_give_exact_answers():
    probs = LocalDecisionProbs.from_rows((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    est = simulate(NetworkConfig(15, 0.4, 2), probs, trials=2000, seed=1)
    assert est.p_d_hat == 1.0
    assert est.p_fa_hat == 0.0
    assert est.p_e_hat == 0.0
    assert est.se_pd == est.se_pfa == 0.0


def test_all_censor_follows_tie_policy():
    probs = LocalDecisionProbs.from_rows((0.0, 1.0, 0.0), (0.0, 1.0, 0.0))
    one = simulate(NetworkConfig(10, 0.5, 1, "one_on_tie"), probs, trials=500)
    zero = simulate(NetworkConfig(10, 0.5, 1, "zero_on_tie"), probs, trials=500)
    assert one.p_d_hat == one.p_fa_hat == 1.0
    assert zero.p_d_hat == zero.p_fa_hat == 0.0
    assert one.avg_energy_hat == one.avg_overhead_hat == 0.0


def test_same_seed_reproduces_and_workers_do_not_matter():
    cfg = NetworkConfig(21, 0.7, 3)
    a = simulate(cfg, FIG3_CENS, trials=3000, seed=42)
    b = simulate(cfg, FIG3_CENS, trials=3000, seed=42)
    c = simulate(cfg, FIG3_CENS, trials=3000, seed=42, workers=3)
    d = simulate(cfg, FIG3_CENS, trials=3000, seed=43)
    assert a == b == c
    assert a != d


def test_block_streams_are_distinct():
    x = block_rng(0, "H1", 0).random(4)
    assert not np.array_equal(x, block_rng(0, "H0", 0).random(4))
    assert not np.array_equal(x, block_rng(0, "H1", 1).random(4))
    assert not np.array_equal(x, block_rng(1, "H1", 0).random(4))
    assert np.array_equal(x, block_rng(0, "H1", 0).random(4))


def test_draw_trits_frequencies():
    rng = np.random.default_rng(0)
    row = (0.2, 0.5, 0.3)
    n = 10**6
    trits = draw_trits(row, n, rng)
    for value, prob in zip((1, 0, -1), row):
        assert abs(np.mean(trits == value) - prob) <= 3 * math.sqrt(prob * (1 - prob) / n)


def test_link_counts_shape_and_law():
    rng = np.random.default_rng(1)
    counts = sample_link_counts(20_000, 5, 4, 0.3, rng)
    assert counts.shape == (20_000, 5, 5)
    assert np.array_equal(counts, counts.transpose(0, 2, 1))
    assert not counts[:, range(5), range(5)].any()
    assert counts.max() <= 4
    sample = counts[:, 0, 1]
    assert abs(sample.mean() - 1.2) <= 4 * math.sqrt(4 * 0.3 * 0.7 / 20_000)
    assert sample.var() == pytest.approx(4 * 0.3 * 0.7, rel=0.05)


def test_decision_and_signal_level_agree():
    cfg = NetworkConfig(21, 0.8, 2)
    n = 20_000
    dec = simulate(cfg, FIG3_CENS, trials=n, seed=3)
    sig = simulate(cfg, trials=n, seed=4, mode="signal_level", det=FIG3_DET, thr=FIG3_THR)
    for a, b, sa, sb in ((dec.p_d_hat, sig.p_d_hat, dec.se_pd, sig.se_pd), (dec.p_fa_hat, sig.p_fa_hat, dec.se_pfa, sig.se_pfa)):
        assert abs(a - b) <= 3 * math.hypot(sa, sb) + 1e-12


def test_mode_argument_checks():
    cfg = NetworkConfig(5, 0.5, 1)
    with pytest.raises(ValueError):
        simulate(cfg, None, trials=10)
    with pytest.raises(ValueError):
        simulate(cfg, trials=10, mode="signal_level", det=FIG3_DET)
    with pytest.raises(ValueError):
        simulate(cfg, FIG3_CENS, trials=10, mode="graph_level")
    with pytest.raises(ValueError):
        simulate(cfg, FIG3_CENS, trials=0)


def test_energy_and_overhead_estimates():
    cfg = NetworkConfig(11, 0.6, 5, prior_h0=0.4, prior_h1=0.6)
    n = 20_000
    est = simulate(cfg, FIG3_CENS, trials=n, seed=5, e_unit=2.0)
    energy = avg_energy(FIG3_CENS, 0.4, 0.6, 2.0)
    overhead = avg_overhead(FIG3_CENS, 0.4, 0.6, 5)
    # each trial averages m Bernoulli senders, so the per-trial variance is at most 1/(4m)
    se = math.sqrt(0.25 / (cfg.m * n))
    assert abs(est.avg_energy_hat - energy) <= 3 * 2.0 * se
    assert abs(est.avg_overhead_hat - overhead) <= 3 * 5 * se


def test_standard_error():
    assert standard_error(0.5, 100) == 0.05
    assert standard_error(0.0, 100) == 0.0


def test_brute_force_single_node():
    probs = LocalDecisionProbs.from_rows((0.5, 0.3, 0.2), (0.15, 0.35, 0.5))
    assert brute_force_exact(1, 1, 0.5, probs, "one_on_tie") == pytest.approx((0.8, 0.5), abs=1e-15)
    assert brute_force_exact(1, 2, 0.5, probs, "zero_on_tie") == pytest.approx((0.5, 0.15), abs=1e-15)


def test_brute_force_two_nodes_by_hand():
    # two nodes, one step: with the link each node sees b1 + b2/p; without it only its own trit
    p = 0.5
    row = (0.5, 0.3, 0.2)
    probs = LocalDecisionProbs.from_rows(row, row)
    lookup = dict(zip((1, 0, -1), row))
    expected = 0.0
    for b1 in (1, 0, -1):
        for b2 in (1, 0, -1):
            w = lookup[b1] * lookup[b2]
            linked = (b1 + b2 / p >= 0) and (b2 + b1 / p >= 0)
            alone = b1 >= 0 and b2 >= 0
            expected += w * (p * linked + (1 - p) * alone)
    assert brute_force_exact(2, 1, p, probs, "one_on_tie")[0] == pytest.approx(expected, abs=1e-15)


def test_brute_force_size_guard():
    probs = LocalDecisionProbs.from_rows((0.5, 0.3, 0.2), (0.15, 0.35, 0.5))
    with pytest.raises(ValueError):
        brute_force_exact(5, 1, 0.5, probs)
    with pytest.raises(ValueError):
        brute_force_exact(3, 3, 0.5, probs)


def test_brute_force_matches_simulation_uniform_row():
    probs = LocalDecisionProbs.from_rows((1 / 3, 1 / 3, 1 / 3), (1 / 3, 1 / 3, 1 / 3))
    cfg = NetworkConfig(3, 0.5, 1)
    exact, _ = brute_force_exact(3, 1, 0.5, probs)
    n = 100_000
    est = simulate(cfg, probs, trials=n, seed=7)
    assert abs(est.p_d_hat - exact) <= 3 * math.sqrt(exact * (1 - exact) / n)
