import numpy as np
import pytest

from censorsense.analytics import MetricReport, censoring_pd, censoring_pfa, avg_error
from censorsense.consensus import NetworkConfig
from censorsense.optimizer import (
    GridSpec,
    compute_gains,
    optimize_censoring,
    optimize_conventional,
    optimized_comparison,
)
from censorsense.sensing import DetectorParams, Thresholds, local_probs

DET = DetectorParams(5, 2.0)
SMALL = GridSpec(0.0, 30.0, 1.0)


def _report(p_e, energy, overhead):
    return MetricReport(p_d=1 - p_e, p_fa=p_e, p_e=p_e, avg_energy=energy, avg_overhead=overhead, expected_censor_count=0.0)


def test_grid_spec():
    assert GridSpec().size == 601
    assert GridSpec().axis()[103] == 10.3
    assert GridSpec(2.0, 2.0, 0.5).size == 1
    with pytest.raises(ValueError):
        GridSpec(0, 10, 0)
    with pytest.raises(ValueError):
        GridSpec(5, 1, 0.1)
    with pytest.raises(ValueError):
        GridSpec(0, 1000, 0.01)


def test_singleton_grid():
    grid = GridSpec(10.0, 10.0, 1.0)
    cfg = NetworkConfig(21, 0.8, 2)
    conv = optimize_conventional(cfg, DET, grid)
    cens = optimize_censoring(cfg, DET, grid)
    assert conv.thresholds.eta == 10.0
    assert (cens.thresholds.eta0, cens.thresholds.eta1) == (10.0, 10.0)
    assert cens.p_e == conv.p_e


def test_two_point_grid_is_exhaustive():
    grid = GridSpec(8.0, 12.0, 4.0)
    cfg = NetworkConfig(21, 0.8, 2)
    best = optimize_censoring(cfg, DET, grid)
    candidates = []
    for lo, hi in ((8.0, 8.0), (8.0, 12.0), (12.0, 12.0)):
        probs = local_probs(Thresholds.censoring(lo, hi), DET)
        candidates.append(avg_error(censoring_pd(cfg, probs), censoring_pfa(cfg, probs)))
    assert best.p_e == pytest.approx(min(candidates), abs=1e-12)


def test_optimum_is_feasible_and_bounded():
    for k in (1, 5):
        cfg = NetworkConfig(51, 0.8, k, prior_h0=0.3, prior_h1=0.7)
        conv = optimize_conventional(cfg, DET, SMALL)
        cens = optimize_censoring(cfg, DET, SMALL)
        assert cens.p_e <= conv.p_e
        assert conv.p_e <= min(cfg.prior_h0, cfg.prior_h1) + 1e-12
        assert cens.thresholds.eta0 <= cens.thresholds.eta1
        probs = local_probs(cens.thresholds, DET)
        assert censoring_pd(cfg, probs) == pytest.approx(cens.p_d, abs=1e-12)


def test_grid_minimum_against_direct_scan():
    cfg = NetworkConfig(31, 0.6, 3)
    grid = GridSpec(4.0, 20.0, 2.0)
    best = optimize_censoring(cfg, DET, grid)
    axis = grid.axis()
    scan = min(
        avg_error(censoring_pd(cfg, pr), censoring_pfa(cfg, pr))
        for i, lo in enumerate(axis)
        for hi in axis[i:]
        for pr in [local_probs(Thresholds.censoring(lo, hi), DET)]
    )
    assert best.p_e == pytest.approx(scan, abs=1e-12)


def test_deterministic():
    cfg = NetworkConfig(51, 0.8, 2)
    assert optimize_censoring(cfg, DET, SMALL) == optimize_censoring(cfg, DET, SMALL)


def test_compute_gains():
    same = _report(0.2, 0.7, 3.0)
    assert compute_gains(same, same).error == 0.0
    gains = compute_gains(_report(0.30, 1.0, 10.0), _report(0.16, 0.5, 4.0))
    assert gains.error == pytest.approx(46.6666666667, abs=1e-9)
    assert gains.energy == pytest.approx(50.0)
    assert gains.overhead == pytest.approx(60.0)
    with pytest.raises(ZeroDivisionError):
        compute_gains(_report(0.0, 1.0, 1.0), _report(0.0, 1.0, 1.0))


def test_optimized_comparison_small_grid():
    cfg = NetworkConfig(51, 0.8, 4)
    conv, cens, conv_m, cens_m, gains = optimized_comparison(cfg, DET, SMALL)
    assert conv_m.avg_energy == 1.0
    assert cens_m.avg_energy <= 1.0
    assert gains.error >= 0
    assert np.isclose(cens_m.p_e, cens.p_e, atol=1e-12)
