import math

import numpy as np
import pytest

from edge_atlas.errors import (
    DegenerateFitError,
    DomainError,
    FitError,
    NoPositiveSolutionError,
)
from edge_atlas.fitting import (
    DatasetStats,
    ThresholdFit,
    analytic_threshold,
    fit_eoc_curve,
    fit_eoc_polynomial,
    fit_threshold,
)
from edge_atlas.phase_map import PhasePoint, eoc_curve

PI2_12 = math.pi**2 / 12.0
MNIST_STATS = DatasetStats(input_variance=0.095, input_mean_sq=0.017)


# ---------------------------------------------------------------------------
# Critical-line polynomial
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def eoc_fit():
    return fit_eoc_curve(w_range=(1.0, 10.0), n_points=50, degree=9)


def test_eoc_fit_constraint_is_exact(eoc_fit):
    assert eoc_fit.evaluate(1.0) == 0.0
    assert eoc_fit.evaluate_derivative(1.0) == 0.0


def test_eoc_fit_reproduces_intersection_value(eoc_fit):
    assert eoc_fit.evaluate(2.0) == pytest.approx(0.104, abs=0.01)


def test_eoc_fit_residual(eoc_fit):
    assert eoc_fit.rms_residual < 1e-3


def test_eoc_fit_matches_direct_fit():
    curve = eoc_curve((1.0, 10.0), 50, spacing="anchor")
    direct = fit_eoc_polynomial(curve.points, degree=9)
    convenience = fit_eoc_curve()
    assert np.allclose(direct.coefficients, convenience.coefficients)


def test_eoc_fit_rank_deficiency():
    pts = [PhasePoint(2.0, 0.1)] * 12
    with pytest.raises(FitError):
        fit_eoc_polynomial(pts, degree=9)
    with pytest.raises(FitError):
        fit_eoc_polynomial([PhasePoint(2.0, 0.1), PhasePoint(3.0, 0.3)], degree=9)


# ---------------------------------------------------------------------------
# Threshold fit
# ---------------------------------------------------------------------------

def _hinge(w, a_max, rate, thr):
    w = np.asarray(w, dtype=np.float64)
    return a_max - rate * np.clip(w - thr, 0.0, None)


def test_threshold_fit_exact_noiseless_recovery():
    w = np.geomspace(1.0, 40.0, 16)
    acc = _hinge(w, 0.9, 0.02, 12.0)
    fit = fit_threshold([(wi, ai, 0.01) for wi, ai in zip(w, acc)])
    assert fit.a_max == pytest.approx(0.9, abs=1e-6)
    assert fit.rate == pytest.approx(0.02, abs=1e-6)
    assert fit.threshold == pytest.approx(12.0, abs=1e-6)


def test_threshold_fit_noisy_self_consistency():
    # Monte-Carlo: reported standard errors must cover the truth at the
    # usual 3-sigma rate
    w = np.geomspace(1.0, 40.0, 16)
    truth = dict(a_max=0.9, rate=0.02, thr=12.0)
    clean = _hinge(w, **{"a_max": 0.9, "rate": 0.02, "thr": 12.0})
    rng = np.random.default_rng(2024)
    hits = {"a_max": 0, "rate": 0, "threshold": 0}
    n_rep = 100
    for _ in range(n_rep):
        noisy = clean + rng.normal(0.0, 0.01, size=len(w))
        fit = fit_threshold(
            [(wi, ai, 0.01) for wi, ai in zip(w, noisy)],
            bootstrap=40,
            bootstrap_seed=int(rng.integers(1 << 31)),
        )
        if abs(fit.a_max - truth["a_max"]) <= 3 * fit.a_max_se:
            hits["a_max"] += 1
        if abs(fit.rate - truth["rate"]) <= 3 * fit.rate_se:
            hits["rate"] += 1
        if abs(fit.threshold - truth["thr"]) <= 3 * fit.threshold_se:
            hits["threshold"] += 1
    # the linear-subproblem errors condition on the fitted threshold, so
    # true 3-SE coverage sits a little under the nominal 99.7%
    for key, count in hits.items():
        assert count >= 90, f"{key}: only {count}/{n_rep} within 3 SE"


def test_threshold_fit_scale_consistency():
    w = np.geomspace(1.0, 40.0, 16)
    acc = _hinge(w, 0.8, 0.015, 10.0)
    rng = np.random.default_rng(5)
    acc = acc + rng.normal(0.0, 0.005, size=len(w))
    base = fit_threshold([(wi, ai, 0.005) for wi, ai in zip(w, acc)])
    k = 3.0
    scaled = fit_threshold([(wi, k * ai, 0.005) for wi, ai in zip(w, acc)])
    assert scaled.a_max == pytest.approx(k * base.a_max, rel=1e-6)
    assert scaled.rate == pytest.approx(k * base.rate, rel=1e-6)
    assert scaled.threshold == pytest.approx(base.threshold, abs=1e-6)


def test_threshold_fit_degenerate_flat_data():
    w = np.linspace(1.0, 40.0, 12)
    with pytest.raises(DegenerateFitError):
        fit_threshold([(wi, 0.5, 0.01) for wi in w])


def test_threshold_fit_degenerate_monotone_rise():
    w = np.linspace(1.0, 40.0, 12)
    with pytest.raises(DegenerateFitError):
        fit_threshold([(wi, 0.3 + 0.01 * wi, 0.01) for wi in w])


def test_threshold_fit_input_validation():
    with pytest.raises(DomainError):
        fit_threshold([(1.0, 0.5, 0.01)] * 3)
    w = np.linspace(1.0, 40.0, 8)
    with pytest.raises(DomainError):
        fit_threshold([(wi, 0.5, 0.0) for wi in w])


# ---------------------------------------------------------------------------
# Analytic thresholds
# ---------------------------------------------------------------------------

def test_analytic_threshold_depth1():
    thr = analytic_threshold(1, 0.0, MNIST_STATS)
    assert thr == pytest.approx(7.35, abs=0.1)
    # affine in sigma_b2 with slope -1/(sigma_0^2 + mu_0^2)
    slope = (analytic_threshold(1, 0.4, MNIST_STATS) - thr) / 0.4
    assert slope == pytest.approx(-1.0 / MNIST_STATS.second_moment, rel=1e-9)
    assert abs(slope) == pytest.approx(8.93, abs=0.05)


def test_analytic_threshold_depth2():
    thr = analytic_threshold(2, 0.0, MNIST_STATS)
    assert thr == pytest.approx(3.5, abs=0.2)
    # and the estimate keeps falling with bias variance
    assert analytic_threshold(2, 0.3, MNIST_STATS) < thr


def test_analytic_threshold_depth_ordering():
    t1 = analytic_threshold(1, 0.0, MNIST_STATS)
    t2 = analytic_threshold(2, 0.0, MNIST_STATS)
    t3 = analytic_threshold(3, 0.0, MNIST_STATS)
    assert t1 > t2 > t3


def test_analytic_threshold_no_solution_past_uniformity_variance():
    with pytest.raises(NoPositiveSolutionError):
        analytic_threshold(1, PI2_12, MNIST_STATS)
    with pytest.raises(NoPositiveSolutionError):
        analytic_threshold(1, 1.0, MNIST_STATS)
    with pytest.raises(NoPositiveSolutionError):
        analytic_threshold(2, 1.0, MNIST_STATS)


def test_dataset_stats_validation():
    with pytest.raises(DomainError):
        DatasetStats(-0.1, 0.0)
