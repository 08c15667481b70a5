import math

import numpy as np
import pytest
from scipy.integrate import quad

from edge_atlas.errors import (
    CorrelationLengthUndefined,
    DegenerateDistributionError,
    DomainError,
    UnsupportedActivationError,
)
from edge_atlas.gaussian_calculus import (
    SWISH,
    TANH,
    GaussianSpec,
    QuadratureRule,
    chi,
    chi_tilde,
    chi_tilde_cubic,
    correlation_length,
    entropy_minimum_variance,
    get_activation,
    post_density,
    pre_density,
    relative_entropy_uniform,
    variance_map,
)

PI2_12 = math.pi**2 / 12.0


# ---------------------------------------------------------------------------
# Quadrature rule
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("order", [20, 40, 80, 160])
def test_rule_normalization(order):
    rule = QuadratureRule.gauss_hermite(order)
    assert rule.order == order
    assert abs(rule.expect(lambda z: np.ones_like(z)) - 1.0) < 1e-12
    assert abs(rule.expect(lambda z: z * z) - 1.0) < 1e-10


def test_rule_rejects_tiny_order():
    with pytest.raises(DomainError):
        QuadratureRule.gauss_hermite(1)


@pytest.mark.parametrize("q", [0.1, 0.359, 0.57, 0.8, PI2_12])
def test_quadrature_convergence(q):
    # doubling the order must not move the core integrals by more than 1e-8
    # at the variances the acceptance criteria probe (the rule's error does
    # grow for sigma^2 >> 1, where only solver self-consistency is claimed)
    lo = QuadratureRule.gauss_hermite(80)
    hi = QuadratureRule.gauss_hermite(160)
    spec = GaussianSpec(q)
    assert abs(variance_map(spec, TANH, lo) - variance_map(spec, TANH, hi)) < 1e-8
    assert abs(chi(1.7, q, TANH, lo) - chi(1.7, q, TANH, hi)) < 1e-8
    assert abs(chi_tilde(1.7, q, TANH, lo) - chi_tilde(1.7, q, TANH, hi)) < 1e-8


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("act", [TANH, SWISH], ids=lambda a: a.name)
def test_derivatives_match_finite_differences(act):
    z = np.linspace(-5.0, 5.0, 41)
    h = 1e-6
    fd1 = (act.phi(z + h) - act.phi(z - h)) / (2 * h)
    scale = np.maximum(np.abs(fd1), 1e-3)
    assert np.all(np.abs(act.dphi(z) - fd1) / scale < 1e-6)
    fd2 = (act.dphi(z + h) - act.dphi(z - h)) / (2 * h)
    scale = np.maximum(np.abs(fd2), 1e-3)
    assert np.all(np.abs(act.ddphi(z) - fd2) / scale < 1e-6)


def test_tanh_second_derivative_identity():
    z = np.linspace(-6.0, 6.0, 61)
    lhs = TANH.ddphi(z)
    rhs = -2.0 * TANH.phi(z) * TANH.dphi(z)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_activation_registry():
    assert get_activation("tanh") is TANH
    assert get_activation("swish") is SWISH
    with pytest.raises(UnsupportedActivationError):
        get_activation("relu")


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

def test_pre_density_closed_form_and_symmetry():
    assert pre_density(0.0, GaussianSpec(1.0)) == pytest.approx(
        1.0 / math.sqrt(2 * math.pi), abs=1e-12
    )
    assert pre_density(1.3, GaussianSpec(2.0)) == pre_density(-1.3, GaussianSpec(2.0))


def test_pre_density_normalization_quad_oracle():
    v = 0.57
    s = math.sqrt(v)
    total, err = quad(lambda z: pre_density(z, GaussianSpec(v)), -8 * s, 8 * s)
    assert abs(total - 1.0) < 1e-9


def test_pre_density_zero_variance_error():
    with pytest.raises(DegenerateDistributionError):
        pre_density(0.0, GaussianSpec(0.0))


def test_post_density_center_and_symmetry():
    spec = GaussianSpec(1.0)
    assert post_density(0.0, spec) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-12)
    assert post_density(0.5, spec) == post_density(-0.5, spec)


def test_post_density_normalization_substitution_oracle():
    # integrate in z via x = tanh(z): dx = sech^2(z) dz kills the endpoint
    # singularities that break x-space quadrature
    v = PI2_12

    def integrand(z):
        x = math.tanh(z)
        return post_density(x, GaussianSpec(v)) * (1.0 - x * x)

    # |z| < 18 keeps tanh(z) strictly below 1 in float64; the Gaussian mass
    # beyond is ~ exp(-190)
    total, _ = quad(integrand, -18, 18, limit=200)
    assert abs(total - 1.0) < 1e-6


def test_post_density_domain_and_activation_errors():
    with pytest.raises(UnsupportedActivationError):
        post_density(0.0, GaussianSpec(1.0), SWISH)
    with pytest.raises(DomainError):
        post_density(1.0, GaussianSpec(1.0))
    with pytest.raises(DomainError):
        post_density(-1.2, GaussianSpec(1.0))


# ---------------------------------------------------------------------------
# Variance map
# ---------------------------------------------------------------------------

def test_variance_map_at_zero():
    assert variance_map(GaussianSpec(0.0), TANH) == 0.0
    assert variance_map(GaussianSpec(0.0), SWISH) == 0.0


def test_variance_map_uniformity_constant():
    assert variance_map(GaussianSpec(PI2_12), TANH) == pytest.approx(0.359, abs=2e-3)


def test_variance_map_monte_carlo_oracle():
    rng = np.random.default_rng(42)
    n = 10_000_000
    samples = np.tanh(rng.standard_normal(n)) ** 2
    mc = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n))
    v = variance_map(GaussianSpec(1.0), TANH)
    assert 0.0 < v < 1.0
    assert abs(v - mc) < 3 * se


@pytest.mark.parametrize("q", [0.05, 0.1, PI2_12, 1.0, 2.0, 5.0, 10.0])
def test_variance_map_contracts(q):
    v = variance_map(GaussianSpec(q), TANH)
    assert v < q
    assert v < 1.0
    assert v >= 0.0


# ---------------------------------------------------------------------------
# Relative entropy
# ---------------------------------------------------------------------------

def _entropy_numeric(v: float) -> float:
    # S = int_{-1}^{1} (1/2) ln((1/2)/p_phi(x)) dx, via x = tanh(z) with the
    # log expanded analytically so the tails stay finite
    def integrand(z):
        az = abs(z)
        log_sech2 = 2.0 * (math.log(2.0) - az - math.log1p(math.exp(-2.0 * az)))
        log_p = -z * z / (2.0 * v) - 0.5 * math.log(2 * math.pi * v) - log_sech2
        sech2 = math.exp(log_sech2)
        return 0.5 * (math.log(0.5) - log_p) * sech2

    val, _ = quad(integrand, -40, 40, limit=400)
    return val


@pytest.mark.parametrize("v", [0.1, 0.3, PI2_12, 2.0, 5.0, 10.0])
def test_relative_entropy_closed_form_vs_numeric(v):
    closed = relative_entropy_uniform(GaussianSpec(v))
    assert abs(closed - _entropy_numeric(v)) < 1e-6


def test_relative_entropy_minimum_location_and_value():
    assert entropy_minimum_variance() == PI2_12
    # numerical argmin of the closed form lands on pi^2/12
    grid = np.linspace(0.5, 1.2, 20001)
    vals = [relative_entropy_uniform(GaussianSpec(g)) for g in grid]
    assert grid[int(np.argmin(vals))] == pytest.approx(PI2_12, abs=1e-3)
    expected_min = 0.5 * math.log(2 * math.pi**3 / 3) - 1.5
    got = relative_entropy_uniform(GaussianSpec(PI2_12))
    assert got == pytest.approx(expected_min, abs=1e-12)
    assert got == pytest.approx(0.0144, abs=1e-4)


def test_relative_entropy_ordering_around_minimum():
    s = [relative_entropy_uniform(GaussianSpec(v)) for v in (0.2, PI2_12, 4.0)]
    assert s[1] < s[0] and s[1] < s[2]


def test_relative_entropy_zero_variance_error():
    with pytest.raises(DomainError):
        relative_entropy_uniform(GaussianSpec(0.0))


# ---------------------------------------------------------------------------
# chi, chi_tilde, correlation length
# ---------------------------------------------------------------------------

def test_chi_anchor_values():
    assert chi(1.0, 0.0, TANH) == pytest.approx(1.0, abs=1e-14)
    assert chi(0.0, 3.0, TANH) == 0.0
    assert chi(1.76, 0.57, TANH) == pytest.approx(1.0, abs=0.02)
    # phi'(0)^2 scaling holds for swish too
    assert chi(2.0, 0.0, SWISH) == pytest.approx(2.0 * 0.25, abs=1e-14)


def test_chi_strictly_decreasing_in_variance_for_tanh():
    qs = np.linspace(0.0, 4.0, 30)
    vals = [chi(1.5, q, TANH) for q in qs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_chi_tilde_zero_at_origin():
    assert chi_tilde(1.0, 0.0, TANH) == pytest.approx(0.0, abs=1e-14)


def test_chi_tilde_bound():
    rng = np.random.default_rng(7)
    for _ in range(20):
        w2 = float(rng.uniform(0.2, 4.0))
        q = float(rng.uniform(0.05, 3.0))
        ct = chi_tilde(w2, q, TANH)
        assert 0.0 <= ct <= 2.0 * w2 * q + 1e-12
    ct = chi_tilde(3.0, 1.5, TANH)
    assert 0.0 <= ct <= 2.0 * 3.0 * 1.5


def test_chi_tilde_two_integral_forms_agree():
    assert abs(chi_tilde(2.0, 0.8, TANH) - chi_tilde_cubic(2.0, 0.8)) < 1e-8
    with pytest.raises(DomainError):
        chi_tilde_cubic(2.0, 0.0)


@pytest.mark.parametrize("w2,q", [(1.76, 0.5695), (2.0, 0.82), (3.0, 0.3), (1.2, 1.1)])
def test_variance_map_derivative_identity(w2, q):
    # sigma_w^2 * d(variance_map)/d(sigma^2) == chi - chi_tilde
    h = 1e-5
    lhs = w2 * (
        variance_map(GaussianSpec(q + h), TANH) - variance_map(GaussianSpec(q - h), TANH)
    ) / (2 * h)
    rhs = chi(w2, q, TANH) - chi_tilde(w2, q, TANH)
    assert abs(lhs - rhs) < 1e-5


def test_correlation_length():
    assert correlation_length(math.exp(-1.0)) == pytest.approx(1.0, abs=1e-12)
    assert correlation_length(0.5) == pytest.approx(1.0 / math.log(2.0), abs=1e-12)
    with pytest.raises(CorrelationLengthUndefined):
        correlation_length(1.0)
    with pytest.raises(CorrelationLengthUndefined):
        correlation_length(1.3)
    with pytest.raises(DomainError):
        correlation_length(0.0)
    with pytest.raises(DomainError):
        correlation_length(-0.5)


def test_gaussian_spec_validation():
    with pytest.raises(DomainError):
        GaussianSpec(-1.0)
    with pytest.raises(DomainError):
        GaussianSpec(float("nan"))
    assert GaussianSpec(2.0).mean == 0.0
