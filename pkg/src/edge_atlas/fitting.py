"""Constrained least-squares fits and analytic saturation thresholds.

Two fit families live here. The critical-line polynomial uses the basis
{(sigma_w^2 - 1)^n / n!, n >= 2}, which builds in that the curve passes
through (1, 0) with zero slope. The threshold ("hinge") model

    A(w) = A_max - r * (w - w_thr) * step(w - w_thr)

describes accuracy that holds a plateau and then decays linearly once the
weight variance pushes the first hidden layer into saturation; it is
non-smooth in w_thr, so that parameter is found by grid search plus
golden-section refinement while (A_max, r) come from closed-form weighted
least squares at each candidate threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateFitError,
    DomainError,
    FitError,
    NoPositiveSolutionError,
)
from .gaussian_calculus import (
    Activation,
    GaussianSpec,
    QuadratureRule,
    TANH,
    entropy_minimum_variance,
    variance_map,
)
from .phase_map import PhasePoint, eoc_curve

__all__ = [
    "EocFit",
    "ThresholdFit",
    "DatasetStats",
    "fit_eoc_polynomial",
    "fit_eoc_curve",
    "fit_threshold",
    "analytic_threshold",
]


# ---------------------------------------------------------------------------
# Critical-line polynomial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EocFit:
    """Coefficients c_n of sum_{n=2}^{degree} c_n/n! (sigma_w^2 - 1)^n.

    The basis has no n = 0, 1 terms, so the fitted curve is exactly zero
    with exactly zero slope at sigma_w^2 = 1, whatever the data.
    """

    coefficients: np.ndarray  # c_2 .. c_degree
    fit_range: Tuple[float, float]
    rms_residual: float

    @property
    def degree(self) -> int:
        return len(self.coefficients) + 1

    def evaluate(self, sigma_w2) -> np.ndarray | float:
        x = np.asarray(sigma_w2, dtype=np.float64) - 1.0
        out = np.zeros_like(x)
        for n, c in enumerate(self.coefficients, start=2):
            out = out + c / math.factorial(n) * x**n
        return float(out) if out.ndim == 0 else out

    def evaluate_derivative(self, sigma_w2) -> np.ndarray | float:
        x = np.asarray(sigma_w2, dtype=np.float64) - 1.0
        out = np.zeros_like(x)
        for n, c in enumerate(self.coefficients, start=2):
            out = out + c / math.factorial(n - 1) * x ** (n - 1)
        return float(out) if out.ndim == 0 else out


def fit_eoc_polynomial(
    points: Sequence[PhasePoint] | Sequence[Tuple[float, float]],
    degree: int = 9,
) -> EocFit:
    """Least squares for the critical line in the constrained basis."""
    ws, bs = [], []
    for p in points:
        if isinstance(p, PhasePoint):
            ws.append(p.sigma_w2)
            bs.append(p.sigma_b2)
        else:
            ws.append(float(p[0]))
            bs.append(float(p[1]))
    ws = np.asarray(ws)
    bs = np.asarray(bs)
    n_basis = degree - 1
    if len(np.unique(ws)) < n_basis:
        raise FitError(
            f"degree-{degree} fit needs at least {n_basis} distinct points, "
            f"got {len(np.unique(ws))}"
        )
    design = np.stack(
        [(ws - 1.0) ** n / math.factorial(n) for n in range(2, degree + 1)],
        axis=1,
    )
    coef, _, rank, _ = np.linalg.lstsq(design, bs, rcond=None)
    if rank < n_basis:
        raise FitError(f"design matrix rank {rank} < {n_basis}: points too degenerate")
    resid = design @ coef - bs
    return EocFit(
        coefficients=coef,
        fit_range=(float(ws.min()), float(ws.max())),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
    )


def fit_eoc_curve(
    act: Activation = TANH,
    w_range: Tuple[float, float] = (1.0, 10.0),
    n_points: int = 50,
    degree: int = 9,
    rule: QuadratureRule | None = None,
) -> EocFit:
    """Sample the critical line and fit it in one step.

    Sampling is anchor-clustered: the constrained basis pins the fit at
    sigma_w^2 = 1, and a uniform grid starves the takeoff region, which
    both inflates the low-order coefficients and leaves the residual
    dominated by the far end of the range.
    """
    curve = eoc_curve(w_range, n_points, act, rule, spacing="anchor")
    return fit_eoc_polynomial(curve.points, degree=degree)


# ---------------------------------------------------------------------------
# Threshold (hinge) fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdFit:
    """Plateau-then-linear-decay fit with per-parameter standard errors.

    a_max_se and rate_se come from the weighted least-squares covariance
    of the linear subproblem at the optimal threshold; threshold_se from a
    parametric bootstrap (resampling accuracies within their quoted
    standard deviations).
    """

    a_max: float
    rate: float
    threshold: float
    a_max_se: float
    rate_se: float
    threshold_se: float

    def evaluate(self, sigma_w2) -> np.ndarray | float:
        w = np.asarray(sigma_w2, dtype=np.float64)
        out = self.a_max - self.rate * np.clip(w - self.threshold, 0.0, None)
        return float(out) if out.ndim == 0 else out


def _hinge_subfit(
    w: np.ndarray, a: np.ndarray, weights: np.ndarray, thr: float
):
    """WLS for (a_max, rate) at fixed threshold. Returns (params, sse, cov)."""
    g = np.clip(w - thr, 0.0, None)
    design = np.stack([np.ones_like(w), -g], axis=1)
    dtw = design.T * weights
    normal = dtw @ design
    if np.linalg.matrix_rank(normal) < 2:
        return None, np.inf, None
    cov = np.linalg.inv(normal)
    beta = cov @ (dtw @ a)
    r = design @ beta - a
    return beta, float(np.sum(weights * r * r)), cov


def _hinge_solve(w: np.ndarray, a: np.ndarray, weights: np.ndarray):
    """Grid over candidate thresholds, then golden-section refinement."""
    candidates = np.unique(np.concatenate([w[1:-1], 0.5 * (w[:-1] + w[1:])]))
    best_thr, best_sse = None, np.inf
    for thr in candidates:
        _, sse, _ = _hinge_subfit(w, a, weights, float(thr))
        if sse < best_sse:
            best_thr, best_sse = float(thr), sse
    if best_thr is None:
        raise DegenerateFitError("all candidate thresholds gave singular subfits")

    # refine between the grid neighbours of the best candidate
    lo = float(w[w < best_thr].max(initial=w[0]))
    hi = float(w[w > best_thr].min(initial=w[-1]))
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1 = _hinge_subfit(w, a, weights, x1)[1]
    f2 = _hinge_subfit(w, a, weights, x2)[1]
    for _ in range(80):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = _hinge_subfit(w, a, weights, x1)[1]
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = _hinge_subfit(w, a, weights, x2)[1]
    thr = 0.5 * (lo + hi)
    beta, sse, cov = _hinge_subfit(w, a, weights, thr)
    if sse > best_sse:  # refinement may not beat the discrete optimum
        thr = best_thr
        beta, sse, cov = _hinge_subfit(w, a, weights, thr)
    return thr, beta, sse, cov


def fit_threshold(
    data: Iterable[Tuple[float, float, float]],
    bootstrap: int = 200,
    bootstrap_seed: int = 0,
) -> ThresholdFit:
    """Weighted fit of the hinge model to (sigma_w^2, accuracy, accuracy_std).

    Needs at least 5 points spanning both sides of a knee. Raises
    DegenerateFitError, with diagnostics in the message, when the data do
    not bend (flat or monotone without an interior knee) or when the decay
    rate comes out non-positive.
    """
    rows = sorted((float(w), float(a), float(s)) for w, a, s in data)
    if len(rows) < 5:
        raise DomainError(f"need at least 5 points, got {len(rows)}")
    w = np.array([r[0] for r in rows])
    a = np.array([r[1] for r in rows])
    std = np.array([r[2] for r in rows])
    if np.any(std <= 0.0):
        raise DomainError("accuracy_std must be positive for a weighted fit")
    weights = 1.0 / std**2

    thr, beta, sse, cov = _hinge_solve(w, a, weights)
    a_max, rate = float(beta[0]), float(beta[1])

    span = w[-1] - w[0]
    if thr <= w[0] + 1e-9 * span or thr >= w[-1] - 1e-9 * span:
        raise DegenerateFitError(
            f"no interior knee: optimal threshold {thr:.4g} sits on the data "
            f"boundary [{w[0]:.4g}, {w[-1]:.4g}]"
        )
    a_max_se = float(np.sqrt(cov[0, 0]))
    rate_se = float(np.sqrt(cov[1, 1]))
    if rate <= 0.0 or rate < rate_se:
        raise DegenerateFitError(
            f"no significant decay past the candidate threshold {thr:.4g}: "
            f"rate {rate:.4g} vs its standard error {rate_se:.4g} "
            f"(flat or monotone data)"
        )

    # parametric bootstrap for the threshold: perturb accuracies within
    # their quoted stds and refit
    rng = np.random.default_rng(bootstrap_seed)
    thr_samples = []
    for _ in range(bootstrap):
        a_boot = a + rng.normal(0.0, std)
        try:
            thr_b, beta_b, _, _ = _hinge_solve(w, a_boot, weights)
        except DegenerateFitError:
            continue
        if beta_b is not None:
            thr_samples.append(thr_b)
    threshold_se = (
        float(np.std(thr_samples, ddof=1)) if len(thr_samples) > 1 else float("nan")
    )

    return ThresholdFit(
        a_max=a_max,
        rate=rate,
        threshold=float(thr),
        a_max_se=a_max_se,
        rate_se=rate_se,
        threshold_se=threshold_se,
    )


# ---------------------------------------------------------------------------
# Analytic saturation thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetStats:
    """Pooled pixel statistics of a dataset: variance and squared mean."""

    input_variance: float
    input_mean_sq: float

    def __post_init__(self):
        for name in ("input_variance", "input_mean_sq"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be finite and >= 0")
            object.__setattr__(self, name, v)

    @property
    def second_moment(self) -> float:
        return self.input_variance + self.input_mean_sq


def analytic_threshold(
    depth: int,
    sigma_b2: float,
    stats: DatasetStats,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
) -> float:
    """Weight variance at which the last hidden layer reaches the
    uniformity variance pi^2/12, for a depth-L network fed data with the
    given input statistics.

    The first hidden layer sees
        sigma_1^2 = sigma_w^2 * (input_variance + input_mean_sq) + sigma_b^2
    and each further layer applies the variance recursion once. For
    depth 1 the threshold is the closed form
        (pi^2/12 - sigma_b^2) / (input_variance + input_mean_sq),
    which falls with sigma_b^2 at rate 1/(input_variance + input_mean_sq)
    (~ 8.93 for MNIST); deeper thresholds come from root-finding on the
    iterated map. No positive solution exists once sigma_b^2 >= pi^2/12,
    since the bias alone then saturates the final layer.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if sigma_b2 < 0.0:
        raise DomainError("sigma_b2 must be >= 0")
    target = entropy_minimum_variance()
    if sigma_b2 >= target:
        raise NoPositiveSolutionError(
            f"sigma_b^2 = {sigma_b2} >= pi^2/12: the final-layer variance "
            f"exceeds the uniformity variance at any weight variance"
        )
    s0 = stats.second_moment
    if s0 <= 0.0:
        raise DomainError("input second moment must be positive")
    if depth == 1:
        return (target - sigma_b2) / s0

    def final_variance(w2: float) -> float:
        q = w2 * s0 + sigma_b2
        for _ in range(depth - 1):
            q = w2 * variance_map(GaussianSpec(q), act, rule) + sigma_b2
        return q

    # final_variance is increasing in w2; expand then bisect
    lo, hi = 0.0, max(1.0, (target - sigma_b2) / s0)
    while final_variance(hi) < target:
        hi *= 2.0
        if hi > 1e9:
            raise NoPositiveSolutionError(
                f"no threshold below sigma_w^2 = 1e9 for depth {depth}"
            )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if final_variance(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
