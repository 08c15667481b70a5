"""Phase structure of the (sigma_w^2, sigma_b^2) initialization plane.

The depth recursion for the pre-activation variance,

    sigma_l^2 = sigma_w^2 * variance_map(sigma_{l-1}^2) + sigma_b^2,

converges to a fixed point sigma_*^2 that depends only on the phase point
and the activation. On top of the fixed point sit the derived quantities
chi (stability of the covariance map), the correlation length xi, and the
critical line chi = 1 separating the ordered and chaotic phases. The line
of uniformity is the iso-variance line sigma_*^2 = pi^2/12 along which the
asymptotic post-activation distribution is closest to uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    CorrelationLengthUndefined,
    DomainError,
    NoCriticalPointError,
    OutOfQuadrantError,
    SolverError,
)
from .gaussian_calculus import (
    Activation,
    GaussianSpec,
    QuadratureRule,
    TANH,
    chi,
    chi_tilde,
    correlation_length,
    entropy_minimum_variance,
    relative_entropy_uniform,
    variance_map,
)

__all__ = [
    "PhasePoint",
    "FixedPointSolution",
    "PhaseGrid",
    "EocCurve",
    "iterate_variance",
    "solve_fixed_point",
    "iso_variance_line",
    "line_of_uniformity",
    "solve_eoc_point",
    "eoc_curve",
    "lou_eoc_intersection",
    "phase_grid",
]

# bracket and tolerance for locating chi = 1 in sigma_*^2 (bisection keeps
# the bracketing guarantee; speed is irrelevant at these sizes)
_EOC_BRACKET = (1e-12, 50.0)
_EOC_TOL = 1e-12
_EOC_SCAN_POINTS = 240


@dataclass(frozen=True)
class PhasePoint:
    """A point (sigma_w^2, sigma_b^2) in the initialization plane."""

    sigma_w2: float
    sigma_b2: float

    def __post_init__(self):
        for name in ("sigma_w2", "sigma_b2"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class FixedPointSolution:
    """Fixed point of the variance recursion plus derived criticality data.

    xi is None when chi >= 1 (no finite two-copy correlation length);
    xi_tilde is None when chi - chi_tilde >= 1 likewise for the
    single-input information depth.
    """

    point: PhasePoint
    sigma_star2: float
    sigma_phi_star2: float
    chi: float
    chi_tilde: float
    xi: Optional[float]
    xi_tilde: Optional[float]
    iterations: int
    residual: float


@dataclass(frozen=True)
class PhaseGrid:
    """chi and log relative entropy sampled on a rectangular grid.

    Fields are indexed [i_b, i_w] (rows follow the bias axis). Cells where
    the fixed-point solve failed hold NaN.
    """

    w_axis: np.ndarray
    b_axis: np.ndarray
    chi_field: np.ndarray
    entropy_field: np.ndarray

    def __post_init__(self):
        expect = (len(self.b_axis), len(self.w_axis))
        if self.chi_field.shape != expect or self.entropy_field.shape != expect:
            raise DomainError("grid field dimensions must match the axes")


@dataclass(frozen=True)
class EocCurve:
    """Sampled points on the critical line, with their critical variances.

    ``gaps`` records the sigma_w^2 samples where no critical point exists
    (with the reason), so a partial scan never aborts the curve.
    """

    points: List[PhasePoint]
    sigma_star2: List[float]
    gaps: List[Tuple[float, str]]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


# ---------------------------------------------------------------------------
# Variance recursion and fixed point
# ---------------------------------------------------------------------------

def iterate_variance(
    prev_sigma2: float,
    point: PhasePoint,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
) -> float:
    """One layer of the variance recursion."""
    if prev_sigma2 < 0.0:
        raise DomainError("prev_sigma2 must be >= 0")
    return (
        point.sigma_w2 * variance_map(GaussianSpec(prev_sigma2), act, rule)
        + point.sigma_b2
    )


def _default_seed(point: PhasePoint) -> float:
    # arbitrary positive seed; the fixed point is independent of it
    return point.sigma_b2 + 0.25 * point.sigma_w2


def solve_fixed_point(
    point: PhasePoint,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
    seed_variance: float | None = None,
    tol: float = 1e-10,
    max_iterations: int = 10_000,
) -> FixedPointSolution:
    """Solve sigma_*^2 = sigma_w^2 * variance_map(sigma_*^2) + sigma_b^2.

    Plain iteration of the layer recursion, with two safeguards: damped
    steps (factor 1/2) if the iterates ever oscillate, and Steffensen
    acceleration when plain iteration crawls (the map's slope approaches 1
    near the critical corner (1, 0), where convergence degrades from
    geometric to algebraic). Raises SolverError, carrying the last
    iterate, on divergence or when the iteration budget is exhausted --
    for swish at large bias variance the recursion genuinely has no fixed
    point and the iterates run away.
    """
    q = _default_seed(point) if seed_variance is None else float(seed_variance)
    if q < 0.0:
        raise DomainError("seed variance must be >= 0")

    def step(x: float) -> float:
        return iterate_variance(x, point, act, rule)

    iterations = 0
    prev_delta = 0.0
    converged = False
    plain_budget = min(500, max_iterations)
    while iterations < plain_budget:
        q_next = step(q)
        iterations += 1
        if not math.isfinite(q_next) or q_next > 1e12:
            raise SolverError(
                f"variance recursion diverged at {point}",
                last_iterate=q,
                iterations=iterations,
            )
        delta = q_next - q
        if delta * prev_delta < 0.0:  # oscillation: damp the step
            q_next = q + 0.5 * delta
            delta = q_next - q
        prev_delta = delta
        q = q_next
        if abs(delta) < tol:
            converged = True
            break

    if not converged:
        # Steffensen: quadratic convergence even where the map slope is ~1
        while iterations < max_iterations:
            f1 = step(q)
            f2 = step(f1)
            iterations += 2
            if not (math.isfinite(f1) and math.isfinite(f2)) or f2 > 1e12:
                raise SolverError(
                    f"variance recursion diverged at {point}",
                    last_iterate=q,
                    iterations=iterations,
                )
            denom = f2 - 2.0 * f1 + q
            q_next = f1 if denom == 0.0 else q - (f1 - q) ** 2 / denom
            if q_next < 0.0:
                q_next = 0.0
            if abs(q_next - q) < tol:
                q = q_next
                converged = True
                break
            q = q_next
        if not converged:
            raise SolverError(
                f"fixed point not converged after {iterations} iterations at {point}",
                last_iterate=q,
                iterations=iterations,
            )

    q = max(q, 0.0)
    residual = abs(q - step(q))
    phi_star2 = variance_map(GaussianSpec(q), act, rule)
    chi_val = chi(point.sigma_w2, q, act, rule)
    chi_tilde_val = chi_tilde(point.sigma_w2, q, act, rule)

    def maybe_length(c: float) -> Optional[float]:
        try:
            return correlation_length(c)
        except (CorrelationLengthUndefined, DomainError):
            return None

    return FixedPointSolution(
        point=point,
        sigma_star2=q,
        sigma_phi_star2=phi_star2,
        chi=chi_val,
        chi_tilde=chi_tilde_val,
        xi=maybe_length(chi_val),
        xi_tilde=maybe_length(chi_val - chi_tilde_val),
        iterations=iterations,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# Iso-variance lines and the line of uniformity
# ---------------------------------------------------------------------------

def iso_variance_line(
    target_sigma_star2: float,
    sigma_w2: float,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
) -> float:
    """sigma_b^2 on the line of constant asymptotic variance,

        sigma_b^2 = sigma_*^2 - variance_map(sigma_*^2) * sigma_w^2.

    May be negative; callers filter to the physical quadrant.
    """
    if target_sigma_star2 < 0.0:
        raise DomainError("target variance must be >= 0")
    phi2 = variance_map(GaussianSpec(target_sigma_star2), act, rule)
    return target_sigma_star2 - phi2 * sigma_w2


def line_of_uniformity(
    sigma_w2: float, rule: QuadratureRule | None = None
) -> float:
    """The tanh iso-variance line at sigma_*^2 = pi^2/12, the variance of
    maximal post-activation uniformity. The slope is computed, not
    hard-coded (~= -0.359)."""
    return iso_variance_line(entropy_minimum_variance(), sigma_w2, TANH, rule)


# ---------------------------------------------------------------------------
# Edge of chaos
# ---------------------------------------------------------------------------

def _critical_sigma_star2(
    sigma_w2: float, act: Activation, rule: QuadratureRule | None
) -> float:
    """Smallest sigma_*^2 in the bracket with chi(sigma_w2, sigma_*^2) = 1.

    chi is monotone in sigma_*^2 for tanh but not for swish, so the root
    is first localized by scanning for a sign change on a log-spaced grid
    and then polished by bisection. Taking the first sign change selects
    the branch continuously connected to small variances.
    """

    def f(q: float) -> float:
        return chi(sigma_w2, q, act, rule) - 1.0

    lo, hi = _EOC_BRACKET
    grid = np.geomspace(lo, hi, _EOC_SCAN_POINTS)
    g_prev = float(grid[0])
    f_prev = f(g_prev)
    if f_prev == 0.0:
        return g_prev
    a = b = None
    for g in grid[1:]:
        g = float(g)
        f_g = f(g)
        if f_g == 0.0:
            return g
        if (f_prev < 0.0) != (f_g < 0.0):
            a, b = g_prev, g
            break
        g_prev, f_prev = g, f_g
    if a is None:
        raise NoCriticalPointError(
            f"no chi = 1 solution for sigma_w^2 = {sigma_w2} "
            f"({act.name}) within sigma_*^2 <= {hi}"
        )
    fa = f(a)
    while b - a > _EOC_TOL:
        m = 0.5 * (a + b)
        fm = f(m)
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def solve_eoc_point(
    sigma_w2: float,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
) -> float:
    """sigma_b^2 such that (sigma_w^2, sigma_b^2) lies on the critical line.

    Solves chi(sigma_w^2, sigma_*^2) = 1 for the critical variance, then
    reads off sigma_b^2 = sigma_*^2 - sigma_w^2 * variance_map(sigma_*^2).
    For tanh the precondition is sigma_w^2 > 1: below that chi < 1 for
    every positive variance and the critical line terminates at (1, 0).
    """
    b2, _ = _solve_eoc_point_full(sigma_w2, act, rule)
    return b2


def _solve_eoc_point_full(
    sigma_w2: float,
    act: Activation,
    rule: QuadratureRule | None,
) -> Tuple[float, float]:
    if act.name == "tanh" and sigma_w2 <= 1.0:
        raise DomainError(
            "tanh has no critical line for sigma_w^2 <= 1 "
            "(the only critical point is (1, 0))"
        )
    q = _critical_sigma_star2(sigma_w2, act, rule)
    b2 = q - sigma_w2 * variance_map(GaussianSpec(q), act, rule)
    if b2 < 0.0:
        raise OutOfQuadrantError(
            f"critical point at sigma_w^2 = {sigma_w2} has "
            f"sigma_b^2 = {b2:.3e} < 0"
        )
    return b2, q


def eoc_curve(
    w_range: Tuple[float, float],
    n_points: int,
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
    spacing: str = "uniform",
) -> EocCurve:
    """Sample the critical line over w_range.

    spacing "uniform" places samples evenly in sigma_w^2; "anchor" clusters
    them toward the left end (density ~ u^4.5), which resolves the flat
    takeoff of the tanh curve near (1, 0) and is what the constrained
    polynomial fit wants. Samples without a critical point become gaps.
    """
    if n_points < 2:
        raise DomainError("need at least two sample points")
    lo, hi = float(w_range[0]), float(w_range[1])
    if not (hi > lo):
        raise DomainError("w_range must be increasing")
    u = np.linspace(0.0, 1.0, n_points)
    if spacing == "uniform":
        ws = lo + (hi - lo) * u
    elif spacing == "anchor":
        ws = lo + (hi - lo) * u**4.5
    else:
        raise DomainError(f"unknown spacing {spacing!r}")

    points: List[PhasePoint] = []
    stars: List[float] = []
    gaps: List[Tuple[float, str]] = []
    for w2 in ws:
        try:
            b2, q = _solve_eoc_point_full(float(w2), act, rule)
        except (DomainError, NoCriticalPointError, OutOfQuadrantError) as exc:
            gaps.append((float(w2), str(exc)))
            continue
        points.append(PhasePoint(float(w2), b2))
        stars.append(q)
    return EocCurve(points=points, sigma_star2=stars, gaps=gaps)


def lou_eoc_intersection(
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
    w_bracket: Tuple[float, float] = (1.2, 5.0),
) -> PhasePoint:
    """Crossing of the line of uniformity with the critical line (tanh).

    Root of line_of_uniformity(w) - eoc(w), bisected to 1e-12; the LOU
    starts above the critical line at small sigma_w^2 and falls below it
    well before sigma_w^2 = 5.
    """
    if act.name != "tanh":
        raise DomainError("the line of uniformity is defined for tanh only")

    def f(w2: float) -> float:
        return line_of_uniformity(w2, rule) - solve_eoc_point(w2, act, rule)

    a, b = float(w_bracket[0]), float(w_bracket[1])
    fa, fb = f(a), f(b)
    if fa * fb > 0.0:
        raise SolverError(
            f"no LOU/EOC sign change in bracket {w_bracket}", last_iterate=None
        )
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        fm = f(m)
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b = m
    w = 0.5 * (a + b)
    return PhasePoint(w, solve_eoc_point(w, act, rule))


# ---------------------------------------------------------------------------
# Phase grid
# ---------------------------------------------------------------------------

def phase_grid(
    w_range: Tuple[float, float],
    b_range: Tuple[float, float],
    resolution: Tuple[int, int],
    act: Activation = TANH,
    rule: QuadratureRule | None = None,
) -> PhaseGrid:
    """Evaluate chi and ln(relative entropy) on a rectangular grid.

    Each cell solves its own fixed point; failures (possible for swish)
    leave NaN in both fields rather than aborting the grid. The entropy
    field is the log of the KL divergence of the asymptotic tanh
    post-activation distribution from uniform; it is +inf where
    sigma_*^2 = 0 and NaN for non-tanh activations.
    """
    nw, nb = resolution
    if nw < 1 or nb < 1:
        raise DomainError("resolution must be positive")
    w_axis = np.linspace(w_range[0], w_range[1], nw)
    b_axis = np.linspace(b_range[0], b_range[1], nb)
    chi_field = np.full((nb, nw), np.nan)
    entropy_field = np.full((nb, nw), np.nan)
    for i, b2 in enumerate(b_axis):
        for j, w2 in enumerate(w_axis):
            try:
                sol = solve_fixed_point(PhasePoint(float(w2), float(b2)), act, rule)
            except SolverError:
                continue
            chi_field[i, j] = sol.chi
            if act.name == "tanh":
                if sol.sigma_star2 == 0.0:
                    entropy_field[i, j] = np.inf
                else:
                    entropy_field[i, j] = math.log(
                        relative_entropy_uniform(GaussianSpec(sol.sigma_star2))
                    )
    return PhaseGrid(
        w_axis=w_axis, b_axis=b_axis, chi_field=chi_field, entropy_field=entropy_field
    )
