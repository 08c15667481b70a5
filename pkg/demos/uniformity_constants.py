#!/usr/bin/env python3
"""How uniform can a tanh layer get?

The post-activation of a zero-mean Gaussian pre-activation is most
uniform (smallest KL divergence to the flat density on (-1, 1)) at a
specific variance. This script locates that minimum three independent
ways and prints the constants the rest of the package leans on.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from edge_atlas import (
    GaussianSpec,
    entropy_minimum_variance,
    relative_entropy_uniform,
    variance_map,
)

closed = entropy_minimum_variance()
print(f"closed form:      sigma_min^2 = pi^2/12 = {closed:.6f}")

found = minimize_scalar(
    lambda v: relative_entropy_uniform(GaussianSpec(v)), bounds=(0.1, 5.0),
    method="bounded",
)
print(f"numerical argmin: sigma_min^2 = {found.x:.6f}")

s_min = relative_entropy_uniform(GaussianSpec(closed))
print(f"divergence at the minimum: {s_min:.6f} (0.5*ln(2 pi^3/3) - 3/2 = "
      f"{0.5*np.log(2*np.pi**3/3) - 1.5:.6f})")

v_phi = variance_map(GaussianSpec(closed))
print(f"post-activation variance at the minimum: {v_phi:.6f}")
print(f"  -> line of uniformity: sigma_b^2 = {closed:.4f} - {v_phi:.4f} * sigma_w^2")

print("\nKL divergence to uniform vs pre-activation variance:")
for v in (0.1, 0.3, 0.5, closed, 1.5, 3.0, 10.0):
    s = relative_entropy_uniform(GaussianSpec(v))
    bar = "#" * int(min(60, s * 40))
    tag = "  <- minimum" if abs(v - closed) < 1e-9 else ""
    print(f"  sigma^2 = {v:6.3f}: S = {s:8.5f} {bar}{tag}")
