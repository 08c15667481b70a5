#!/usr/bin/env python3
"""Map the initialization phase plane: the critical line, the line of
uniformity, and their crossing.

Walks the same steps as the library's phase_map module and prints the
landmark numbers; writes phase_diagram.csv (long-format grid) next to
this script and, if matplotlib is importable, phase_diagram.png.
"""

import numpy as np

from edge_atlas import (
    PhasePoint,
    eoc_curve,
    line_of_uniformity,
    lou_eoc_intersection,
    phase_grid,
    solve_fixed_point,
)

print("== landmarks ==")
print(f"line of uniformity at sigma_w^2 = 0: sigma_b^2 = {line_of_uniformity(0.0):.4f}")
print(f"line of uniformity at sigma_w^2 = 2: sigma_b^2 = {line_of_uniformity(2.0):.4f}")

cross = lou_eoc_intersection()
print(f"LOU/EOC crossing: ({cross.sigma_w2:.4f}, {cross.sigma_b2:.4f})")
sol = solve_fixed_point(cross)
print(f"  fixed point there: sigma_*^2 = {sol.sigma_star2:.4f} (pi^2/12 = {np.pi**2/12:.4f})")
print(f"  chi = {sol.chi:.6f} (critical: 1)")

print("\n== critical line (tanh) ==")
curve = eoc_curve((1.0, 4.0), 13)
for pt in curve.points[::3]:
    print(f"  sigma_w^2 = {pt.sigma_w2:5.2f}  ->  sigma_b^2 = {pt.sigma_b2:.4f}")

print("\n== phase grid ==")
grid = phase_grid((0.5, 4.0), (0.0, 0.5), (36, 21))
ordered = np.nansum(grid.chi_field < 1.0)
chaotic = np.nansum(grid.chi_field > 1.0)
print(f"{ordered} ordered cells (chi < 1), {chaotic} chaotic cells (chi > 1)")

rows = ["sigma_w2,sigma_b2,chi,log_rel_entropy"]
for i, b2 in enumerate(grid.b_axis):
    for j, w2 in enumerate(grid.w_axis):
        rows.append(
            f"{w2:.6g},{b2:.6g},{grid.chi_field[i, j]:.6g},{grid.entropy_field[i, j]:.6g}"
        )
with open("phase_diagram.csv", "w") as fh:
    fh.write("\n".join(rows) + "\n")
print("wrote phase_diagram.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(
        grid.w_axis, grid.b_axis, grid.chi_field, cmap="coolwarm", vmin=0.0, vmax=2.0
    )
    fig.colorbar(mesh, label="chi")
    ws = np.array([p.sigma_w2 for p in curve.points])
    ax.plot(ws, [p.sigma_b2 for p in curve.points], "k-", label="edge of chaos")
    lou_w = np.linspace(0.5, 2.3, 40)
    ax.plot(lou_w, [line_of_uniformity(w) for w in lou_w], "k--", label="line of uniformity")
    ax.plot([cross.sigma_w2], [cross.sigma_b2], "k*", ms=12)
    ax.set_xlabel("sigma_w^2")
    ax.set_ylabel("sigma_b^2")
    ax.set_ylim(0, 0.5)
    ax.legend()
    fig.tight_layout()
    fig.savefig("phase_diagram.png", dpi=130)
    print("wrote phase_diagram.png")
except ImportError:
    print("matplotlib not installed; skipped the figure")
