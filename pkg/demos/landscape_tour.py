"""Tour of the closed-form population landscape.

The average objective E|<a,x>^2 - <a,xbar>^2| over Gaussian measurements has
a fully explicit description: value, gradient, and stationary set.  This
script walks through the pieces and cross-checks each closed form against a
Monte Carlo oracle.

Run:  python demos/landscape_tour.py
"""

import math
import os
import tempfile

import numpy as np

import robustpr as rp
from robustpr import harness

# --- the critical ring radius -------------------------------------------
c = rp.critical_ratio()
print(f"critical ratio c = {c:.10f}")
print(f"  check: c/(1+c^2) + arctan(c) - pi/4 = {rp.omega(c) - math.pi / 4:+.2e}")
print("  stationary set: {0}, {+-xbar}, and the ring |x| = c |xbar| in xbar's"
      " orthogonal complement\n")

# --- the two-eigenvalue outer function vs chi-squared sampling -----------
print("zeta(y1, y2) closed form vs Monte Carlo (n = 10^6):")
for y1, y2 in [(1.0, -1.0), (0.3, -2.0), (5.0, -0.2)]:
    est = rp.mc_spectral_value(y1, y2, 10**6, seed=1)
    print(f"  zeta({y1:4}, {y2:5}) = {rp.zeta(y1, y2):.6f}   "
          f"mc = {est.mean:.6f} +- {est.std_err:.6f}")

# --- population value and gradient through the rank-two spectrum ---------
xbar = np.array([1.0, 1.0])
x = np.array([1.0, 0.0])
spec = rp.rank_two_spectrum(x, xbar)
print(f"\nat x = {x}, xbar = {xbar}:")
print(f"  rank-two eigenvalues ({spec.lambda_max:.4f}, {spec.lambda_min:.4f})")
print(f"  population value  {rp.population_value(x, xbar):.6f}")
print(f"  population grad   {np.round(rp.population_gradient(x, xbar), 6)}")
est = rp.mc_population_value(x, xbar, 10**6, seed=2)
print(f"  mc value          {est.mean:.6f} +- {est.std_err:.6f}")

ring_point = c * math.sqrt(2.0) * np.array([-1.0, 1.0]) / math.sqrt(2.0)
print(f"  |grad| at ring point {np.round(ring_point, 4)}: "
      f"{np.linalg.norm(rp.population_gradient(ring_point, xbar)):.2e}")

# --- near-critical band --------------------------------------------------
print("\nwhere the radial slope is small (|d zeta/d y1| <= eps):")
for eps in (0.01, 0.1, 0.4):
    c1, c2 = rp.ratio_band(eps)
    print(f"  eps = {eps:4}: ring radius in [{c1:.4f}, {c2:.4f}] "
          f"(width {c2 - c1:.4f} <= 5 pi eps = {5 * math.pi * eps:.4f})")

# --- the gradient-norm grid behind the contour plots ---------------------
out = os.path.join(tempfile.gettempdir(), "robustpr_landscape.csv")
axis, _, g = harness.run_landscape_grid(xbar, 2.0, 401, out)
minima = rp.grid_local_minima(g, max_value=1e-2)
print(f"\n401x401 grid of |grad| written to {out}")
print("grid-local minima below 1e-2 (the five stationary points):")
for i, j in minima:
    print(f"  ({axis[i]:+.2f}, {axis[j]:+.2f})   |grad| = {g[i, j]:.2e}")

# --- how far can a point be from the stationary set? ---------------------
print("\nstationary-set distances:")
for point in (xbar, np.zeros(2), np.array([0.2, -0.2]), np.array([2.0, 0.0])):
    print(f"  dist({np.round(point, 2)}) = "
          f"{rp.stationary_set_distance(point, xbar):.4f}")
