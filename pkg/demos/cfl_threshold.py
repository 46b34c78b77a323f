"""
The CFL threshold for the explicit heat scheme
==============================================

The forward-time centered-space scheme has one-step coefficients
(r, 1 - 2r, r) with r = dt/dx^2.  For r <= 1/2 every coefficient is
nonnegative, the absolute coefficients sum to exactly 1, and all iterated
operator norms stay at 1.  The moment r crosses 1/2 the norms grow like
(4r - 1)^n and trajectories blow up within a handful of steps.

This script walks both sides of the threshold on a 128-point grid.
"""
import math

import numpy as np

import laxlab as lx
from laxlab.analysis import operator_norm, stability_check, von_neumann_check
from laxlab.schemes import apply_values, ftcs_heat
from laxlab.semigroup import HeatSemigroup, evolve

n = 128
dx = 2 * math.pi / n
probe = lx.Sine(1) + lx.Sine(31)

# --- one-step norms and amplification factors on both sides ------------
print("r        ||C||      max|g(k)|")
for r in (0.1, 0.3, 0.5, 0.55, 0.75):
    s = ftcs_heat(r * dx**2, dx)
    print(f"{r:<8} {operator_norm(s):<10.6f} {von_neumann_check(s, n).max_abs_g:.6f}")

# --- iterated norms over a unit time horizon ---------------------------
# Stable ratios keep ||C^n|| pinned at 1; unstable ones exceed any cap
# within tens of steps.
print()
print("r        bound L      first n with ||C^n|| > 10")
for r in (0.3, 0.5, 0.55, 0.75):
    report = stability_check(ftcs_heat(r * dx**2, dx), 1.0)
    first = report.first_exceeding(10.0)
    print(f"{r:<8} {report.bound_l:<12.4e} {first}")

# --- what instability does to an actual trajectory ---------------------
# March the mixed probe to t = 1 at r = 0.55 and compare with the exact
# spectral evolution: the error is astronomically large even though the
# scheme is consistent.
r = 0.55
s = ftcs_heat(r * dx**2, dx)
u = lx.sample(probe, n)
vals = u.values.copy()
steps = round(1.0 / s.dt)
for _ in range(steps):
    vals = apply_values(s, vals)
sg = HeatSemigroup(horizon_t=1.0, grid_n=n)
exact = evolve(sg, u, steps * s.dt)
err = float(np.max(np.abs(vals - exact.values)))
print()
print(f"r = {r}: sup error after {steps} steps = {err:.3e}")
