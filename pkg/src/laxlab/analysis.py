"""Executable convergence, consistency, and stability diagnostics.

The three defining properties of the equivalence-theorem framework are
turned into finite, falsifiable checks:

* stability: iterated operator norms ||C^n|| over n*dt <= T, against a
  configurable cap (existence of a uniform bound cannot be observed in a
  finite experiment, so stable means "never exceeded the cap");
* consistency: one-step residuals against the exact spectral evolution;
* convergence: trajectory error at the final time along a refinement
  path, with an observed order fitted in dx.

For circular-convolution stencils on sup-norm grids the operator norm is
exactly the sum of absolute coefficients; every norm returned here is
additionally validated by a witness vector that attains it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergedOperatorError, InvalidGridError
from .grid import (
    GridFunction,
    Probe,
    RefinementPath,
    TWO_PI,
    resample,
    sample,
    sup_norm,
    wavenumbers,
)
from .schemes import StencilScheme, apply_values, compose, power
from .semigroup import HeatSemigroup, evolve

__all__ = [
    "DEFAULT_STABILITY_THRESHOLD",
    "operator_norm",
    "StabilityReport",
    "stability_check",
    "von_neumann_symbol",
    "VonNeumannReport",
    "von_neumann_check",
    "consistency_check",
    "ConvergenceCell",
    "ConvergenceReport",
    "convergence_experiment",
    "scheme_builder",
]

# Stable one-step operators in scope have norm 1; unstable ones blow past
# any cap within tens of steps, so a margin of 10 avoids false negatives.
DEFAULT_STABILITY_THRESHOLD = 10.0


def operator_norm(s: StencilScheme) -> float:
    """Sup-norm operator norm of a periodic stencil: sum of |coefficients|.

    Validated against the witness sign pattern, which attains the norm at
    a grid point; a mismatch beyond 1e-12 relative raises RuntimeError.
    """
    total = math.fsum(abs(float(c)) for c in s.coefficients)
    n = max(s.width, 2)
    witness = np.ones(n)
    witness[np.mod(s.offsets, n)] = np.where(s.coefficients < 0, -1.0, 1.0)
    attained = float(np.max(np.abs(apply_values(s, witness))))
    # FFT-based application rounds at a few ulps per transform point.
    tol = max(1e-12, 64 * n * np.finfo(float).eps) * max(1.0, total)
    if abs(attained - total) > tol:
        raise RuntimeError(
            f"witness ratio {attained} disagrees with coefficient sum {total}"
        )
    return total


def _sample_steps(n_max: int) -> list:
    """All n up to 64, then powers of two, always including the endpoint."""
    steps = set(range(1, min(64, n_max) + 1))
    p = 128
    while p < n_max:
        steps.add(p)
        p *= 2
    steps.add(n_max)
    return sorted(steps)


@dataclass(frozen=True)
class StabilityReport:
    horizon_t: float
    dt: float
    norms: tuple  # (n, ||C^n||) pairs; inf marks coefficient overflow
    bound_l: float
    stable: bool
    threshold: float
    subsampled: bool

    def first_exceeding(self, cap: float):
        """Smallest sampled n with ||C^n|| > cap, or None."""
        for n, norm in self.norms:
            if norm > cap:
                return n
        return None


def stability_check(
    s: StencilScheme, horizon_t: float, threshold: float = DEFAULT_STABILITY_THRESHOLD
) -> StabilityReport:
    """Norms of the iterates C^n for n*dt <= T, geometrically subsampled."""
    if s.dt > horizon_t:
        raise ValueError(f"dt={s.dt} exceeds the horizon {horizon_t}")
    n_max = int(math.floor(horizon_t / s.dt + 1e-9))
    steps = _sample_steps(n_max)
    norms = []
    current = None
    prev_n = 0
    diverged = False
    for n in steps:
        try:
            jump = power(s, n - prev_n)
            current = jump if current is None else compose(current, jump)
        except DivergedOperatorError:
            norms.append((n, math.inf))
            diverged = True
            break
        norms.append((n, operator_norm(current)))
        prev_n = n
    bound_l = max(norm for _, norm in norms)
    return StabilityReport(
        horizon_t=horizon_t,
        dt=s.dt,
        norms=tuple(norms),
        bound_l=bound_l,
        stable=(not diverged) and bound_l <= threshold,
        threshold=threshold,
        subsampled=len(steps) < n_max,
    )


def von_neumann_symbol(s: StencilScheme, k: int, grid_n: int) -> complex:
    """Amplification factor g(k) = sum_m c_m exp(i k offsets[m] dx)."""
    if abs(k) > grid_n / 2:
        raise ValueError(f"|k|={abs(k)} exceeds grid_n/2={grid_n / 2}")
    phases = np.exp(1j * k * s.offsets * s.dx)
    return complex(np.sum(s.coefficients * phases))


@dataclass(frozen=True)
class VonNeumannReport:
    max_abs_g: float
    wavenumber: int
    passed: bool


def von_neumann_check(
    s: StencilScheme, grid_n: int, growth_rate: float = 0.0
) -> VonNeumannReport:
    """Scan all representable modes; pass iff max |g(k)| <= 1 + growth_rate*dt.

    A 1e-12 slack absorbs rounding in the symbol summation.
    """
    best_k, best = 0, 0.0
    for k in wavenumbers(grid_n):
        mag = abs(von_neumann_symbol(s, int(k), grid_n))
        if mag > best:
            best, best_k = mag, int(k)
    passed = best <= 1.0 + growth_rate * s.dt + 1e-12
    return VonNeumannReport(max_abs_g=best, wavenumber=best_k, passed=passed)


def consistency_check(s: StencilScheme, sg: HeatSemigroup, u: GridFunction, ts):
    """One-step residuals ||C E(t)u - E(t+dt)u|| at each requested t.

    The probe must be band-limited (|k| <= N/4) and live on the
    semigroup's grid with the stencil's spacing.
    """
    from .grid import is_band_limited

    if u.n != sg.grid_n:
        raise InvalidGridError(f"probe grid {u.n} does not match semigroup {sg.grid_n}")
    if not math.isclose(s.dx, u.dx, rel_tol=1e-9):
        raise InvalidGridError(f"stencil dx {s.dx} does not match grid dx {u.dx}")
    if not is_band_limited(u, sg.grid_n // 4):
        raise InvalidGridError("probe must be band-limited to |k| <= N/4")
    out = []
    for t in ts:
        at_t = evolve(sg, u, t)
        stepped = apply_values(s, at_t.values)
        exact = evolve(sg, u, t + s.dt)
        out.append((float(t), float(np.max(np.abs(stepped - exact.values)))))
    return out


@dataclass(frozen=True)
class ConvergenceCell:
    dt: float
    dx: float
    grid_n: int
    n_steps: int
    error: float
    max_abs_g: float
    diverged: bool


@dataclass(frozen=True)
class ConvergenceReport:
    path: RefinementPath
    cells: tuple
    observed_order: float | None
    converged: bool
    compactness_diameter: float

    @property
    def errors(self):
        return [(c.dt, c.error) for c in self.cells]


def scheme_builder(name: str):
    """Map a scheme name to a (dt, dx, grid_n) -> StencilScheme factory."""
    from .schemes import backward_euler_heat, ftcs_heat

    if name == "ftcs":
        return lambda dt, dx, n: ftcs_heat(dt, dx)
    if name == "backward_euler":
        return backward_euler_heat
    raise ValueError(f"unknown scheme: {name!r}")


def _run_trajectory(s: StencilScheme, u: GridFunction, n_steps: int):
    """Iterate the scheme; returns (values, diverged)."""
    vals = u.values.copy()
    for _ in range(n_steps):
        vals = apply_values(s, vals)
        if not np.isfinite(vals).all() or np.max(np.abs(vals)) > 1e300:
            return vals, True
    return vals, False


def convergence_experiment(
    builder,
    path: RefinementPath,
    probe: Probe,
    horizon_t: float,
    dts,
    domain_length: float = TWO_PI,
    tol_rel: float = 1e-3,
) -> ConvergenceReport:
    """Trajectory error at the final time along a refinement path.

    ``builder`` is a (dt, dx, grid_n) -> StencilScheme factory (see
    :func:`scheme_builder`).  Each cell takes n = round(T/dt) steps and is
    compared with the exact evolution at n*dt, so the final-time mismatch
    stays within dt/2.  Convergence means: all errors finite, decreasing
    monotonically up to 10% jitter, and the finest error below
    ``tol_rel * ||u||``.  The compactness diameter is the max pairwise
    sup-distance among trajectory endpoints and the exact solution,
    measured after trigonometric resampling to the finest grid.
    """
    dts = sorted(dts, reverse=True)
    if not dts:
        raise ValueError("need at least one dt")
    cells = []
    endpoints = []
    finest = None
    for dt in dts:
        grid_n, dx = path.grid_for(dt, domain_length)
        s = builder(dt, dx, grid_n)
        u = sample(probe, grid_n, domain_length)
        n_steps = max(1, round(horizon_t / dt))
        vals, diverged = _run_trajectory(s, u, n_steps)
        symbol = von_neumann_check(s, grid_n)
        if diverged:
            error = math.inf
            endpoints.append(None)
        else:
            sg = HeatSemigroup(horizon_t=horizon_t, grid_n=grid_n, domain_length=domain_length)
            exact = evolve(sg, u, n_steps * dt)
            error = float(np.max(np.abs(vals - exact.values)))
            endpoints.append(GridFunction(vals, domain_length))
        cells.append(
            ConvergenceCell(
                dt=dt,
                dx=dx,
                grid_n=grid_n,
                n_steps=n_steps,
                error=error,
                max_abs_g=symbol.max_abs_g,
                diverged=diverged,
            )
        )
        finest = (grid_n, u)

    errors = [c.error for c in cells]
    finite = [(c.dx, c.error) for c in cells if math.isfinite(c.error) and c.error > 0]
    observed_order = None
    if len(finite) >= 3:
        log_dx = np.log([dx for dx, _ in finite])
        log_err = np.log([e for _, e in finite])
        observed_order = float(np.polyfit(log_dx, log_err, 1)[0])

    monotone = all(errors[i + 1] <= errors[i] * 1.1 for i in range(len(errors) - 1))
    all_finite = all(math.isfinite(e) for e in errors)
    probe_norm = sup_norm(finest[1])
    converged = all_finite and monotone and errors[-1] < tol_rel * probe_norm

    if not all_finite:
        diameter = math.inf
    else:
        n_max = max(c.grid_n for c in cells)
        resampled = [resample(ep, n_max).values for ep in endpoints]
        sg = HeatSemigroup(horizon_t=horizon_t, grid_n=n_max, domain_length=domain_length)
        exact_fine = evolve(sg, sample(probe, n_max, domain_length), horizon_t)
        cloud = resampled + [exact_fine.values]
        diameter = 0.0
        for i in range(len(cloud)):
            for j in range(i + 1, len(cloud)):
                diameter = max(diameter, float(np.max(np.abs(cloud[i] - cloud[j]))))

    return ConvergenceReport(
        path=path,
        cells=tuple(cells),
        observed_order=observed_order,
        converged=converged,
        compactness_diameter=diameter,
    )
