"""Round-off propagation under emulated reduced precision.

Two trajectories of the same scheme on the same discretization are run
side by side: one at full working precision, one whose state is rounded
to a reduced significand after every time step.  Their sup-norm gap
isolates round-off propagation from truncation error.  ``significand_bits``
counts stored fraction bits (IEEE convention), so 52 bits reproduces
double precision and the rounding becomes a no-op.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergedValueError
from .grid import GridFunction, Probe, RefinementPath, TWO_PI, sample

__all__ = [
    "PrecisionSpec",
    "round_to_precision",
    "RoundoffGrowthReport",
    "roundoff_growth_experiment",
    "HalvingSweepReport",
    "halving_sweep",
]


@dataclass(frozen=True)
class PrecisionSpec:
    """Reduced-precision arithmetic model: per-step nearest-even rounding."""

    significand_bits: int
    rounding_mode: str = "nearest_even"
    apply_point: str = "per_step"

    def __post_init__(self) -> None:
        if not (4 <= self.significand_bits <= 52):
            raise ValueError(f"significand_bits must be in [4, 52], got {self.significand_bits}")
        if self.rounding_mode != "nearest_even":
            raise ValueError(f"unsupported rounding mode: {self.rounding_mode!r}")
        if self.apply_point != "per_step":
            raise ValueError(f"unsupported apply point: {self.apply_point!r}")

    @property
    def epsilon(self) -> float:
        return 2.0 ** (-self.significand_bits)


def round_to_precision(x, spec: PrecisionSpec):
    """Round to ``significand_bits`` fraction bits, nearest-even, exponent kept.

    Accepts scalars or arrays; scalars come back as floats.  np.rint
    implements round-half-to-even, and scaling by the bit count makes the
    integer grid coincide with the reduced significand lattice.
    """
    arr = np.asarray(x, dtype=float)
    if not np.isfinite(arr).all():
        raise DivergedValueError("cannot round non-finite values")
    mantissa, exponent = np.frexp(arr)
    scale = spec.significand_bits + 1  # stored bits plus the implicit leading bit
    rounded = np.ldexp(np.rint(np.ldexp(mantissa, scale)), exponent - scale)
    if np.isscalar(x) or arr.ndim == 0:
        return float(rounded)
    return rounded


def _growth_samples(n_max: int) -> list:
    steps = {n for n in range(1, min(8, n_max) + 1)}
    p = 16
    while p < n_max:
        steps.add(p)
        p *= 2
    steps.add(n_max)
    return sorted(steps)


@dataclass(frozen=True)
class RoundoffGrowthReport:
    samples: tuple  # (n, t, gap)
    exponent_q: float | None
    diverged: bool
    flagged_unstable: bool
    bits: int
    dt: float
    dx: float
    scheme_name: str

    @property
    def final_gap(self) -> float:
        return self.samples[-1][2] if self.samples else math.nan


def roundoff_growth_experiment(
    s, u: GridFunction, horizon_t: float, spec: PrecisionSpec
) -> RoundoffGrowthReport:
    """Gap between a per-step-rounded trajectory and the full-precision one.

    Both runs start from the identical initial state and use the identical
    discretization, so the gap is pure round-off propagation.  The gap is
    recorded at geometrically sampled step counts and fitted to
    gap(n) ~ C * n^q on log-log axes (fit skipped below 8 usable points).
    Unstable schemes are allowed but flagged.
    """
    from .analysis import von_neumann_check
    from .schemes import apply_values

    n_max = max(1, round(horizon_t / s.dt))
    schedule = _growth_samples(n_max)
    flagged = not von_neumann_check(s, u.n).passed

    reference = u.values.copy()
    reduced = u.values.copy()
    samples = []
    diverged = False
    target = 0
    for n in range(1, n_max + 1):
        reference = apply_values(s, reference)
        reduced = apply_values(s, reduced)
        if not (np.isfinite(reference).all() and np.isfinite(reduced).all()):
            diverged = True
            break
        reduced = round_to_precision(reduced, spec)
        if n == schedule[target]:
            gap = float(np.max(np.abs(reduced - reference)))
            samples.append((n, n * s.dt, gap))
            target += 1

    positive = [(n, g) for n, _, g in samples if g > 0]
    exponent_q = None
    if len(positive) >= 8:
        log_n = np.log([n for n, _ in positive])
        log_g = np.log([g for _, g in positive])
        exponent_q = float(np.polyfit(log_n, log_g, 1)[0])

    return RoundoffGrowthReport(
        samples=tuple(samples),
        exponent_q=exponent_q,
        diverged=diverged,
        flagged_unstable=flagged,
        bits=spec.significand_bits,
        dt=s.dt,
        dx=s.dx,
        scheme_name=s.name,
    )


@dataclass(frozen=True)
class HalvingSweepReport:
    rows: tuple  # (dt, dx, n_steps, final_gap)
    exponent_s: float | None
    growth_reports: tuple

    @property
    def fit_skipped(self) -> bool:
        return self.exponent_s is None


def halving_sweep(
    builder,
    path: RefinementPath,
    probe: Probe,
    horizon_t: float,
    spec: PrecisionSpec,
    dts,
    domain_length: float = TWO_PI,
) -> HalvingSweepReport:
    """Final round-off gap versus dt along a refinement path.

    Fits gap ~ dt^(-s); a nonnegative s means refinement does not improve
    the round-off floor.  Needs at least 4 dt values; the fit is skipped
    when fewer than two gaps are positive (e.g. the 52-bit control).
    """
    dts = sorted(dts, reverse=True)
    if len(dts) < 4:
        raise ValueError(f"halving_sweep needs >= 4 dt values, got {len(dts)}")
    rows = []
    reports = []
    for dt in dts:
        grid_n, dx = path.grid_for(dt, domain_length)
        s = builder(dt, dx, grid_n)
        u = sample(probe, grid_n, domain_length)
        report = roundoff_growth_experiment(s, u, horizon_t, spec)
        final = math.inf if report.diverged else report.final_gap
        rows.append((dt, dx, max(1, round(horizon_t / dt)), final))
        reports.append(report)

    positive = [(dt, g) for dt, _, _, g in rows if math.isfinite(g) and g > 0]
    exponent_s = None
    if len(positive) >= 2:
        log_dt = np.log([dt for dt, _ in positive])
        log_g = np.log([g for _, g in positive])
        exponent_s = float(-np.polyfit(log_dt, log_g, 1)[0])

    return HalvingSweepReport(
        rows=tuple(rows), exponent_s=exponent_s, growth_reports=tuple(reports)
    )
