"""Finite-difference operators as periodic convolution stencils.

A :class:`StencilScheme` stores integer offsets and real coefficients;
applying it to a grid function is circular convolution, so every scheme
here is linear and translation-invariant.  The flagship instance is the
explicit forward-time centered-space (FTCS) heat scheme; backward Euler
is included as the unconditionally stable contrast case, stored as a
full-period stencil obtained from the inverse circulant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergedOperatorError, InvalidGridError
from .grid import GridFunction

__all__ = [
    "StencilScheme",
    "ftcs_heat",
    "backward_euler_heat",
    "apply_scheme",
    "apply_values",
    "compose",
    "power",
    "OVERFLOW_LIMIT",
]

# Coefficient magnitudes past this mark gross instability; raising a typed
# error keeps infinities out of downstream reports.
OVERFLOW_LIMIT = 1e300

# Stencils wider than this are applied through the FFT instead of shifted sums.
_FFT_APPLY_CUTOFF = 32


@dataclass(frozen=True)
class StencilScheme:
    """One-step operator v_j = sum_m coefficients[m] * u_{(j + offsets[m]) mod N}."""

    offsets: np.ndarray
    coefficients: np.ndarray
    dt: float
    dx: float
    name: str
    # Full-period stencils (offsets spanning one grid period) set this to
    # the period so that compositions wrap instead of widening without
    # bound; narrow stencils leave it None and compose on the integer line.
    period: int | None = None

    def __post_init__(self) -> None:
        offs = np.array(self.offsets, dtype=int)
        coef = np.array(self.coefficients, dtype=float)
        if offs.ndim != 1 or offs.shape != coef.shape:
            raise ValueError("offsets and coefficients must be 1-d and the same length")
        if len(np.unique(offs)) != offs.size:
            raise ValueError("offsets must be distinct")
        if not np.isfinite(coef).all():
            raise ValueError("coefficients must be finite")
        if not (self.dt > 0 and self.dx > 0):
            raise ValueError(f"dt, dx must be positive, got dt={self.dt}, dx={self.dx}")
        if self.period is not None and (
            offs.min() < 0 or offs.max() >= self.period
        ):
            raise ValueError("full-period offsets must lie in [0, period)")
        offs.setflags(write=False)
        coef.setflags(write=False)
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "coefficients", coef)

    @property
    def width(self) -> int:
        return int(self.offsets.max() - self.offsets.min()) + 1

    @property
    def courant_ratio(self) -> float:
        return self.dt / self.dx**2


def ftcs_heat(dt: float, dx: float) -> StencilScheme:
    """Explicit heat scheme u + (u(x+dx) - 2u + u(x-dx)) dt/dx^2.

    Coefficients (r, 1-2r, r) with r = dt/dx^2; stable iff 2 dt <= dx^2.
    """
    r = dt / dx**2
    return StencilScheme(
        offsets=np.array([-1, 0, 1]),
        coefficients=np.array([r, 1.0 - 2.0 * r, r]),
        dt=dt,
        dx=dx,
        name="ftcs",
    )


def backward_euler_heat(dt: float, dx: float, grid_n: int) -> StencilScheme:
    """Implicit scheme (I - dt D2)^{-1} as a dense full-period stencil.

    D2 is the periodic second difference.  The circulant eigenvalues
    1 + 4r sin^2(pi k / N) are >= 1, so the inverse always exists; its
    first row is recovered by an inverse DFT and checked by applying the
    forward operator back to a probe.
    """
    if grid_n < 4:
        raise InvalidGridError(f"backward Euler needs grid_n >= 4, got {grid_n}")
    r = dt / dx**2
    k = np.arange(grid_n)
    eigenvalues = 1.0 + 4.0 * r * np.sin(np.pi * k / grid_n) ** 2
    coefficients = np.fft.fft(1.0 / eigenvalues).real / grid_n
    scheme = StencilScheme(
        offsets=np.arange(grid_n),
        coefficients=coefficients,
        dt=dt,
        dx=dx,
        name="backward_euler",
        period=grid_n,
    )
    # Residual check of the circulant solve: (I - dt D2) applied to the
    # stencil's action on a probe must reproduce the probe.
    rng = np.random.default_rng(0)
    u = rng.uniform(-1.0, 1.0, size=grid_n)
    v = apply_values(scheme, u)
    recovered = v - r * (np.roll(v, -1) - 2.0 * v + np.roll(v, 1))
    if np.max(np.abs(recovered - u)) > 1e-10 * max(1.0, np.max(np.abs(u))):
        raise RuntimeError("backward Euler circulant inverse residual exceeds 1e-10")
    return scheme


def apply_values(s: StencilScheme, values: np.ndarray) -> np.ndarray:
    """Stencil action on a raw sample array (periodic wrap-around)."""
    n = values.size
    if s.width > n:
        raise InvalidGridError(f"stencil width {s.width} exceeds grid size {n}")
    if s.offsets.size > _FFT_APPLY_CUTOFF:
        kernel = np.zeros(n)
        np.add.at(kernel, np.mod(s.offsets, n), s.coefficients)
        return np.fft.ifft(np.fft.fft(values) * np.conj(np.fft.fft(kernel))).real
    out = np.zeros(n)
    for off, coef in zip(s.offsets, s.coefficients):
        out += coef * np.roll(values, -int(off))
    return out


def apply_scheme(s: StencilScheme, u: GridFunction) -> GridFunction:
    """One time step: circular convolution of the stencil with u."""
    return GridFunction(apply_values(s, u.values), u.domain_length)


def _dense(s: StencilScheme) -> tuple:
    """Contiguous coefficient array plus the offset of its first entry."""
    lo = int(s.offsets.min())
    arr = np.zeros(s.width)
    arr[s.offsets - lo] = s.coefficients
    return lo, arr


def _from_dense(lo: int, arr: np.ndarray, template: StencilScheme, name: str) -> StencilScheme:
    return StencilScheme(
        offsets=np.arange(lo, lo + arr.size),
        coefficients=arr,
        dt=template.dt,
        dx=template.dx,
        name=name,
    )


def _checked(out: np.ndarray) -> np.ndarray:
    if not np.isfinite(out).all() or np.max(np.abs(out)) > OVERFLOW_LIMIT:
        raise DivergedOperatorError("stencil coefficients overflowed during composition")
    return out


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _checked(np.convolve(a, b))


def _wrapped(s: StencilScheme, period: int) -> np.ndarray:
    """Length-``period`` kernel indexed by offset mod period."""
    kernel = np.zeros(period)
    np.add.at(kernel, np.mod(s.offsets, period), s.coefficients)
    return kernel


def _conv_circular(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.size
    return _checked(np.fft.irfft(np.fft.rfft(a) * np.fft.rfft(b), n=n))


def _from_wrapped(
    kernel: np.ndarray, period: int, template: StencilScheme, name: str
) -> StencilScheme:
    return StencilScheme(
        offsets=np.arange(period),
        coefficients=kernel,
        dt=template.dt,
        dx=template.dx,
        name=name,
        period=period,
    )


def _joint_period(first: StencilScheme, second: StencilScheme) -> int | None:
    if first.period is not None and second.period is not None:
        if first.period != second.period:
            raise InvalidGridError(
                f"cannot compose stencils of periods {first.period} and {second.period}"
            )
    return first.period or second.period


def compose(first: StencilScheme, second: StencilScheme) -> StencilScheme:
    """Stencil of the composition second(first(u)): offset-wise convolution.

    If either factor is a full-period stencil the convolution wraps modulo
    that period, so the result never grows wider than one grid period.
    """
    name = f"{first.name}*{second.name}"
    period = _joint_period(first, second)
    if period is not None:
        kernel = _conv_circular(_wrapped(first, period), _wrapped(second, period))
        return _from_wrapped(kernel, period, first, name)
    lo_a, arr_a = _dense(first)
    lo_b, arr_b = _dense(second)
    return _from_dense(lo_a + lo_b, _conv(arr_a, arr_b), first, name)


def power(s: StencilScheme, n: int) -> StencilScheme:
    """n-fold self-composition by repeated squaring of the coefficient array.

    Raises :class:`DivergedOperatorError` if coefficients exceed the
    overflow threshold, which signals gross instability.
    """
    if n < 1:
        raise ValueError(f"power needs n >= 1, got {n}")
    if n == 1:
        return s
    name = f"{s.name}^{n}"
    if s.period is not None:
        result = np.zeros(s.period)
        result[0] = 1.0
        sq = _wrapped(s, s.period)
        m = n
        while m:
            if m & 1:
                result = _conv_circular(result, sq)
            m >>= 1
            if m:
                sq = _conv_circular(sq, sq)
        return _from_wrapped(result, s.period, s, name)
    lo, base = _dense(s)
    result_lo, result = 0, np.array([1.0])
    sq_lo, sq = lo, base
    m = n
    while m:
        if m & 1:
            result = _conv(result, sq)
            result_lo += sq_lo
        m >>= 1
        if m:
            sq = _conv(sq, sq)
            sq_lo *= 2
    return _from_dense(result_lo, result, s, name)
