"""Periodic grid functions with the sup-norm.

A :class:`GridFunction` is a uniform sample of a function on the periodic
interval ``[0, domain_length)``.  It is the concrete, finite-dimensional
stand-in for elements of the normed space in which both exact evolutions
and finite-difference trajectories live.  All objects here are immutable
value types: operations return fresh grid functions and never mutate
their inputs, so refinement sweeps can share them freely across workers.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import DivergedValueError, InvalidGridError

TWO_PI = 2.0 * math.pi

__all__ = [
    "TWO_PI",
    "GridFunction",
    "RefinementPath",
    "Probe",
    "Sine",
    "Cosine",
    "Constant",
    "PointMass",
    "RandomUniform",
    "Mixture",
    "parse_probe",
    "sample",
    "sup_norm",
    "wavenumbers",
    "spectral_coefficients",
    "from_spectral_coefficients",
    "resample",
    "is_band_limited",
    "write_grid_csv",
]


@dataclass(frozen=True)
class GridFunction:
    """Real samples ``values[j] = u(j * dx)`` on a periodic uniform grid.

    ``diverged`` marks a trajectory that blew up; only then may samples be
    non-finite.
    """

    values: np.ndarray
    domain_length: float = TWO_PI
    diverged: bool = False

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise InvalidGridError(f"need at least 2 samples, got shape {vals.shape}")
        if not (self.domain_length > 0):
            raise InvalidGridError(f"domain_length must be positive, got {self.domain_length}")
        if not self.diverged and not np.isfinite(vals).all():
            raise DivergedValueError("non-finite sample in grid function not flagged as diverged")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return self.domain_length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.dx


def sup_norm(u: GridFunction) -> float:
    """Max over samples of ``|u_j|``; raises on non-finite samples."""
    if u.diverged or not np.isfinite(u.values).all():
        raise DivergedValueError("sup_norm of a diverged grid function")
    return float(np.max(np.abs(u.values)))


# ---------------------------------------------------------------------------
# Probe descriptors: closed-form initial data that can be sampled on any grid.
# ---------------------------------------------------------------------------

class Probe:
    """Descriptor of initial data; ``evaluate_on`` produces samples for any N."""

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def max_wavenumber(self) -> int | None:
        """Largest Fourier mode present, or None if broadband."""
        return None

    def __add__(self, other: "Probe") -> "Mixture":
        return Mixture((self, other))


@dataclass(frozen=True)
class Sine(Probe):
    wavenumber: int
    amplitude: float = 1.0

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(self.wavenumber * x)

    def max_wavenumber(self) -> int:
        return abs(self.wavenumber)

    def __str__(self) -> str:
        return f"sine({self.wavenumber})"


@dataclass(frozen=True)
class Cosine(Probe):
    wavenumber: int
    amplitude: float = 1.0

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        return self.amplitude * np.cos(self.wavenumber * x)

    def max_wavenumber(self) -> int:
        return abs(self.wavenumber)

    def __str__(self) -> str:
        return f"cosine({self.wavenumber})"


@dataclass(frozen=True)
class Constant(Probe):
    value: float = 1.0

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.value)

    def max_wavenumber(self) -> int:
        return 0

    def __str__(self) -> str:
        return f"constant({self.value:g})"


@dataclass(frozen=True)
class PointMass(Probe):
    """Indicator of a single grid node; the node index is taken modulo N."""

    index: int = 0

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        vals = np.zeros_like(x)
        vals[self.index % x.size] = 1.0
        return vals

    def __str__(self) -> str:
        return f"point_mass({self.index})"


@dataclass(frozen=True)
class RandomUniform(Probe):
    """Uniform samples in [-1, 1); deterministic for a fixed seed and N."""

    seed: int = 0

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(-1.0, 1.0, size=x.size)

    def __str__(self) -> str:
        return f"random_uniform({self.seed})"


@dataclass(frozen=True)
class Mixture(Probe):
    terms: tuple

    def evaluate_on(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for term in self.terms:
            out = out + term.evaluate_on(x)
        return out

    def max_wavenumber(self) -> int | None:
        ks = [t.max_wavenumber() for t in self.terms]
        if any(k is None for k in ks):
            return None
        return max(ks, default=0)

    def __add__(self, other: Probe) -> "Mixture":
        return Mixture(self.terms + (other,))

    def __str__(self) -> str:
        return "+".join(str(t) for t in self.terms)


_PROBE_TERM = re.compile(
    r"^\s*(?:(?P<amp>[-+]?[0-9.eE+-]+)\s*\*\s*)?"
    r"(?P<name>[a-z_]+)\s*\(\s*(?P<arg>[-+]?[0-9.eE+-]*)\s*\)\s*$"
)


def parse_probe(text: str) -> Probe:
    """Parse descriptors like ``sine(1)``, ``sine(1)+sine(31)``, ``0.5*cosine(2)``."""
    terms = []
    for chunk in text.split("+"):
        m = _PROBE_TERM.match(chunk)
        if m is None:
            raise InvalidGridError(f"unparseable probe term: {chunk!r}")
        amp = float(m.group("amp")) if m.group("amp") else 1.0
        name, arg = m.group("name"), m.group("arg")
        if name == "sine":
            term: Probe = Sine(int(arg), amp)
        elif name == "cosine":
            term = Cosine(int(arg), amp)
        elif name == "constant":
            term = Constant(amp * float(arg if arg else 1.0))
        elif name == "point_mass":
            term = PointMass(int(arg))
        elif name == "random_uniform":
            term = RandomUniform(int(arg))
        else:
            raise InvalidGridError(f"unknown probe kind: {name!r}")
        terms.append(term)
    if len(terms) == 1:
        return terms[0]
    return Mixture(tuple(terms))


def sample(probe: Probe, n: int, domain_length: float = TWO_PI) -> GridFunction:
    """Sample a probe descriptor on an N-point periodic grid."""
    if n < 2:
        raise InvalidGridError(f"grid needs N >= 2, got {n}")
    x = np.arange(n) * (domain_length / n)
    return GridFunction(probe.evaluate_on(x), domain_length)


# ---------------------------------------------------------------------------
# Discrete Fourier representation.  Coefficients are normalized so that
# u_j = sum_k c_k exp(i k x_j), ordered by wavenumber -floor(N/2) .. ceil(N/2)-1.
# ---------------------------------------------------------------------------

def wavenumbers(n: int) -> np.ndarray:
    return np.arange(-(n // 2), (n + 1) // 2)


def spectral_coefficients(u: GridFunction) -> np.ndarray:
    """Modal coefficients ordered to match :func:`wavenumbers`."""
    return np.fft.fftshift(np.fft.fft(u.values)) / u.n


def from_spectral_coefficients(coeffs: np.ndarray, domain_length: float = TWO_PI) -> GridFunction:
    """Inverse of :func:`spectral_coefficients` (real part of the synthesis)."""
    n = len(coeffs)
    vals = np.fft.ifft(np.fft.ifftshift(np.asarray(coeffs))) * n
    return GridFunction(vals.real, domain_length)


def resample(u: GridFunction, n_new: int) -> GridFunction:
    """Trigonometric resampling onto an ``n_new``-point grid of the same domain."""
    if n_new < 2:
        raise InvalidGridError(f"grid needs N >= 2, got {n_new}")
    return GridFunction(scipy.signal.resample(u.values, n_new), u.domain_length)


def is_band_limited(u: GridFunction, max_mode: int, rel_tol: float = 1e-12) -> bool:
    """True if all modal energy above |k| = max_mode is negligible."""
    coeffs = spectral_coefficients(u)
    ks = wavenumbers(u.n)
    total = np.max(np.abs(coeffs))
    if total == 0.0:
        return True
    high = np.abs(coeffs[np.abs(ks) > max_mode])
    return bool(high.size == 0 or np.max(high) <= rel_tol * total)


def write_grid_csv(u: GridFunction, stream) -> None:
    """Serialize one row per sample: x_j, value with 17 significant digits."""
    stream.write("x,value\n")
    for x, v in zip(u.nodes, u.values):
        stream.write(f"{x:.17g},{v:.17g}\n")


# ---------------------------------------------------------------------------
# Refinement paths dx = alpha(dt).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefinementPath:
    """The relation ``dx = alpha(dt)`` driving a refinement sweep.

    Either a power rule ``dx = c * dt**p`` or an explicit (dt, dx) table.
    """

    power: tuple | None = None
    table: tuple | None = None

    def __post_init__(self) -> None:
        if (self.power is None) == (self.table is None):
            raise InvalidGridError("exactly one of power/table must be given")
        if self.power is not None:
            c, p = self.power
            if not (c > 0 and p > 0):
                raise InvalidGridError(f"power rule needs c, p > 0, got c={c}, p={p}")
        else:
            rows = sorted(self.table)
            if not rows:
                raise InvalidGridError("empty refinement table")
            prev_dx = 0.0
            for dt, dx in rows:
                if not (dt > 0 and dx > 0):
                    raise InvalidGridError(f"nonpositive table entry ({dt}, {dx})")
                if dx < prev_dx:
                    raise InvalidGridError("table dx must be nondecreasing in dt")
                prev_dx = dx
            object.__setattr__(self, "table", tuple(rows))

    @classmethod
    def from_power(cls, c: float, p: float) -> "RefinementPath":
        return cls(power=(float(c), float(p)))

    @classmethod
    def from_table(cls, pairs) -> "RefinementPath":
        return cls(table=tuple((float(a), float(b)) for a, b in pairs))

    @classmethod
    def cfl_boundary(cls) -> "RefinementPath":
        """dx = sqrt(2 dt): the tightest spacing keeping r = dt/dx^2 <= 1/2."""
        return cls.from_power(math.sqrt(2.0), 0.5)

    @classmethod
    def fixed_ratio(cls, r: float) -> "RefinementPath":
        """dx chosen so that dt/dx^2 stays at the given ratio r."""
        if not (r > 0):
            raise InvalidGridError(f"ratio must be positive, got {r}")
        return cls.from_power(1.0 / math.sqrt(r), 0.5)

    def dx_for(self, dt: float) -> float:
        if not (dt > 0):
            raise InvalidGridError(f"dt must be positive, got {dt}")
        if self.power is not None:
            c, p = self.power
            return c * dt**p
        for tdt, tdx in self.table:
            if math.isclose(tdt, dt, rel_tol=1e-12):
                return tdx
        raise InvalidGridError(f"dt={dt} not in refinement table")

    def grid_for(self, dt: float, domain_length: float = TWO_PI) -> tuple:
        """Pick the grid size for a sweep cell: largest dx >= alpha(dt).

        Flooring N keeps the actual spacing at or above the path target, so a
        path at or below the CFL boundary never lands on the unstable side.
        Returns (n, dx).
        """
        target = self.dx_for(dt)
        n = int(math.floor(domain_length / target))
        if n < 4:
            raise InvalidGridError(f"dx target {target} too coarse for the domain")
        return n, domain_length / n
