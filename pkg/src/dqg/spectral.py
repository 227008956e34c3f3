"""Spectral representation of real 2pi-periodic fields and Fourier multipliers.

Conventions
-----------
Arrays are ``(n, n)`` with axis 0 running over x2 / xi2 and axis 1 over
x1 / xi1, so a C-order ravel has xi1 fastest.  Coefficients are stored in
FFT order and normalised so that

    f(x) = sum_xi c(xi) exp(i xi.x),   c = fft2(values) / n**2.

With this choice ``||f||_{L2}^2 = PARSEVAL_CONSTANT * sum |c|^2`` where
``PARSEVAL_CONSTANT = (2 pi)^2`` is the area of the torus.

Multipliers of the form ``|xi|^s`` (s != 0) and ``xi_j/|xi|`` send the mean
mode to zero.  Odd multipliers (Riesz transforms, gradients) also zero every
Nyquist row and column, where a real field has no well-defined odd part.
"""
from dataclasses import dataclass
from functools import cached_property
import os

import numpy as np
import scipy.fft

from . import kernels
from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi
AREA = TWO_PI ** 2
PARSEVAL_CONSTANT = AREA
_WORKERS = int(os.environ.get("DQG_THREADS", "1"))


def _fft2(a):
    return scipy.fft.fft2(a, workers=_WORKERS)


def _ifft2(a):
    return scipy.fft.ifft2(a, workers=_WORKERS)


@dataclass(frozen=True)
class GridSpec:
    """Square periodic grid on [0, 2pi)^2."""

    n: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise ConfigurationError(f"n must be a power of two >= 16, got {n!r}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ConfigurationError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")

    @property
    def domain_length(self):
        return TWO_PI

    @property
    def dx(self):
        return TWO_PI / self.n

    @cached_property
    def freqs(self):
        """Integer frequencies along one axis, FFT order."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).round().astype(np.int64)

    @cached_property
    def xi1(self):
        return np.broadcast_to(self.freqs[None, :].astype(float), (self.n, self.n))

    @cached_property
    def xi2(self):
        return np.broadcast_to(self.freqs[:, None].astype(float), (self.n, self.n))

    @cached_property
    def kmag(self):
        return np.hypot(self.xi1, self.xi2)

    @cached_property
    def nyquist_mask(self):
        """True where either frequency equals -n/2."""
        nyq = -(self.n // 2)
        return (self.freqs[None, :] == nyq) | (self.freqs[:, None] == nyq)

    @property
    def dealias_cutoff(self):
        return int(np.floor(self.dealias_fraction * self.n / 2 + 1e-12))

    @cached_property
    def dealias_mask(self):
        """True for retained modes."""
        f = np.abs(self.freqs)
        return np.maximum(f[None, :], f[:, None]) <= self.dealias_cutoff

    def nodes(self):
        """Physical coordinates ``(x1, x2)`` as ``(n, n)`` arrays."""
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="xy")

    def max_index(self, coeffs, rtol=0.0):
        """Largest ``max(|xi1|, |xi2|)`` carrying a coefficient above ``rtol*max``."""
        mag = np.abs(coeffs)
        top = mag.max() if mag.size else 0.0
        if top == 0.0:
            return 0
        f = np.abs(self.freqs)
        m = np.maximum(f[None, :], f[:, None])
        return int(m[mag > rtol * top].max())


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"coefficient shape {c.shape} does not match grid n={self.grid.n}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.n, grid.n), np.complex128))

    @property
    def mean(self):
        return self.coeffs[0, 0]

    def with_coeffs(self, coeffs):
        return SpectralField(self.grid, coeffs)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def norm(self):
        """L2 norm on the torus via Parseval."""
        return l2_norm(self)

    def symmetry_defect(self):
        """max |c(-xi) - conj c(xi)|, zero for a real field."""
        c = self.coeffs
        flipped = np.roll(c[::-1, ::-1], 1, axis=(0, 1))
        return float(np.max(np.abs(flipped - np.conj(c)))) if c.size else 0.0


@dataclass(frozen=True, eq=False)
class PhysicalField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"value shape {v.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("physical field contains NaN or Inf")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class VelocityField:
    u1: SpectralField
    u2: SpectralField

    def divergence(self):
        g = self.u1.grid
        return self.u1.with_coeffs(1j * (g.xi1 * self.u1.coeffs + g.xi2 * self.u2.coeffs))


def _check_same_grid(a, b):
    if a.grid.n != b.grid.n:
        raise ConfigurationError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")


def _resample_axis(c, m, axis):
    """Zero-pad or truncate along one axis, splitting/folding the Nyquist mode."""
    n = c.shape[axis]
    if m == n:
        return c
    c = np.moveaxis(c, axis, 0)
    out = np.zeros((m,) + c.shape[1:], dtype=c.dtype)
    if m > n:
        h = n // 2
        out[:h] = c[:h]
        out[m - h + 1:] = c[h + 1:]
        out[h] = 0.5 * c[h]
        out[m - h] = 0.5 * c[h]
    else:
        h = m // 2
        out[:h] = c[:h]
        out[h + 1:] = c[n - h + 1:]
        out[h] = c[h] + c[n - h]
    return np.moveaxis(out, 0, axis)


def resample(f, n_out):
    """Represent ``f`` on an ``n_out`` grid by spectral padding or truncation.

    Padding is exact.  Truncation drops modes outside the smaller grid and
    folds the two Nyquist halves together so the result stays real.
    """
    if n_out == f.grid.n:
        return f
    grid = GridSpec(n_out, f.grid.dealias_fraction)
    c = _resample_axis(_resample_axis(f.coeffs, n_out, 0), n_out, 1)
    return SpectralField(grid, c)


def to_physical(f, n_out=None):
    """Sample ``f`` on the grid nodes (optionally of a finer ``n_out`` grid)."""
    if n_out is not None and n_out != f.grid.n:
        f = resample(f, n_out)
    n = f.grid.n
    return PhysicalField(f.grid, _ifft2(f.coeffs).real * (n * n))


def to_spectral(g, grid=None):
    if grid is not None and grid.n != g.grid.n:
        raise ConfigurationError(f"grid mismatch: n={grid.n} vs n={g.grid.n}")
    n = g.grid.n
    return SpectralField(g.grid, _fft2(g.values) / (n * n))


def physical_values(f):
    n = f.grid.n
    return _ifft2(f.coeffs).real * (n * n)


def spectral_from_values(grid, values):
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n, grid.n):
        raise ConfigurationError(
            f"value shape {values.shape} does not match grid n={grid.n}")
    return SpectralField(grid, _fft2(values) / (grid.n * grid.n))


def _power_multiplier(grid, s):
    if s == 0:
        return None
    k = grid.kmag
    m = np.zeros_like(k)
    nz = k > 0
    m[nz] = k[nz] ** s
    return m


def lambda_power(f, s):
    """Apply Lambda^s, i.e. multiply by |xi|^s; the mean mode goes to 0 for s != 0."""
    m = _power_multiplier(f.grid, s)
    if m is None:
        return f
    return f.with_coeffs(f.coeffs * m)


def fractional_laplacian(f, alpha):
    """(-Delta)^alpha with multiplier |xi|^(2 alpha)."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}")
    return lambda_power(f, 2.0 * alpha)


def _riesz_multiplier(grid, j):
    if j not in (1, 2):
        raise ConfigurationError(f"Riesz axis must be 1 or 2, got {j}")
    xi = grid.xi1 if j == 1 else grid.xi2
    k = grid.kmag
    m = np.zeros(k.shape, dtype=np.complex128)
    nz = (k > 0) & ~grid.nyquist_mask
    m[nz] = -1j * xi[nz] / k[nz]
    return m


def riesz_transform(f, j):
    """R_j with multiplier -i xi_j/|xi|."""
    return f.with_coeffs(f.coeffs * _riesz_multiplier(f.grid, j))


def gradient(f):
    """(d/dx1 f, d/dx2 f); Nyquist rows/columns dropped."""
    g = f.grid
    keep = ~g.nyquist_mask
    return (f.with_coeffs(1j * g.xi1 * f.coeffs * keep),
            f.with_coeffs(1j * g.xi2 * f.coeffs * keep))


def geostrophic_velocity(theta):
    """J(theta) = (-R2 theta, R1 theta)."""
    return VelocityField(-riesz_transform(theta, 2), riesz_transform(theta, 1))


def lp_norm(g, p):
    """L^p norm on the torus by node quadrature; ``p=inf`` gives the max norm."""
    if isinstance(g, SpectralField):
        g = to_physical(g)
    p = float(p)
    if not p >= 1.0:
        raise ConfigurationError(f"L^p norm needs p >= 1, got {p}")
    v = g.values
    if np.isinf(p):
        return float(np.max(np.abs(v))) if v.size else 0.0
    total = kernels.lp_power_sum(v, p)
    return float((total / v.size * AREA) ** (1.0 / p))


def l2_norm(f):
    """L2 norm from the coefficients (Parseval)."""
    c = f.coeffs.ravel()
    return float(np.sqrt(PARSEVAL_CONSTANT * np.vdot(c, c).real))


def inner(f, g):
    """Real L2 inner product of two real fields."""
    _check_same_grid(f, g)
    return float(PARSEVAL_CONSTANT * np.vdot(g.coeffs.ravel(), f.coeffs.ravel()).real)


def dealias(f):
    """Zero modes with max(|xi1|, |xi2|) above the dealiasing cutoff."""
    return f.with_coeffs(f.coeffs * f.grid.dealias_mask)


def single_mode(grid, m1, m2, kind="sin", amplitude=1.0):
    """Exact coefficients of ``amplitude * sin/cos(m1 x1 + m2 x2)``."""
    c = np.zeros((grid.n, grid.n), np.complex128)
    i1, i2 = m1 % grid.n, m2 % grid.n
    j1, j2 = (-m1) % grid.n, (-m2) % grid.n
    if kind == "sin":
        c[i2, i1] += amplitude / 2j
        c[j2, j1] -= amplitude / 2j
    elif kind == "cos":
        c[i2, i1] += amplitude / 2
        c[j2, j1] += amplitude / 2
    else:
        raise ConfigurationError(f"unknown mode kind {kind!r}")
    return SpectralField(grid, c)
