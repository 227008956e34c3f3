"""Integrating-factor RK4 time stepping for the dissipative QG equation

    theta_t + kappa (-Delta)^alpha theta + J(theta) . grad theta = 0,
    J(theta) = (-R2 theta, R1 theta).

The linear term is integrated exactly through exp(-kappa |xi|^(2 alpha) dt);
the transport term is advanced with classical RK4 and dealiased at every
stage.  |0|^(2 alpha) is taken as 0, so the mean mode is conserved exactly.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np
import scipy.fft

from . import kernels
from .errors import CFLViolation, NumericalBlowupError
from .series import new_series, record
from .spectral import SpectralField, _WORKERS, l2_norm

log = logging.getLogger(__name__)

GROWTH_LIMIT = 10.0


@dataclass(frozen=True, eq=False)
class Snapshot:
    time: float
    theta: SpectralField
    config_hash: str = ""


class _Operators:
    """Per-grid multiplier tables shared by all stages."""

    def __init__(self, grid):
        n = grid.n
        self.grid = grid
        k = grid.kmag
        keep = ~grid.nyquist_mask
        inv = np.zeros_like(k)
        nz = (k > 0) & keep
        inv[nz] = 1.0 / k[nz]
        # u1 = -R2 theta, u2 = R1 theta with R_j <-> -i xi_j/|xi|
        self.mult = np.stack([
            1j * grid.xi2 * inv,
            -1j * grid.xi1 * inv,
            1j * grid.xi1 * keep,
            1j * grid.xi2 * keep,
        ])
        self.mask = grid.dealias_mask
        self.scale = float(n * n)

    def nonlinear(self, c, t=0.0):
        """Dealiased coefficients of J(theta) . grad theta."""
        c = c * self.mask
        m = self.mult
        # two real fields per complex inverse transform
        packed = np.stack([m[0] * c + 1j * (m[1] * c), m[2] * c + 1j * (m[3] * c)])
        z = scipy.fft.ifft2(packed, workers=_WORKERS) * self.scale
        prod = kernels.advect_product(
            np.ascontiguousarray(z[0].real), np.ascontiguousarray(z[0].imag),
            np.ascontiguousarray(z[1].real), np.ascontiguousarray(z[1].imag))
        if not np.all(np.isfinite(prod)):
            raise NumericalBlowupError("non-finite value in transport term", t)
        return _full_spectrum(scipy.fft.rfft2(prod, workers=_WORKERS)) / self.scale * self.mask

    def max_speed(self, c):
        z = scipy.fft.ifft2(self.mult[0] * c + 1j * (self.mult[1] * c), workers=_WORKERS)
        return float(np.max(np.abs(z))) * self.scale


def _full_spectrum(half):
    """Expand an rfft2 half spectrum to the full Hermitian array."""
    n = half.shape[0]
    h = n // 2
    full = np.empty((n, n), dtype=np.complex128)
    full[:, :h + 1] = half
    tail = half[:, 1:h][:, ::-1]
    full[:, h + 1:] = np.conj(np.roll(tail[::-1], 1, axis=0))
    return full


_OPS = {}


def _ops(grid):
    key = (grid.n, grid.dealias_fraction)
    if key not in _OPS:
        _OPS[key] = _Operators(grid)
    return _OPS[key]


def nonlinear_term(theta, t=0.0):
    """J(theta) . grad theta, computed pseudo-spectrally and dealiased."""
    return theta.with_coeffs(_ops(theta.grid).nonlinear(theta.coeffs, t))


def dissipation_rate(grid, alpha, kappa):
    """kappa |xi|^(2 alpha) with the mean mode set to 0."""
    k = grid.kmag
    out = np.zeros_like(k)
    nz = k > 0
    out[nz] = kappa * k[nz] ** (2.0 * alpha)
    return out


def cfl_dt(theta, cfg):
    """cfl * dx / max|u|, capped at ``cfg.dt_max``."""
    speed = _ops(theta.grid).max_speed(theta.coeffs)
    if speed <= 1e-300:
        return cfg.dt_max
    return min(cfg.cfl_number * theta.grid.dx / speed, cfg.dt_max)


class Stepper:
    """IFRK4 stepper with cached integrating factors."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.ops = _ops(cfg.grid)
        self.rate = dissipation_rate(cfg.grid, cfg.alpha, cfg.kappa)
        self._cache = {}

    def factors(self, dt):
        if dt not in self._cache:
            if len(self._cache) > 8:
                self._cache.clear()
            self._cache[dt] = (np.exp(-self.rate * dt), np.exp(-self.rate * dt / 2))
        return self._cache[dt]

    def advance(self, c, dt, t=0.0):
        e, e2 = self.factors(dt)
        nl = self.ops.nonlinear
        k1 = -nl(c, t)
        k2 = -nl(e2 * (c + 0.5 * dt * k1), t)
        k3 = -nl(e2 * c + 0.5 * dt * k2, t)
        k4 = -nl(e * c + dt * e2 * k3, t)
        return kernels.ifrk4_combine(c, k1, k2, k3, k4, e, e2, dt)


def step(state, dt, cfg, stepper=None):
    """Advance ``state`` by one IFRK4 step of size ``dt``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if cfg.dt_policy == "cfl":
        limit = cfl_dt(state.theta, cfg)
        if dt > limit * (1 + 1e-12):
            raise CFLViolation(dt, limit)
    return _advance(state, dt, stepper or Stepper(cfg))


def _advance(state, dt, stepper):
    before = l2_norm(state.theta)
    c = stepper.advance(state.theta.coeffs, dt, state.time)
    t = state.time + dt
    if not np.all(np.isfinite(c)):
        raise NumericalBlowupError("non-finite coefficient", t)
    after = math.sqrt(np.vdot(c, c).real) * 2 * math.pi
    if before > 0 and after > GROWTH_LIMIT * before:
        raise NumericalBlowupError(f"L2 norm grew {after / before:.1f}x in one step", t)
    return Snapshot(t, SpectralField(state.theta.grid, c), state.config_hash)


def run(cfg, theta0=None, keep_snapshots=False, series=None, oversample=2):
    """Integrate from t=0 to ``cfg.t_end``.

    Samples are recorded at t=0, every ``cfg.diagnostic_stride`` steps and at
    the final time.  With ``keep_snapshots`` the sampled states are returned
    as well: ``(final, series, snapshots)``.  Fixed-step runs use a uniform
    step ``t_end / ceil(t_end / dt)``.
    """
    from .initial_data import generate_initial_data

    if theta0 is None:
        theta0 = generate_initial_data(cfg.initial_data, cfg.grid, cfg.alpha)
    if cfg.out_of_hypothesis:
        log.info("alpha=%s kappa=%s lies outside the theorem hypotheses (%s)",
                 cfg.alpha, cfg.kappa, cfg.regime)
    chash = cfg.config_hash()
    state = Snapshot(0.0, theta0, chash)
    series = series if series is not None else new_series(cfg.alpha, cfg.kappa)
    snaps = []

    def sample(s):
        record(series, s.time, s.theta, oversample)
        if keep_snapshots:
            snaps.append(s)

    sample(state)
    stepper = Stepper(cfg)
    nstep = 0
    if cfg.dt_policy == "fixed":
        nsteps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-9)) if cfg.t_end > 0 else 0
        dt = cfg.t_end / nsteps if nsteps else 0.0
        for nstep in range(1, nsteps + 1):
            state = _advance(state, dt, stepper)
            state = Snapshot(nstep * dt, state.theta, chash)
            if nstep % cfg.diagnostic_stride == 0 or nstep == nsteps:
                sample(state)
    else:
        while cfg.t_end - state.time > 1e-12 * max(1.0, cfg.t_end):
            dt = min(cfl_dt(state.theta, cfg), cfg.t_end - state.time)
            state = _advance(state, dt, stepper)
            nstep += 1
            done = cfg.t_end - state.time <= 1e-12 * max(1.0, cfg.t_end)
            if nstep % cfg.diagnostic_stride == 0 or done:
                sample(state)
    if keep_snapshots:
        return state, series, snaps
    return state, series
