"""Initial profiles: exact analytic ones and random power-law spectra."""
import numpy as np

from .config import InitialDataSpec
from .errors import ConfigurationError
from .littlewood_paley import besov_norm_2inf
from .spectral import SpectralField, lp_norm, single_mode, to_physical


def _random_spectrum(spec, grid, s0):
    beta = s0 + 1.0 if spec.beta is None else spec.beta
    kmag = grid.kmag
    band = (kmag >= spec.k_lo) & (kmag <= spec.k_hi) & grid.dealias_mask & ~grid.nyquist_mask
    if not band.any():
        raise ConfigurationError(
            f"band [{spec.k_lo}, {spec.k_hi}] holds no resolved frequencies on n={grid.n}")
    rng = np.random.default_rng(spec.seed)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=kmag.shape)
    amp = np.zeros_like(kmag)
    amp[band] = kmag[band] ** (-beta)
    c = amp * np.exp(1j * phase)
    # keep the upper half-plane and mirror it so the field is real
    xi1, xi2 = grid.xi1, grid.xi2
    lower = (xi2 < 0) | ((xi2 == 0) & (xi1 < 0))
    mirrored = np.conj(np.roll(c[::-1, ::-1], 1, axis=(0, 1)))
    c = np.where(lower, mirrored, c)
    c[0, 0] = 0.0
    return SpectralField(grid, c)


def generate_initial_data(spec, grid, alpha=0.75, snapshot_loader=None):
    """Build the initial field described by ``spec`` on ``grid``.

    Named profiles are exact:

    * ``single_mode``: sin(x1)
    * ``one_dimensional``: sum_{m=1..4} sin(m x1) / m^2
    * ``two_mode``: sin(x1) + cos(x2)

    ``random_spectrum`` draws independent phases with |c(xi)| = |xi|^-beta on
    ``k_lo <= |xi| <= k_hi`` (restricted to the dealiased range), then rescales
    to the requested Besov or L^p_crit norm.
    """
    if not isinstance(spec, InitialDataSpec):
        raise ConfigurationError("expected an InitialDataSpec")
    s0 = 2.0 - 2.0 * alpha
    if spec.kind == "single_mode":
        return single_mode(grid, 1, 0)
    if spec.kind == "one_dimensional":
        out = SpectralField.zeros(grid)
        for m in range(1, 5):
            out = out + single_mode(grid, m, 0, amplitude=1.0 / m ** 2)
        return out
    if spec.kind == "two_mode":
        return single_mode(grid, 1, 0) + single_mode(grid, 0, 1, kind="cos")
    if spec.kind == "snapshot":
        if snapshot_loader is None:
            from .io import load_snapshot as snapshot_loader
        snap = snapshot_loader(spec.path)
        if snap.theta.grid.n != grid.n:
            raise ConfigurationError(
                f"snapshot has n={snap.theta.grid.n}, config has n={grid.n}")
        return snap.theta
    field = _random_spectrum(spec, grid, s0)
    if spec.normalize == "besov":
        norm = besov_norm_2inf(field, s0)
    elif spec.normalize == "lp_crit":
        if alpha <= 0.5:
            raise ConfigurationError("lp_crit normalisation needs alpha > 1/2")
        norm = lp_norm(to_physical(field), 2.0 / (2.0 * alpha - 1.0))
    else:
        return field
    return field * (spec.target / norm)
