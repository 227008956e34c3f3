"""Pure numpy versions of the grid kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same results up to round-off.
"""
import numpy as np


def shell_energies(power, shell_lo, weight_lo, weight_hi, nshells):
    """Accumulate ``sum(weight**2 * power)`` into dyadic bins.

    Each grid frequency touches at most two shells: ``shell_lo`` (with
    ``weight_lo``) and ``shell_lo + 1`` (with ``weight_hi``).  Frequencies
    with ``shell_lo < 0`` (the mean mode) are skipped.
    """
    out = np.zeros(nshells)
    mask = shell_lo >= 0
    lo = shell_lo[mask]
    p = power[mask]
    out += np.bincount(lo, weights=weight_lo[mask] ** 2 * p, minlength=nshells)[:nshells]
    hi = lo + 1
    keep = hi < nshells
    out += np.bincount(hi[keep], weights=(weight_hi[mask] ** 2 * p)[keep],
                       minlength=nshells)[:nshells]
    return out


def lp_power_sum(values, p):
    """Return ``sum(|values|**p)`` over all nodes."""
    a = np.abs(values)
    if p == 2.0:
        return float(np.dot(a.ravel(), a.ravel()))
    return float(np.sum(a ** p))


def advect_product(u1, u2, g1, g2):
    """Pointwise ``u1*g1 + u2*g2`` on physical grids."""
    return u1 * g1 + u2 * g2


def ifrk4_combine(v, k1, k2, k3, k4, e_full, e_half, dt):
    """Final IFRK4 update ``E v + dt/6 (E k1 + 2 E/2 (k2 + k3) + k4)``."""
    return e_full * (v + (dt / 6.0) * k1) + (dt / 3.0) * e_half * (k2 + k3) + (dt / 6.0) * k4
