"""Dyadic Littlewood-Paley machinery on the periodic grid.

The cutoff profile is the standard C-infinity step

    chi(r) = h(2 - r) / (h(2 - r) + h(r - 1)),   h(t) = exp(-1/t) for t > 0,

so chi = 1 on r <= 1 and chi = 0 on r >= 2.  Shell k carries the multiplier
phi_k(xi) = chi(|xi| / 2^k) - chi(|xi| / 2^(k-1)).  On the integer lattice every
nonzero frequency lies in shell 0 or above, so shells run over 0..k_max.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import warnings

import numpy as np

from . import kernels
from .errors import AliasingError, ConfigurationError
from .spectral import (
    AREA,
    GridSpec,
    SpectralField,
    lp_norm,
    physical_values,
    resample,
    spectral_from_values,
)


def _h(t):
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def chi(r):
    """Smooth radial cutoff: 1 on [0, 1], 0 on [2, inf), monotone between."""
    r = np.abs(np.asarray(r, dtype=float))
    a = _h(2.0 - r)
    b = _h(r - 1.0)
    denom = a + b
    out = np.where(r <= 1.0, 1.0, 0.0)
    mid = (r > 1.0) & (r < 2.0)
    out[mid] = a[mid] / denom[mid]
    return out


def phi(r):
    """Annular bump chi(r) - chi(2r), supported in 1/2 < r < 2."""
    r = np.asarray(r, dtype=float)
    return chi(r) - chi(2.0 * r)


@dataclass(frozen=True, eq=False)
class DyadicFilterBank:
    grid: GridSpec
    k_min: int
    k_max: int
    shell_lo: np.ndarray = field(repr=False)
    weight_lo: np.ndarray = field(repr=False)
    weight_hi: np.ndarray = field(repr=False)

    @property
    def nshells(self):
        return self.k_max - self.k_min + 1

    @property
    def shells(self):
        return range(self.k_min, self.k_max + 1)

    def multiplier(self, k):
        """phi(2^-k xi) on the grid (zeros for k outside the bank)."""
        return _shell_table(self.grid, k)

    def below(self, k):
        """chi(2^-k xi) on the grid."""
        return chi(self.grid.kmag * 2.0 ** (-k))

    def partition_sum(self):
        return sum(self.multiplier(k) for k in self.shells)


@lru_cache(maxsize=32)
def _shell_table(grid, k):
    r = grid.kmag * 2.0 ** (-k)
    m = chi(r) - chi(2.0 * r)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=32)
def build_filter_bank(grid):
    """Filter bank covering every frequency of ``grid``.

    The top shell is chosen so the partition of unity holds on the whole grid,
    including the corners with |xi| up to n/sqrt(2).
    """
    kmag = grid.kmag
    kmax_freq = float(kmag.max())
    k_max = int(np.frexp(kmax_freq)[1])  # floor(log2 |xi|max) + 1
    shell_lo = np.full(kmag.shape, -1, dtype=np.int64)
    nz = kmag > 0
    shell_lo[nz] = np.frexp(kmag[nz])[1] - 1
    w_lo = np.zeros(kmag.shape)
    w_lo[nz] = chi(kmag[nz] / np.exp2(shell_lo[nz]))
    w_hi = np.where(nz, 1.0 - w_lo, 0.0)
    for a in (shell_lo, w_lo, w_hi):
        a.setflags(write=False)
    return DyadicFilterBank(grid, 0, k_max, shell_lo, np.ascontiguousarray(w_lo),
                            np.ascontiguousarray(w_hi))


def _bank(f, bank):
    if bank is None:
        return build_filter_bank(f.grid)
    if bank.grid.n != f.grid.n:
        raise ConfigurationError(
            f"filter bank grid n={bank.grid.n} does not match field n={f.grid.n}")
    return bank


def project_shell(f, k, bank=None):
    """P_k f."""
    bank = _bank(f, bank)
    if not bank.k_min <= k <= bank.k_max:
        warnings.warn(f"shell {k} outside bank range [{bank.k_min}, {bank.k_max}]; "
                      "returning zero field", stacklevel=2)
        return SpectralField.zeros(f.grid)
    return f.with_coeffs(f.coeffs * bank.multiplier(k))


def project_below(f, k):
    """P_{<k} with multiplier chi(2^-k xi); keeps the mean mode."""
    return f.with_coeffs(f.coeffs * chi(f.grid.kmag * 2.0 ** (-k)))


@dataclass(frozen=True, eq=False)
class ShellDecomposition:
    shells: list
    residual_mean: complex

    def reconstruct(self, grid):
        c = np.zeros((grid.n, grid.n), np.complex128)
        c[0, 0] = self.residual_mean
        for _, s in self.shells:
            c = c + s.coeffs
        return SpectralField(grid, c)


def decompose(f, bank=None):
    bank = _bank(f, bank)
    shells = [(k, project_shell(f, k, bank)) for k in bank.shells]
    return ShellDecomposition(shells, complex(f.coeffs[0, 0]))


def shell_l2_norms(f, bank=None, weight=None):
    """Array of ||P_k f||_{L2} for every shell in the bank.

    ``weight`` multiplies |c|^2 before binning (e.g. |xi|^(2s) gives the
    shell norms of Lambda^s f).
    """
    bank = _bank(f, bank)
    power = np.abs(f.coeffs) ** 2 * AREA
    if weight is not None:
        power = power * weight
    e = kernels.shell_energies(np.ascontiguousarray(power), bank.shell_lo,
                               bank.weight_lo, bank.weight_hi, bank.nshells)
    return np.sqrt(np.maximum(e, 0.0))


def lambda_shell_norms(f, s, bank=None):
    """||Lambda^s P_k f||_{L2} for every shell."""
    return shell_l2_norms(f, bank, weight=f.grid.kmag ** (2.0 * s))


def besov_norm_2inf(f, s, bank=None):
    """Homogeneous B^s_{2,inf} norm: max_k 2^(ks) ||P_k f||_{L2}."""
    bank = _bank(f, bank)
    norms = shell_l2_norms(f, bank)
    ks = np.arange(bank.k_min, bank.k_max + 1)
    return float(np.max(2.0 ** (ks * s) * norms)) if norms.size else 0.0


def besov_profile(f, s, bank=None):
    """2^(ks) ||P_k f||_{L2} per shell."""
    bank = _bank(f, bank)
    ks = np.arange(bank.k_min, bank.k_max + 1)
    return 2.0 ** (ks * s) * shell_l2_norms(f, bank)


def sobolev_norm(f, s, homogeneous=True, bank=None):
    """Dyadic H^s norm; the inhomogeneous version adds ||f||_{L2}^2."""
    bank = _bank(f, bank)
    ks = np.arange(bank.k_min, bank.k_max + 1)
    norms = shell_l2_norms(f, bank)
    total = float(np.sum(2.0 ** (2 * ks * s) * norms ** 2))
    if not homogeneous:
        c = f.coeffs.ravel()
        total += AREA * float(np.vdot(c, c).real)
    return float(np.sqrt(total))


def _values_on(f, grid):
    return physical_values(resample(f, grid.n))


def paraproduct_split(f, g, k, n_product=None, hh_lower=5):
    """Split P_k(f g) into high-high, high-low and low-high interaction terms.

    Returns ``(hh, hl, lh)`` on the product grid (``2n`` by default) with

        hh = P_k sum_{l >= k - hh_lower} P_l f * sum_{|m - l| <= 3} P_m g
        hl = P_k sum_{j=-3..3} P_{k+j} f * P_{l < k+j-3} g
        lh = P_k sum_{j=-3..3} P_{k+j} g * P_{l < k+j-3} f

    where ``P_{l < m}`` is the strict low-pass (all shells below m plus the
    mean).  The three terms sum to ``P_k(f g)`` exactly.  Shells of f below
    ``k - 5`` cannot reach shell k through the diagonal band, so
    ``hh_lower=5`` is the smallest exact choice.
    """
    if f.grid.n != g.grid.n:
        raise ConfigurationError("paraproduct factors must share a grid")
    n_p = n_product or 2 * f.grid.n
    need = f.grid.max_index(f.coeffs) + g.grid.max_index(g.coeffs)
    if need > n_p // 2:
        raise AliasingError(
            f"product needs max frequency {need} but grid n={n_p} holds {n_p // 2}")
    pgrid = GridSpec(n_p, f.grid.dealias_fraction)
    bank = build_filter_bank(pgrid)
    fp, gp = resample(f, n_p), resample(g, n_p)
    fl = {l: _values_on(project_shell(fp, l, bank), pgrid) for l in bank.shells}
    gl = {l: _values_on(project_shell(gp, l, bank), pgrid) for l in bank.shells}

    def low(h, m):
        # strict low-pass: shells < m plus the mean
        return physical_values(project_below(h, m - 1))

    zero = np.zeros((n_p, n_p))
    acc = zero.copy()
    for l in bank.shells:
        if l < k - hh_lower:
            continue
        band = sum((gl[m] for m in range(l - 3, l + 4) if m in gl), zero)
        acc += fl[l] * band
    hh = acc

    acc_hl, acc_lh = zero.copy(), zero.copy()
    for j in range(-3, 4):
        l = k + j
        if l not in fl:
            continue
        acc_hl += fl[l] * low(gp, l - 3)
        acc_lh += gl[l] * low(fp, l - 3)

    def pk(values):
        return project_shell(spectral_from_values(pgrid, values), k, bank)

    return pk(hh), pk(acc_hl), pk(acc_lh)


def padded_product(f, g, n_product=None):
    """f g on the zero-padded product grid (exact when no wrap-around occurs)."""
    n_p = n_product or 2 * f.grid.n
    pgrid = GridSpec(n_p, f.grid.dealias_fraction)
    prod = physical_values(resample(f, n_p)) * physical_values(resample(g, n_p))
    return spectral_from_values(pgrid, prod)


def product_shell(f, g, k, n_product=None):
    """P_k(f g) computed on the zero-padded product grid."""
    fg = padded_product(f, g, n_product)
    return project_shell(fg, k, build_filter_bank(fg.grid))


def check_lemma_exponents(s, p, q):
    if not 0.0 < s <= 1.0:
        raise ConfigurationError(f"need 0 < s <= 1, got s={s}")
    if not (2.0 < p < np.inf and 2.0 < q < np.inf):
        raise ConfigurationError(f"need 2 < p, q < inf, got p={p}, q={q}")
    if abs(1.0 / p + 1.0 / q - 0.5) > 1e-12:
        raise ConfigurationError(f"need 1/p + 1/q = 1/2, got {1.0 / p + 1.0 / q}")


def nonlinear_shell_bound_rhs(psi, k, s, p, q, bank=None):
    """Bound on the shell-k transport integral, without its constant:

        2^(k(1-s)) ||P_k psi||_{Lp} (sum_{l>=k-3} 2^(-s(l-k)) ||Lambda^s P_l psi||_{L2}) ||psi||_{Lq}
    """
    check_lemma_exponents(s, p, q)
    bank = _bank(psi, bank)
    psi_k = project_shell(psi, k, bank)
    lam = lambda_shell_norms(psi, s, bank)
    ls = np.arange(bank.k_min, bank.k_max + 1)
    sel = ls >= k - 3
    tail = float(np.sum(2.0 ** (-s * (ls[sel] - k)) * lam[sel]))
    return 2.0 ** (k * (1.0 - s)) * lp_norm(psi_k, p) * tail * lp_norm(psi, q)
