"""Time series of norms recorded during a run."""
from dataclasses import dataclass, field

import numpy as np

from .littlewood_paley import build_filter_bank, shell_l2_norms
from .spectral import lambda_power, l2_norm, lp_norm, to_physical


def critical_lebesgue_exponent(alpha):
    return 2.0 / (2.0 * alpha - 1.0) if alpha > 0.5 else np.inf


@dataclass
class NormSeries:
    """Norm samples of one run.

    ``lp`` maps each tracked exponent p to its samples of ||theta||_{L^p};
    ``shells`` holds rows of ||P_k theta||_{L2}; ``besov`` is
    max_k 2^(k s0) ||P_k theta||_{L2}; ``h_alpha`` is ||Lambda^alpha theta||_{L2}.
    """

    alpha: float
    kappa: float
    p_values: tuple
    times: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    lp: dict = field(default_factory=dict)
    h_alpha: list = field(default_factory=list)
    besov: list = field(default_factory=list)
    shells: list = field(default_factory=list)
    mean: list = field(default_factory=list)

    @property
    def s0(self):
        return 2.0 - 2.0 * self.alpha

    @property
    def p_crit(self):
        return critical_lebesgue_exponent(self.alpha)

    @property
    def J(self):
        """Running supremum of the Besov functional."""
        return np.maximum.accumulate(np.asarray(self.besov)) if self.besov else np.array([])

    def shell_array(self):
        return np.asarray(self.shells)

    def weighted_shells(self):
        s = self.shell_array()
        return s * 2.0 ** (self.s0 * np.arange(s.shape[1])) if s.size else s

    def __len__(self):
        return len(self.times)


def new_series(alpha, kappa, extra_p=(4.0,)):
    ps = [2.0]
    pc = critical_lebesgue_exponent(alpha)
    if np.isfinite(pc):
        ps.append(pc)
    ps.extend(extra_p)
    p_values = tuple(dict.fromkeys(float(p) for p in ps))
    return NormSeries(alpha, kappa, p_values, lp={p: [] for p in p_values})


def record(series, t, theta, oversample=2):
    """Append one sample; L^p norms use node quadrature on an ``oversample``-fold grid."""
    bank = build_filter_bank(theta.grid)
    phys = to_physical(theta, theta.grid.n * oversample)
    series.times.append(float(t))
    series.l2.append(l2_norm(theta))
    for p in series.p_values:
        series.lp[p].append(l2_norm(theta) if p == 2.0 else lp_norm(phys, p))
    series.h_alpha.append(l2_norm(lambda_power(theta, series.alpha)))
    sh = shell_l2_norms(theta, bank)
    series.shells.append(sh)
    ks = np.arange(sh.size)
    series.besov.append(float(np.max(2.0 ** (ks * series.s0) * sh)))
    series.mean.append(complex(theta.coeffs[0, 0]))
