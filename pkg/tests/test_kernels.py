import os
import subprocess
import sys

import numpy as np
import pytest

from dqg import kernels
from dqg.littlewood_paley import build_filter_bank
from dqg.spectral import GridSpec

BACKENDS = kernels.available_backends()


@pytest.fixture
def tables():
    grid = GridSpec(64)
    bank = build_filter_bank(grid)
    rng = np.random.default_rng(7)
    return bank, rng


def test_compiled_backend_is_active_when_built():
    if "cython" not in BACKENDS:
        pytest.skip("extension not built")
    assert kernels.BACKEND == "cython"


def test_fallback_can_be_forced():
    env = dict(os.environ, DQG_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "import dqg.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_shell_energies(tables, name):
    bank, rng = tables
    power = rng.random((64, 64))
    mod = BACKENDS[name]
    got = mod.shell_energies(power, bank.shell_lo, bank.weight_lo, bank.weight_hi, bank.nshells)
    expected = [np.sum(bank.multiplier(k) ** 2 * power) for k in bank.shells]
    assert np.allclose(got, expected, rtol=1e-13, atol=0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("p", [2.0, 3.5, 4.0, 10.0])
def test_lp_power_sum(name, p):
    v = np.random.default_rng(1).standard_normal((32, 32))
    assert BACKENDS[name].lp_power_sum(v, p) == pytest.approx(np.sum(np.abs(v) ** p), rel=1e-13)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend available")
    rng = np.random.default_rng(3)
    a, b = BACKENDS["python"], BACKENDS["cython"]
    u = [rng.standard_normal((32, 32)) for _ in range(4)]
    assert np.allclose(a.advect_product(*u), b.advect_product(*u), rtol=1e-15, atol=1e-15)
    c = [rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)) for _ in range(5)]
    e, e2 = rng.random((32, 32)), rng.random((32, 32))
    assert np.allclose(a.ifrk4_combine(*c, e, e2, 0.01), b.ifrk4_combine(*c, e, e2, 0.01),
                       rtol=1e-14, atol=1e-15)
