"""Time the compiled and numpy kernels on the grids used by the solver.

    python3 benchmarks/bench_kernels.py [--n 128 256] [--repeat 20]

Also times one full IFRK4 step per backend by swapping the module used by
the stepper.
"""
import argparse
import timeit

import numpy as np

from dqg import kernels
from dqg.config import InitialDataSpec, SimConfig
from dqg.initial_data import generate_initial_data
from dqg.littlewood_paley import build_filter_bank
from dqg.spectral import GridSpec


def bench_kernels(mod, n, repeat):
    rng = np.random.default_rng(0)
    grid = GridSpec(n)
    bank = build_filter_bank(grid)
    power = rng.random((n, n))
    u = [rng.standard_normal((n, n)) for _ in range(4)]
    c = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(5)]
    e, e2 = rng.random((n, n)), rng.random((n, n))
    cases = {
        "shell_energies": lambda: mod.shell_energies(power, bank.shell_lo, bank.weight_lo,
                                                     bank.weight_hi, bank.nshells),
        "lp_power_sum p=3.5": lambda: mod.lp_power_sum(u[0], 3.5),
        "lp_power_sum p=4": lambda: mod.lp_power_sum(u[0], 4.0),
        "advect_product": lambda: mod.advect_product(*u),
        "ifrk4_combine": lambda: mod.ifrk4_combine(*c, e, e2, 1e-3),
    }
    return {k: min(timeit.repeat(f, number=1, repeat=repeat)) for k, f in cases.items()}


def bench_step(mod, n, repeat):
    from dqg import evolution

    cfg = SimConfig(n=n, dt_policy="fixed")
    theta = generate_initial_data(InitialDataSpec(seed=0), cfg.grid)
    stepper = evolution.Stepper(cfg)
    saved = evolution.kernels
    evolution.kernels = mod
    try:
        return min(timeit.repeat(lambda: stepper.advance(theta.coeffs, 1e-3), number=1,
                                 repeat=repeat))
    finally:
        evolution.kernels = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[128, 256])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}")
    for n in args.n:
        results = {name: bench_kernels(mod, n, args.repeat) for name, mod in backends.items()}
        steps = {name: bench_step(mod, n, max(3, args.repeat // 4)) for name, mod in backends.items()}
        print(f"\nn = {n}")
        names = list(backends)
        print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in names) + "   (microseconds)")
        for kernel in results[names[0]]:
            print(f"{kernel:<20}" + "".join(f"{results[b][kernel] * 1e6:12.1f}" for b in names))
        print(f"{'ifrk4 step':<20}" + "".join(f"{steps[b] * 1e6:12.1f}" for b in names))


if __name__ == "__main__":
    main()
