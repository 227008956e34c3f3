"""Grid kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it was built; set ``DQG_KERNELS=python``
to force the fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _fallback

_compiled = None
if os.environ.get("DQG_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback
BACKEND = "cython" if _compiled is not None else "python"

shell_energies = _impl.shell_energies
lp_power_sum = _impl.lp_power_sum
advect_product = _impl.advect_product
ifrk4_combine = _impl.ifrk4_combine


def available_backends():
    """Map backend name to kernel module, for tests and benchmarks."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
