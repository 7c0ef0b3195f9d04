"""Select the compiled kernels when available, else the numpy fallback.

Set ``LASERUAV_PURE_PYTHON=1`` to force the fallback. With the extension
built, each kernel comes from whichever backend is faster on it (see
benchmarks/bench_kernels.py): the scalar-loop kernels are compiled, while
``exceedance`` and ``nearest_norms`` stay on numpy, whose vectorised
log/exp and ``reduceat`` beat a per-element libm loop.
"""

import os
from types import SimpleNamespace

from . import _kernels_py as python_kernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

KERNEL_NAMES = ("lambert_w0", "received_power", "exceedance", "mc_counts", "nearest_norms")
COMPILED_PREFERRED = ("lambert_w0", "received_power", "mc_counts")

if compiled_kernels is not None and not os.environ.get("LASERUAV_PURE_PYTHON"):
    BACKEND = "cython"
    SOURCES = {name: ("cython" if name in COMPILED_PREFERRED else "python")
               for name in KERNEL_NAMES}
else:
    BACKEND = "python"
    SOURCES = dict.fromkeys(KERNEL_NAMES, "python")

_modules = {"cython": compiled_kernels, "python": python_kernels}
kernels = SimpleNamespace(**{name: getattr(_modules[src], name) for name, src in SOURCES.items()})
