"""Kernel backend selection.

At import time the compiled extension is preferred; the numpy fallback is
used when it is missing or when OSCILLOMETER_PURE_PYTHON is set.  Callers
look the functions up through this module (``_kernels.overlap_sum(...)``)
so the backend can be swapped at runtime, which the benchmark relies on.
"""

import os

from . import fallback

USING_COMPILED = False
BACKEND = "python"

overlap_sum = fallback.overlap_sum
centered_sum = fallback.centered_sum
absdev_sum = fallback.absdev_sum


def select_backend(force=None):
    """Bind the kernel functions to a backend.

    force: None (honor environment, prefer compiled), "compiled" (error if
    unavailable) or "python".
    """
    global overlap_sum, centered_sum, absdev_sum, USING_COMPILED, BACKEND
    if force is None:
        choice = "python" if os.environ.get("OSCILLOMETER_PURE_PYTHON") else "auto"
    else:
        choice = force
    mod = None
    if choice in ("auto", "compiled"):
        try:
            from . import _overlap as mod
        except ImportError:
            if choice == "compiled":
                raise
            mod = None
    if mod is None:
        mod = fallback
    overlap_sum = mod.overlap_sum
    centered_sum = mod.centered_sum
    absdev_sum = mod.absdev_sum
    USING_COMPILED = mod is not fallback
    BACKEND = "compiled" if USING_COMPILED else "python"
    return BACKEND


select_backend()
