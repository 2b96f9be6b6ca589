"""Kernel backend selection: compiled extension if available, NumPy otherwise.

Set ``GEARPHY_KERNEL=py`` to force the fallback (used by the equivalence
tests and the benchmark).
"""

import os

from . import _forward_py

BACKEND = "numpy"
forward_log_prob = _forward_py.forward_log_prob

if os.environ.get("GEARPHY_KERNEL", "").lower() not in ("py", "numpy", "python"):
    try:
        from . import _forward  # compiled extension

        forward_log_prob = _forward.forward_log_prob
        BACKEND = "cython"
    except ImportError:
        pass

__all__ = ["forward_log_prob", "BACKEND"]
