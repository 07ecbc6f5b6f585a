"""Kernel backend selection.

The compiled extension is preferred when importable; setting the environment
variable ISORATE_PURE_PYTHON=1 forces the pure-Python twin (used by the
benchmark and the backend-equivalence tests).
"""

import os

from . import pure

if os.environ.get("ISORATE_PURE_PYTHON", "") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _hullc as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

lower_hull_indices = _impl.lower_hull_indices
pava_nondecreasing = _impl.pava_nondecreasing

__all__ = ["BACKEND", "lower_hull_indices", "pava_nondecreasing", "pure"]
