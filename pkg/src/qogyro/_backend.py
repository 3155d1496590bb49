"""Selects the leaf stepper at import time.

The compiled extension is preferred. Set ``QOGYRO_BACKEND=python`` to force
the pure-Python fallback, or ``QOGYRO_BACKEND=cython`` to fail loudly when
the extension is missing.
"""

import os

from . import _leaf_py

_requested = os.environ.get("QOGYRO_BACKEND", "auto").lower()

try:
    from . import _leaf_ext
except ImportError:  # extension not built
    _leaf_ext = None

if _requested == "cython" and _leaf_ext is None:
    raise ImportError("QOGYRO_BACKEND=cython but qogyro._leaf_ext is not built")

BACKENDS = {"python": _leaf_py.step_block}
if _leaf_ext is not None:
    BACKENDS["cython"] = _leaf_ext.step_block

if _requested == "python" or _leaf_ext is None:
    NAME = "python"
else:
    NAME = "cython"

step_block = BACKENDS[NAME]
