"""Kernel selection: the compiled core when it imports, numpy otherwise.

Set GCDEFORM_PURE_PYTHON=1 to force the numpy path.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
bfield_apply = _kernels_py.bfield_apply

if not os.environ.get("GCDEFORM_PURE_PYTHON"):
    try:
        from . import _core
    except ImportError:
        _core = None
    if _core is not None:
        BACKEND = "compiled"
        bfield_apply = _core.bfield_apply
