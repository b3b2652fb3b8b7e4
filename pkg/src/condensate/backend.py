"""Kernel backend selection.

The stepper's per-node loops exist twice: a compiled Cython extension
(``condensate._kernels``) and a NumPy fallback (``condensate._kernels_py``).
The compiled one is preferred when importable; setting the environment
variable ``CONDENSATE_PURE_PYTHON=1`` forces the fallback (used by the
backend-comparison benchmark and tests).

Both expose: ``phi1``, ``exp_affine_step``, ``scaled_max_diff``,
``BACKEND_NAME``.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    if os.environ.get("CONDENSATE_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py
    try:
        from . import _kernels  # compiled extension

        return _kernels
    except ImportError:
        return _kernels_py


kernels = _select()

phi1 = kernels.phi1
exp_affine_step = kernels.exp_affine_step
scaled_max_diff = kernels.scaled_max_diff
BACKEND_NAME: str = kernels.BACKEND_NAME
