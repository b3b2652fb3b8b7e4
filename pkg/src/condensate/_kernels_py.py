"""NumPy reference implementation of the hot per-node kernels.

Mirrors ``_kernels.pyx`` exactly; selected by :mod:`condensate.backend`
when the compiled extension is unavailable or disabled.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

# Below this |z| the direct (e^z - 1)/z quotient is replaced by a cubic
# Taylor polynomial; its truncation error z^4/120 stays under 1e-17.
PHI1_SERIES_CUTOFF = 1e-4


def phi1(z: np.ndarray) -> np.ndarray:
    """First exponential-integrator kernel (e^z - 1)/z, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = np.abs(z) < PHI1_SERIES_CUTOFF
    zs = z[small]
    out[small] = 1.0 + zs * (0.5 + zs * (1.0 / 6.0 + zs * (1.0 / 24.0)))
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    return out


def exp_affine_step(p: np.ndarray, b: np.ndarray, src: np.ndarray, dt: float) -> np.ndarray:
    """One frozen-coefficient update e^(b dt) p + dt phi1(b dt) src."""
    z = b * dt
    return np.exp(z) * p + dt * phi1(z) * src


def scaled_max_diff(a: np.ndarray, b: np.ndarray, atol: float, rtol: float) -> float:
    """max_i |a_i - b_i| / (atol + rtol max(|a_i|, |b_i|))."""
    scale = atol + rtol * np.maximum(np.abs(a), np.abs(b))
    return float(np.max(np.abs(a - b) / scale))
