"""Geometric spatial mesh on (0, x_max] with power-law-aware quadrature.

Densities handled here behave like c x^kappa near zero, so the mesh is
graded geometrically (uniform in u = log x) and the segment [0, x_1] is
never discretized: it is carried analytically by a :class:`HeadModel`.

Quadrature is the composite trapezoid rule in the log variable,
integrate f dx = integrate f(e^u) e^u du.  On integrands that decay
smoothly into both mesh ends (the typical case here: power law at the
left end, exponential tail at the right) the boundary corrections of the
Euler-Maclaurin expansion nearly vanish and the rule is far more accurate
than its nominal second order; on generic integrands it is second order
in the log step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    HeadUnavailableError,
    NumericError,
    RangeError,
)

_RATIO_RTOL = 1e-12


@dataclass(frozen=True)
class HeadModel:
    """Local model c x^kappa for a density on [0, x_1].

    ``exponent`` may be negative (stationary bulks with alpha < 1 diverge
    at the origin) but must stay above -1 so the segment mass is finite.
    """

    exponent: float
    coefficient: float

    def __post_init__(self):
        if not (np.isfinite(self.exponent) and np.isfinite(self.coefficient)):
            raise ConfigurationError("head model parameters must be finite")
        if self.exponent <= -1.0:
            raise ConfigurationError(
                f"head exponent {self.exponent} <= -1: segment mass diverges"
            )
        if self.coefficient < 0.0:
            raise ConfigurationError("head coefficient must be >= 0")

    def segment_mass(self, upto: float) -> float:
        """Analytic integral of c x^kappa over [0, upto]."""
        return self.coefficient * upto ** (self.exponent + 1.0) / (self.exponent + 1.0)

    def evaluate(self, x):
        """Pointwise c x^kappa (x = 0 included; inf for negative exponents)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.coefficient * x**self.exponent


ZERO_HEAD = HeadModel(0.0, 0.0)


@dataclass(frozen=True)
class Grid:
    nodes: np.ndarray
    x_max: float
    ratio: float
    weights: np.ndarray
    log_nodes: np.ndarray
    log_step: float

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def x_min(self) -> float:
        return float(self.nodes[0])

    def same_as(self, other: "Grid") -> bool:
        return self.nodes.shape == other.nodes.shape and bool(
            np.array_equal(self.nodes, other.nodes)
        )


def build_grid(x_min: float, x_max: float, n: int) -> Grid:
    """Geometric grid of ``n`` nodes from x_min to x_max with quadrature weights."""
    if not (np.isfinite(x_min) and np.isfinite(x_max)):
        raise ConfigurationError("grid bounds must be finite")
    if x_min <= 0.0:
        raise ConfigurationError(f"x_min = {x_min} must be positive")
    if x_min >= x_max:
        raise ConfigurationError(f"x_min = {x_min} must be smaller than x_max = {x_max}")
    if n < 8:
        raise ConfigurationError(f"n = {n} is below the minimum of 8 nodes")

    log_nodes = np.linspace(np.log(x_min), np.log(x_max), n)
    nodes = np.exp(log_nodes)
    nodes[0] = x_min
    nodes[-1] = x_max
    log_step = (np.log(x_max) - np.log(x_min)) / (n - 1)

    weights = nodes * log_step
    weights[0] *= 0.5
    weights[-1] *= 0.5

    for arr in (nodes, weights, log_nodes):
        arr.setflags(write=False)
    return Grid(
        nodes=nodes,
        x_max=float(x_max),
        ratio=float(np.exp(log_step)),
        weights=weights,
        log_nodes=log_nodes,
        log_step=float(log_step),
    )


def integrate(grid: Grid, values: np.ndarray, head: HeadModel) -> float:
    """Quadrature over [x_1, x_N] plus the analytic head segment [0, x_1]."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericError("integrand contains non-finite values")
    return float(grid.weights @ values) + head.segment_mass(grid.x_min)


def partial_node_integral(grid: Grid, values: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoid (in log x) of node values over [lo, hi] within [x_1, x_N].

    Cut points falling inside a mesh interval use linear interpolation of
    the log-variable integrand g(u) = x f(x).
    """
    lo = max(lo, grid.x_min)
    hi = min(hi, grid.x_max)
    if hi <= lo:
        return 0.0
    g = grid.nodes * np.asarray(values, dtype=float)
    u = grid.log_nodes
    ulo, uhi = np.log(lo), np.log(hi)

    glo = np.interp(ulo, u, g)
    ghi = np.interp(uhi, u, g)
    i = int(np.searchsorted(u, ulo, side="left"))   # first node with u >= ulo
    j = int(np.searchsorted(u, uhi, side="right"))  # first node with u > uhi
    if i >= j:  # both cuts inside one mesh interval
        return 0.5 * (glo + ghi) * (uhi - ulo)
    total = 0.0
    if j - i >= 2:
        total += float(np.sum((g[i : j - 1] + g[i + 1 : j]) * 0.5) * grid.log_step)
    total += 0.5 * (glo + g[i]) * (u[i] - ulo)
    total += 0.5 * (g[j - 1] + ghi) * (uhi - u[j - 1])
    return total


def interpolate(grid: Grid, values: np.ndarray, head: HeadModel, x) -> np.ndarray | float:
    """Evaluate node samples at arbitrary x in [0, x_max].

    Log-log linear between nodes when both bracketing values are positive
    (exact on pure power laws), plain linear otherwise, head model below
    x_1.
    """
    scalar = np.isscalar(x)
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xq < 0.0):
        raise RangeError("negative evaluation point")
    if np.any(xq > grid.x_max * (1.0 + 1e-12)):
        raise RangeError(
            f"evaluation point {float(np.max(xq))} beyond x_max = {grid.x_max}"
        )
    xq = np.minimum(xq, grid.x_max)
    values = np.asarray(values, dtype=float)
    out = np.empty_like(xq)

    below = xq < grid.x_min
    if np.any(below):
        out[below] = head.evaluate(xq[below])

    inside = ~below
    if np.any(inside):
        xi = xq[inside]
        j = np.clip(np.searchsorted(grid.nodes, xi), 1, grid.n - 1)
        x0, x1 = grid.nodes[j - 1], grid.nodes[j]
        v0, v1 = values[j - 1], values[j]
        res = np.empty_like(xi)
        loglog = (v0 > 0.0) & (v1 > 0.0)
        if np.any(loglog):
            s = (np.log(xi[loglog]) - np.log(x0[loglog])) / (
                np.log(x1[loglog]) - np.log(x0[loglog])
            )
            res[loglog] = np.exp(
                np.log(v0[loglog]) + s * (np.log(v1[loglog]) - np.log(v0[loglog]))
            )
        lin = ~loglog
        if np.any(lin):
            s = (xi[lin] - x0[lin]) / (x1[lin] - x0[lin])
            res[lin] = v0[lin] + s * (v1[lin] - v0[lin])
        out[inside] = res

    return float(out[0]) if scalar else out


def estimate_head(grid: Grid, values: np.ndarray, k: int = 4) -> HeadModel:
    """Least-squares power-law fit of the first ``k`` node values.

    Raises :class:`HeadUnavailableError` when any of the leading values is
    nonpositive; callers then fall back to a flat head (kappa = 0).
    """
    if k < 2:
        raise ConfigurationError("head fit needs at least 2 nodes")
    lead = np.asarray(values[:k], dtype=float)
    if lead.size < k:
        raise ConfigurationError(f"head fit needs {k} values, got {lead.size}")
    if np.any(lead <= 0.0) or not np.all(np.isfinite(lead)):
        raise HeadUnavailableError("leading values nonpositive; no power-law head")
    design = np.column_stack([np.ones(k), grid.log_nodes[:k]])
    (intercept, slope), *_ = np.linalg.lstsq(design, np.log(lead), rcond=None)
    return HeadModel(exponent=float(slope), coefficient=float(np.exp(intercept)))


def head_or_flat(grid: Grid, values: np.ndarray, k: int = 4) -> HeadModel:
    """``estimate_head`` with the kappa = 0 fallback applied."""
    try:
        return estimate_head(grid, values, k)
    except HeadUnavailableError:
        return HeadModel(0.0, max(float(values[0]), 0.0))
