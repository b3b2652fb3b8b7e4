"""Measures of the form rho delta_0 + p(x) dx and their mass functionals."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, NumericError, RangeError, StructuralError
from .grid import Grid, HeadModel, build_grid, head_or_flat, integrate, partial_node_integral


@dataclass(frozen=True)
class MeasureWithAtom:
    """Atom of mass rho at zero plus a bulk density sampled on the grid.

    Simulated states always carry ``atom_mass = 0`` (solutions stay
    atomless at finite times); only stationary targets have rho > 0.
    Bulk values may dip slightly negative from integrator undershoot.
    """

    grid: Grid
    atom_mass: float
    bulk: np.ndarray
    head: HeadModel

    def __post_init__(self):
        if self.atom_mass < 0.0 or not np.isfinite(self.atom_mass):
            raise ConfigurationError(f"atom mass {self.atom_mass} must be finite and >= 0")
        bulk = np.asarray(self.bulk, dtype=float)
        if bulk.shape != self.grid.nodes.shape:
            raise StructuralError("bulk sample count does not match the grid")
        if not np.all(np.isfinite(bulk)):
            raise NumericError("bulk density contains non-finite values")
        bulk.setflags(write=False)
        object.__setattr__(self, "bulk", bulk)

    def with_bulk(self, bulk: np.ndarray, head: HeadModel | None = None) -> "MeasureWithAtom":
        return replace(self, bulk=bulk, head=head if head is not None else self.head)


@dataclass(frozen=True)
class InitialCondition:
    """Density x^alpha0 eta(x) with eta continuous and positive at zero."""

    alpha0: float
    eta: np.ndarray
    eta_at_zero: float
    measure: MeasureWithAtom


def total_mass(m: MeasureWithAtom) -> float:
    return m.atom_mass + integrate(m.grid, m.bulk, m.head)


def mass_below(m: MeasureWithAtom, eps: float) -> float:
    """Atom plus bulk mass on [0, eps]; head segment handled analytically."""
    if eps < 0.0:
        raise RangeError("eps must be >= 0")
    if eps > m.grid.x_max * (1.0 + 1e-12):
        raise RangeError(f"eps = {eps} beyond x_max = {m.grid.x_max}")
    head_part = m.head.segment_mass(min(eps, m.grid.x_min))
    node_part = partial_node_integral(m.grid, m.bulk, m.grid.x_min, eps)
    return m.atom_mass + head_part + node_part


def l1_distance_away_from_zero(a: MeasureWithAtom, b: MeasureWithAtom, delta: float) -> float:
    """Integral of |a_bulk - b_bulk| over [delta, x_max]."""
    if not a.grid.same_as(b.grid):
        raise StructuralError("measures live on different grids")
    if delta <= 0.0:
        raise RangeError("delta must be positive")
    return partial_node_integral(a.grid, np.abs(a.bulk - b.bulk), delta, a.grid.x_max)


def initial_condition(
    grid: Grid,
    alpha0: float,
    mass: float,
    damping: str = "exp",
) -> InitialCondition:
    """Power-law initial density x^alpha0 eta(x), normalized to ``mass``.

    ``damping="exp"`` uses eta proportional to e^(-x) (unbounded domains);
    ``damping="none"`` a constant eta (natural on (0, 1]).  Normalization
    uses the grid quadrature itself so the measured initial mass is exact.
    """
    if alpha0 <= 0.0:
        raise ConfigurationError(f"alpha0 = {alpha0} must be positive")
    if mass <= 0.0:
        raise ConfigurationError(f"initial mass = {mass} must be positive")
    x = grid.nodes
    if damping == "exp":
        eta = np.exp(-x)
    elif damping == "none":
        eta = np.ones_like(x)
    else:
        raise ConfigurationError(f"unknown initial damping '{damping}'")
    bulk = x**alpha0 * eta
    raw = integrate(grid, bulk, HeadModel(alpha0, 1.0))
    scale = mass / raw
    bulk = bulk * scale
    measure = MeasureWithAtom(
        grid=grid,
        atom_mass=0.0,
        bulk=bulk,
        head=HeadModel(alpha0, scale),
    )
    return InitialCondition(
        alpha0=alpha0, eta=eta * scale, eta_at_zero=scale, measure=measure
    )


def write_snapshot(m: MeasureWithAtom, t: float, path: str | Path) -> None:
    """CSV of (x, density) rows plus a JSON metadata side file."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write("x,density\n")
        for x, v in zip(m.grid.nodes, m.bulk):
            fh.write(f"{x!r},{v!r}\n")
    meta = {
        "t": t,
        "atom_mass": m.atom_mass,
        "head_exponent": m.head.exponent,
        "head_coefficient": m.head.coefficient,
        "total_mass": total_mass(m),
    }
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")


def read_snapshot(path: str | Path) -> tuple[MeasureWithAtom, dict]:
    """Rebuild a measure (and its metadata) from a snapshot CSV."""
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    meta = json.loads(path.with_suffix(".json").read_text())
    x, bulk = data[:, 0], data[:, 1]
    grid = build_grid(float(x[0]), float(x[-1]), x.size)
    if not np.allclose(grid.nodes, x, rtol=1e-10):
        raise StructuralError(f"snapshot nodes in {path} are not a geometric grid")
    head = HeadModel(meta["head_exponent"], meta["head_coefficient"])
    return MeasureWithAtom(grid, meta["atom_mass"], bulk, head), meta


def head_for(m_bulk: np.ndarray, grid: Grid, k: int = 4) -> HeadModel:
    """Convenience: fitted head with flat fallback (stepper-side rule)."""
    return head_or_flat(grid, m_bulk, k)
