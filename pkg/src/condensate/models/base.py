"""Shared model machinery: operator fields, kernel tables, theory constants.

Every model provides the decomposition of its right-hand side into
``B[p] p + x^alpha C[p]`` with B, C evaluated on the grid nodes and at
x = 0.  EMV and BSP are affine integral operators and share the dense
kernel-table path; Kingman's operators are closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError, StructuralError
from ..grid import Grid
from ..measures import MeasureWithAtom


@dataclass(frozen=True)
class OperatorFields:
    """Sampled b = B[p] and c = C[p] on the nodes plus their x = 0 values."""

    b0: float
    b: np.ndarray
    c0: float
    c: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.b0) and np.isfinite(self.c0)):
            raise NumericError("operator values at x = 0 are non-finite")
        if not (np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise NumericError("operator fields contain non-finite values")


@dataclass(frozen=True)
class TheoryConstants:
    """Constants of the limit theorem for a supercritical configuration.

    gamma = c1 c2 is the exponential rate of the limiting Gamma profile,
    beta_shape = min(alpha, alpha0) its power-law exponent, rho the
    condensate mass.
    """

    alpha: float
    c1: float
    c2: float
    gamma: float
    rho: float
    beta_shape: float


@dataclass(frozen=True)
class CriterionResult:
    condenses: bool
    critical_mass: float
    value: float  # the quantity compared against critical_mass


@dataclass(frozen=True)
class KernelTables:
    """Dense kernel tables on {0} + nodes (row/column 0 = the point x = 0).

    Fields b, c of an affine integral operator evaluate as
    ``K[:, 1:] @ (w * bulk) + atom * K[:, 0] + R``.
    """

    kb: np.ndarray  # (n+1, n+1)
    kc: np.ndarray  # (n+1, n+1)
    rb: np.ndarray  # (n+1,)
    rc: np.ndarray  # (n+1,)

    def __post_init__(self):
        for name in ("kb", "kc", "rb", "rc"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericError(f"kernel table {name} has non-finite entries")


class Model:
    """Base for the three concrete models."""

    name: str = "base"
    grid: Grid
    alpha: float

    def operator_fields(self, m: MeasureWithAtom) -> OperatorFields:
        raise NotImplementedError

    def stationary_solution(self, total_mass: float) -> MeasureWithAtom:
        raise NotImplementedError

    def condensation_criterion(self) -> CriterionResult:
        raise NotImplementedError

    def theory_constants(self, alpha0: float) -> TheoryConstants:
        raise NotImplementedError

    def conserved_mass(self, m: MeasureWithAtom) -> float | None:
        """The mass functional the equation preserves, if any."""
        return None

    def _check_grid(self, m: MeasureWithAtom) -> None:
        if not m.grid.same_as(self.grid):
            raise StructuralError(f"measure grid differs from the {self.name} model grid")


class KernelModel(Model):
    """Affine-integral-operator model backed by precomputed tables."""

    tables: KernelTables

    def operator_fields(self, m: MeasureWithAtom) -> OperatorFields:
        self._check_grid(m)
        t = self.tables
        pw = self.grid.weights * m.bulk
        b = t.kb[:, 1:] @ pw + t.rb
        c = t.kc[:, 1:] @ pw + t.rc
        if m.atom_mass != 0.0:
            b = b + m.atom_mass * t.kb[:, 0]
            c = c + m.atom_mass * t.kc[:, 0]
        return OperatorFields(b0=float(b[0]), b=b[1:], c0=float(c[0]), c=c[1:])

    def eval_direct(self, m: MeasureWithAtom) -> OperatorFields:
        """Same quadrature written as explicit sums (consistency oracle)."""
        self._check_grid(m)
        t = self.tables
        n = self.grid.n
        w = self.grid.weights
        b = np.empty(n + 1)
        c = np.empty(n + 1)
        for i in range(n + 1):
            b[i] = sum(t.kb[i, 1 + j] * w[j] * m.bulk[j] for j in range(n))
            c[i] = sum(t.kc[i, 1 + j] * w[j] * m.bulk[j] for j in range(n))
            b[i] += m.atom_mass * t.kb[i, 0] + t.rb[i]
            c[i] += m.atom_mass * t.kc[i, 0] + t.rc[i]
        return OperatorFields(b0=float(b[0]), b=b[1:], c0=float(c[0]), c=c[1:])
