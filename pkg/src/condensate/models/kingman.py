"""Continuous-time selection-mutation model on fitness space (0, 1).

    d/dt p = ((1 - beta) (1 - x) / w[p] - 1) p + beta u,
    w[p] = integral of (1 - x) p(dx),

with the house-of-cards mutant density u(x) = (alpha_u + 1) x^alpha_u on
(0, 1).  Condensation occurs at x = 0 when beta * integral(u(dx)/x) < 1;
the stationary state is (1 - beta int u/x) delta_0 + beta u(x)/x dx and
the emerging condensate has Gamma shape with rate gamma = 1.

The mutant density is normalized by the grid quadrature itself, which
makes the model's discrete mass law d/dt M = 1 - M and the stationarity
identities exact rather than exact-up-to-quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, SubcriticalMassError
from ..grid import Grid, HeadModel, integrate
from ..measures import MeasureWithAtom
from .base import CriterionResult, Model, OperatorFields, TheoryConstants


@dataclass(frozen=True)
class KingmanParams:
    beta_mut: float  # mutation frequency
    alpha_u: float   # mutant density exponent, u ~ x^alpha_u near 0

    def __post_init__(self):
        if not 0.0 < self.beta_mut < 1.0:
            raise ConfigurationError(f"beta_mut = {self.beta_mut} must lie in (0, 1)")
        if self.alpha_u <= 0.0:
            raise ConfigurationError(f"alpha_u = {self.alpha_u} must be positive")


class KingmanModel(Model):
    name = "kingman"

    def __init__(self, params: KingmanParams, grid: Grid):
        if abs(grid.x_max - 1.0) > 1e-12:
            raise ConfigurationError("the Kingman model lives on (0, 1]: set x_max = 1")
        self.params = params
        self.grid = grid
        self.alpha = params.alpha_u

        a = params.alpha_u
        x = grid.nodes
        raw = (a + 1.0) * x**a
        norm = integrate(grid, raw, HeadModel(a, a + 1.0))
        # discrete normalization: the grid quadrature of u is exactly 1
        self.u = raw / norm
        self.u0 = (a + 1.0) / norm          # u0(x) is constant for this family
        self.u_head = HeadModel(a, self.u0)
        # criterion integral of u(dx)/x, again with the grid's own quadrature
        self.int_u_over_x = integrate(grid, self.u / x, HeadModel(a - 1.0, self.u0))
        self._one_minus_x_full = 1.0 - np.concatenate(([0.0], x))

    def mean_unfitness(self, m: MeasureWithAtom) -> float:
        """w[p] = integral of (1 - x) p(dx); the atom sits at x = 0."""
        self._check_grid(m)
        return m.atom_mass + integrate(m.grid, (1.0 - m.grid.nodes) * m.bulk, m.head)

    def operator_fields(self, m: MeasureWithAtom) -> OperatorFields:
        w = self.mean_unfitness(m)
        b_full = (1.0 - self.params.beta_mut) * self._one_minus_x_full / w - 1.0
        c_node = self.params.beta_mut * self.u0
        c = np.full(self.grid.n, c_node)
        return OperatorFields(b0=float(b_full[0]), b=b_full[1:], c0=c_node, c=c)

    def condensation_criterion(self) -> CriterionResult:
        value = self.params.beta_mut * self.int_u_over_x
        return CriterionResult(condenses=value < 1.0, critical_mass=1.0, value=value)

    def stationary_solution(self, total_mass: float = 1.0) -> MeasureWithAtom:
        # total mass is fixed to 1 by the dynamics; the argument is kept
        # for interface symmetry with the other models
        crit = self.condensation_criterion()
        if not crit.condenses:
            raise SubcriticalMassError(
                f"beta * int u/x = {crit.value} >= 1: no condensation", crit.critical_mass
            )
        rho = 1.0 - crit.value
        q = self.params.beta_mut * self.u / self.grid.nodes
        head = HeadModel(self.params.alpha_u - 1.0, self.params.beta_mut * self.u0)
        return MeasureWithAtom(grid=self.grid, atom_mass=rho, bulk=q, head=head)

    def theory_constants(self, alpha0: float) -> TheoryConstants:
        crit = self.condensation_criterion()
        if not crit.condenses:
            raise SubcriticalMassError(
                f"beta * int u/x = {crit.value} >= 1: no condensation", crit.critical_mass
            )
        c1 = self.params.beta_mut * self.u0
        c2 = 1.0 / c1
        return TheoryConstants(
            alpha=self.params.alpha_u,
            c1=c1,
            c2=c2,
            gamma=c1 * c2,
            rho=1.0 - crit.value,
            beta_shape=min(self.params.alpha_u, alpha0),
        )
