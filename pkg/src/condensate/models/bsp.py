"""Bose gas in contact with a heat bath (Buffet-de Smedt-Pule type).

    d/dt p(x) = int A(y-x) p(x) p(y) dy
                - p(x) int Chat(y-x) F(y) dy + F(x) int Chat(x-y) p(y) dy,

with A(z) = Chat(-z) - Chat(z), a bath correlation transform Chat
satisfying the detailed-balance (KMS) identity Chat(-z) = Chat(z) e^(bz),
and a density of states F(x) = f0 x^alpha (alpha = 1/2, f0 = 1/(sqrt(2)
pi^2) for the 3-dimensional box).  Total mass is conserved; supercritical
masses condense onto rho delta_0 + F(x)/(e^(bx) - 1) dx.

The built-in bath kernel family Chat(z) = c0 e^(-a|z| - b z/2), a > b/2,
is bounded, strictly positive and satisfies KMS identically.  A skew
parameter is provided purely to exercise the KMS validation path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, SubcriticalMassError
from ..grid import Grid, HeadModel, integrate
from ..measures import MeasureWithAtom
from .base import CriterionResult, KernelModel, KernelTables, TheoryConstants


@dataclass(frozen=True)
class BathKernel:
    """Chat(z) = c0 e^(-a |z| - beta z / 2), optionally KMS-skewed.

    ``skew`` multiplies the z < 0 branch by (1 + skew); nonzero values
    deliberately violate detailed balance for validation tests.
    """

    c0: float
    a: float
    beta_temp: float
    skew: float = 0.0

    def __post_init__(self):
        if self.c0 <= 0.0:
            raise ConfigurationError(f"chat c0 = {self.c0} must be positive")
        if self.a <= self.beta_temp / 2.0:
            raise ConfigurationError(
                f"chat decay a = {self.a} must exceed beta_temp/2 = {self.beta_temp / 2}"
            )

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        base = self.c0 * np.exp(-self.a * np.abs(z) - self.beta_temp * z / 2.0)
        if self.skew != 0.0:
            base = np.where(z < 0.0, base * (1.0 + self.skew), base)
        return base

    def a_of(self, z):
        """A(z) = Chat(-z) - Chat(z); expm1 form when KMS holds exactly."""
        z = np.asarray(z, dtype=float)
        if self.skew == 0.0:
            return self(z) * np.expm1(self.beta_temp * z)
        return self(-z) - self(z)

    def kms_defect(self, z: float) -> float:
        return abs(self(-z) - self(z) * np.exp(self.beta_temp * z))


@dataclass(frozen=True)
class BSPParams:
    beta_temp: float = 1.0
    alpha_f: float = 0.5
    f0: float = 1.0 / (np.sqrt(2.0) * np.pi**2)
    chat: BathKernel | None = None

    def __post_init__(self):
        if self.beta_temp <= 0.0:
            raise ConfigurationError(f"beta_temp = {self.beta_temp} must be positive")
        if self.alpha_f <= 0.0:
            raise ConfigurationError(f"alpha_f = {self.alpha_f} must be positive")
        if self.f0 <= 0.0:
            raise ConfigurationError(f"f0 = {self.f0} must be positive")
        if self.chat is None:
            object.__setattr__(
                self, "chat", BathKernel(c0=1.0, a=self.beta_temp, beta_temp=self.beta_temp)
            )
        elif abs(self.chat.beta_temp - self.beta_temp) > 1e-12:
            raise ConfigurationError("chat kernel built for a different beta_temp")


class BSPModel(KernelModel):
    name = "bsp"

    def __init__(self, params: BSPParams, grid: Grid, total_mass: float):
        if total_mass <= 0.0:
            raise ConfigurationError(f"total_mass = {total_mass} must be positive")
        self.params = params
        self.grid = grid
        self.alpha = params.alpha_f
        self.total_mass = total_mass
        self.tables = self._build_tables()
        x = grid.nodes
        self._q_bulk = params.f0 * x**params.alpha_f / np.expm1(params.beta_temp * x)
        self._q_head = HeadModel(params.alpha_f - 1.0, params.f0 / params.beta_temp)
        self._critical = integrate(grid, self._q_bulk, self._q_head)

    def _build_tables(self) -> KernelTables:
        p = self.params
        x = np.concatenate(([0.0], self.grid.nodes))
        z = x[None, :] - x[:, None]  # z = y - x
        kb = p.chat.a_of(z)
        kc = p.f0 * x[:, None] ** p.alpha_f * p.chat(-z)  # f(x) Chat(x - y)
        w = self.grid.weights
        f_nodes = p.f0 * self.grid.nodes**p.alpha_f
        rb = -(p.chat(z)[:, 1:] @ (w * f_nodes))
        return KernelTables(kb=kb, kc=kc, rb=rb, rc=np.zeros(x.size))

    def conserved_mass(self, m: MeasureWithAtom) -> float:
        self._check_grid(m)
        return m.atom_mass + integrate(m.grid, m.bulk, m.head)

    def condensation_criterion(self) -> CriterionResult:
        return CriterionResult(
            condenses=self.total_mass > self._critical,
            critical_mass=self._critical,
            value=self.total_mass,
        )

    def stationary_solution(self, total_mass: float | None = None) -> MeasureWithAtom:
        mass = self.total_mass if total_mass is None else total_mass
        rho = mass - self._critical
        if rho <= 0.0:
            raise SubcriticalMassError(
                f"mass {mass} is below the critical mass {self._critical}",
                self._critical,
            )
        return MeasureWithAtom(
            grid=self.grid, atom_mass=rho, bulk=self._q_bulk, head=self._q_head
        )

    def theory_constants(self, alpha0: float) -> TheoryConstants:
        p_inf = self.stationary_solution()
        chat = self.params.chat
        c1 = self.params.f0 * (
            p_inf.atom_mass * float(chat(0.0))
            + integrate(
                self.grid,
                chat(self.grid.nodes) * p_inf.bulk,
                HeadModel(
                    self._q_head.exponent, self._q_head.coefficient * float(chat(0.0))
                ),
            )
        )
        c2 = self.params.beta_temp / self.params.f0
        return TheoryConstants(
            alpha=self.params.alpha_f,
            c1=c1,
            c2=c2,
            gamma=c1 * c2,
            rho=p_inf.atom_mass,
            beta_shape=min(self.params.alpha_f, alpha0),
        )
