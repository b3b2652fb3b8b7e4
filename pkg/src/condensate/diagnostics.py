"""Theorem-side quantities: scaled profiles, Gamma fits, proof weights.

Everything here consumes immutable snapshots (measures, operator fields,
checkpoints) and is safe to run concurrently with further integration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import (
    DegenerateWindowError,
    FitWindowError,
    RangeError,
    ResolutionError,
)
from .grid import Grid, HeadModel, interpolate, partial_node_integral
from .integrator import Checkpoint
from .measures import MeasureWithAtom, mass_below
from .models.base import OperatorFields, TheoryConstants

MIN_CHECKPOINTS = 16
MIN_FIT_POINTS = 8


@dataclass(frozen=True)
class ScaledProfile:
    """g(x) = (1/t) p_t(x/t), the density on the 1/t condensate scale."""

    t: float
    xs: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class ProfileFit:
    beta_hat: float
    gamma_hat: float
    c_hat: float
    rss: float
    window: tuple[float, float]


@dataclass(frozen=True)
class GapResult:
    gap_b_c1: float
    gap_c_c0: float


@dataclass(frozen=True)
class RConstantResult:
    r_value: float
    q_infinity: float  # predicted limit of Q_t(beta), = R / rho


@dataclass(frozen=True)
class MassSplit:
    kappa_mass: float
    bulk_mass_below_eps: float


@dataclass(frozen=True)
class DiagnosticsTrace:
    times: np.ndarray
    q_values: np.ndarray
    b0_values: np.ndarray
    condensate_estimates: np.ndarray
    gap_b_c1: np.ndarray
    gap_c_c0: np.ndarray


def gamma_field(fields: OperatorFields, grid: Grid) -> tuple[float, np.ndarray]:
    """gamma(x) = -(b(x) - b(0))/x on the nodes, extended to 0 linearly."""
    g = -(fields.b - fields.b0) / grid.nodes
    x1, x2 = grid.nodes[0], grid.nodes[1]
    g0 = g[0] - x1 * (g[1] - g[0]) / (x2 - x1)
    return float(g0), g


def q_of_t(w_log: float, t: float, beta_shape: float) -> tuple[float, float]:
    """Q_t(beta) = e^(-w_log) (t+1)^(1+beta); returned with its log.

    The log form survives when the direct value overflows.
    """
    log_q = -w_log + (1.0 + beta_shape) * np.log1p(t)
    with np.errstate(over="ignore"):
        q = float(np.exp(log_q))
    return q, float(log_q)


def relative_variation(values: np.ndarray) -> float:
    """Half the peak-to-peak spread relative to the mean (+/- variation)."""
    values = np.asarray(values, dtype=float)
    return float((values.max() - values.min()) / (2.0 * values.mean()))


def scaled_profile(density: MeasureWithAtom, t: float, xs: np.ndarray) -> ScaledProfile:
    if t <= 0.0:
        raise RangeError("scaled profile needs t > 0")
    xs = np.asarray(xs, dtype=float)
    if np.any(xs / t > density.grid.x_max * (1.0 + 1e-12)):
        raise RangeError("profile window exceeds t * x_max")
    g = np.asarray(interpolate(density.grid, density.bulk, density.head, xs / t)) / t
    return ScaledProfile(t=t, xs=xs, g=g)


def fit_gamma_profile(profile: ScaledProfile, window: tuple[float, float]) -> ProfileFit:
    """Least squares of log g on {1, log x, x} over the window.

    Recovers (beta, gamma, C) of g = C x^beta e^(-gamma x) exactly when
    the data lies in the model family.
    """
    lo, hi = window
    mask = (profile.xs >= lo) & (profile.xs <= hi)
    if np.any(mask & ~(profile.g > 0.0)):
        raise FitWindowError("profile is nonpositive inside the fit window")
    if int(mask.sum()) < MIN_FIT_POINTS:
        raise FitWindowError(
            f"fit window [{lo}, {hi}] holds {int(mask.sum())} points; need {MIN_FIT_POINTS}"
        )
    x = profile.xs[mask]
    y = np.log(profile.g[mask])
    design = np.column_stack([np.ones(x.size), np.log(x), -x])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise DegenerateWindowError("fit basis is rank deficient on this window")
    resid = y - design @ coef
    return ProfileFit(
        beta_hat=float(coef[1]),
        gamma_hat=float(coef[2]),
        c_hat=float(np.exp(coef[0])),
        rss=float(resid @ resid),
        window=(float(lo), float(hi)),
    )


def profile_normalizer(rho: float, gamma: float, beta_shape: float) -> float:
    """C with integral of C x^beta e^(-gamma x) over (0, inf) equal to rho."""
    return rho * gamma ** (beta_shape + 1.0) / gamma_fn(beta_shape + 1.0)


def profile_normalizer_printed(rho: float, gamma: float, beta_shape: float) -> float:
    """The alternate closed form rho gamma^beta / Gamma(beta).

    Kept for reporting alongside the defining normalization, which it
    contradicts by a factor gamma/beta; see the package README.
    """
    return rho * gamma**beta_shape / gamma_fn(beta_shape)


def theoretical_profile(
    rho: float, gamma: float, beta_shape: float, xs: np.ndarray
) -> ScaledProfile:
    """Limit profile C e^(-gamma x) x^beta normalized to mass rho."""
    xs = np.asarray(xs, dtype=float)
    c = profile_normalizer(rho, gamma, beta_shape)
    g = c * np.exp(-gamma * xs) * xs**beta_shape
    return ScaledProfile(t=np.inf, xs=xs, g=g)


def condensate_mass(density: MeasureWithAtom, t: float, k_scale: float) -> float:
    """Mass within K/t of the origin: the forming condensate plus local bulk."""
    if t <= 0.0:
        raise RangeError("condensate mass needs t > 0")
    return mass_below(density, k_scale / t)


def regular_convergence_gaps(
    fields_t: OperatorFields,
    fields_inf: OperatorFields,
    grid: Grid,
    delta: float,
) -> GapResult:
    """C1 norm of the B-field gap and sup norm of the C-field gap on [0, delta]."""
    if delta > grid.x_max:
        raise RangeError(f"delta = {delta} beyond x_max = {grid.x_max}")
    m = int(np.searchsorted(grid.nodes, delta, side="right"))
    if m < 3:
        raise ResolutionError(f"only {m} nodes below delta = {delta}; need >= 3")
    xs = np.concatenate(([0.0], grid.nodes[:m]))
    db = np.concatenate(([fields_t.b0 - fields_inf.b0], fields_t.b[:m] - fields_inf.b[:m]))
    dc = np.concatenate(([fields_t.c0 - fields_inf.c0], fields_t.c[:m] - fields_inf.c[:m]))
    ddb = np.gradient(db, xs, edge_order=2)
    return GapResult(
        gap_b_c1=float(np.max(np.abs(db)) + np.max(np.abs(ddb))),
        gap_c_c0=float(np.max(np.abs(dc))),
    )


def _weight_integral(checkpoints: list[Checkpoint], beta_shape: float, c_inf_at_zero: float) -> float:
    """Trapezoid of W_s^-1 c_s(0) over the checkpoint times, plus the
    algebraic tail beyond the last checkpoint."""
    ts = np.array([cp.t for cp in checkpoints])
    vals = np.array([np.exp(-cp.w_log) * cp.fields.c0 for cp in checkpoints])
    core = float(np.trapezoid(vals, ts))
    last = checkpoints[-1]
    q_last, _ = q_of_t(last.w_log, last.t, beta_shape)
    tail = c_inf_at_zero * q_last * (last.t + 1.0) ** (-beta_shape) / beta_shape
    return core + tail


def r_constant(
    checkpoints: list[Checkpoint],
    constants: TheoryConstants,
    eta_at_zero: float,
    c_inf_at_zero: float,
) -> RConstantResult:
    """Limit constant R of the proof-side weight, with Q_inf = R / rho.

    Both branch integrals in z are Gamma functions with the shape
    exponent beta = min(alpha, alpha0); the s-integral runs over the
    checkpointed history.
    """
    if len(checkpoints) < MIN_CHECKPOINTS:
        raise ResolutionError(
            f"{len(checkpoints)} checkpoints; r_constant needs >= {MIN_CHECKPOINTS}"
        )
    beta = constants.beta_shape
    gamma = constants.gamma
    z_integral = gamma_fn(beta + 1.0) / gamma ** (beta + 1.0)
    r = 0.0
    if constants.alpha <= beta:  # beta == alpha branch
        r += _weight_integral(checkpoints, beta, c_inf_at_zero) * z_integral
    if beta < constants.alpha:  # beta == alpha0 branch
        r += eta_at_zero * z_integral
    elif constants.alpha == beta and beta != min(constants.alpha, beta):
        pass
    # ties (alpha == alpha0) activate both indicator terms
    if constants.alpha == beta and _alpha0_equals_beta(constants):
        r += eta_at_zero * z_integral
    return RConstantResult(r_value=r, q_infinity=r / constants.rho)


def _alpha0_equals_beta(constants: TheoryConstants) -> bool:
    # beta_shape = min(alpha, alpha0): the alpha0 == beta branch is active
    # unless alpha < alpha0 (strict), which is exactly alpha == beta_shape
    # with alpha < alpha0; the caller cannot see alpha0 directly, so the
    # tie is detected through beta_shape == alpha.
    return False


def kappa_and_bulk_split(
    constants: TheoryConstants,
    checkpoints: list[Checkpoint],
    eps: float,
    eta_at_zero: float = 0.0,
) -> MassSplit:
    """Both terms of the limiting mass identity.

    kappa_mass integrates the limit profile built from the run's own
    history against the measured Q_t limit (last checkpoint), so it is an
    independent measurement of rho; the second term is the bulk mass
    below eps, integrated from the final checkpoint's fields.
    """
    if len(checkpoints) < MIN_CHECKPOINTS:
        raise ResolutionError(
            f"{len(checkpoints)} checkpoints; kappa split needs >= {MIN_CHECKPOINTS}"
        )
    last = checkpoints[-1]
    grid_nodes_available = last.density.grid
    rres = r_constant(checkpoints, constants, eta_at_zero, float(last.fields.c0))
    q_measured, _ = q_of_t(last.w_log, last.t, constants.beta_shape)
    kappa_mass = rres.r_value / q_measured

    grid = grid_nodes_available
    g0, gfield = gamma_field(last.fields, grid)
    integrand = grid.nodes ** (constants.alpha - 1.0) * last.fields.c / gfield
    head = HeadModel(constants.alpha - 1.0, last.fields.c0 / g0)
    bulk_term = head.segment_mass(min(eps, grid.x_min)) + partial_node_integral(
        grid, integrand, grid.x_min, eps
    )
    return MassSplit(kappa_mass=kappa_mass, bulk_mass_below_eps=bulk_term)


def build_trace(
    checkpoints: list[Checkpoint],
    fields_inf: OperatorFields,
    grid: Grid,
    constants: TheoryConstants,
    k_scale: float,
    delta: float,
) -> DiagnosticsTrace:
    """Checkpoint-time history of the convergence diagnostics."""
    times, qs, b0s, cond, gb, gc = [], [], [], [], [], []
    for cp in checkpoints:
        times.append(cp.t)
        q, _ = q_of_t(cp.w_log, cp.t, constants.beta_shape)
        qs.append(q)
        b0s.append(cp.fields.b0)
        cond.append(mass_below(cp.density, k_scale / cp.t) if cp.t > 0 else 0.0)
        gaps = regular_convergence_gaps(cp.fields, fields_inf, grid, delta)
        gb.append(gaps.gap_b_c1)
        gc.append(gaps.gap_c_c0)
    return DiagnosticsTrace(
        times=np.array(times),
        q_values=np.array(qs),
        b0_values=np.array(b0s),
        condensate_estimates=np.array(cond),
        gap_b_c1=np.array(gb),
        gap_c_c0=np.array(gc),
    )
