"""Exponential (integrating-factor) midpoint stepper with step doubling.

One step freezes the operator fields at the interval midpoint state and
applies the exact solution of the frozen linear-affine equation,

    p'(x) = e^(b dt) p(x) + x^alpha c dt phi1(b dt),   phi1(z) = (e^z-1)/z,

so the scheme is exact whenever b and c are constant in time, and
unconditionally positivity-preserving for c >= 0.  The log-weight
integral of b at the origin (whose exponential is the proof-side weight
W_t) accumulates with the same midpoint values on accepted steps.

Error control is step doubling: one dt step against two dt/2 steps in a
scaled max norm, with the dt/2 pair kept on acceptance.  Negative
undershoot is never clamped (clamping would break the mass identities
used as gates); the running minimum is recorded instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import exp_affine_step, scaled_max_diff
from .errors import BlowUpError, ConfigurationError, NumericError, StiffnessError
from .grid import head_or_flat
from .measures import MeasureWithAtom
from .models.base import Model, OperatorFields

_SAFETY = 0.9
_GROW_CAP = 4.0
_SHRINK_CAP = 0.25
# step-doubling exponent for a locally second-order scheme
_CONTROL_EXPONENT = -1.0 / 3.0


@dataclass(frozen=True)
class StepperConfig:
    dt_init: float = 1e-4
    dt_max: float = 1.0
    rtol: float = 1e-7
    atol: float = 1e-10
    blowup_cap: float = 1e12
    checkpoint_times: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.dt_init <= self.dt_max:
            raise ConfigurationError("need 0 < dt_init <= dt_max")
        if self.rtol <= 0.0 or self.atol <= 0.0:
            raise ConfigurationError("tolerances must be positive")
        if self.blowup_cap <= 0.0:
            raise ConfigurationError("blowup_cap must be positive")


@dataclass(frozen=True)
class Checkpoint:
    t: float
    density: MeasureWithAtom
    fields: OperatorFields
    w_log: float


@dataclass
class SimulationState:
    t: float
    density: MeasureWithAtom
    w_log: float = 0.0
    checkpoints: list[Checkpoint] = field(default_factory=list)
    step_count: int = 0
    rejected_steps: int = 0
    min_density_seen: float = np.inf


def _raw_step(
    bulk: np.ndarray, model: Model, measure: MeasureWithAtom, dt: float
) -> tuple[np.ndarray, float]:
    """One exponential midpoint step; returns (new bulk, b_mid(0) dt)."""
    grid = model.grid
    fields = model.operator_fields(measure)
    src = grid.nodes**model.alpha * fields.c
    half = exp_affine_step(bulk, fields.b, src, dt / 2.0)
    mid = measure.with_bulk(half, head_or_flat(grid, half))
    fields_mid = model.operator_fields(mid)
    src_mid = grid.nodes**model.alpha * fields_mid.c
    full = exp_affine_step(bulk, fields_mid.b, src_mid, dt)
    return full, fields_mid.b0 * dt


def _check_blowup(bulk: np.ndarray, model: Model, t: float, cap: float) -> None:
    bad = ~np.isfinite(bulk) | (np.abs(bulk) > cap)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BlowUpError(
            f"blow-up suspected at t = {t}, x = {model.grid.nodes[i]}",
            t=t,
            x=float(model.grid.nodes[i]),
            value=float(bulk[i]),
        )


def exponential_step(
    state: SimulationState, model: Model, dt: float, blowup_cap: float = 1e12
) -> SimulationState:
    """Candidate state one step ahead (no checkpointing, no error control)."""
    if dt <= 0.0:
        raise ConfigurationError("dt must be positive")
    bulk, dw = _raw_step(state.density.bulk, model, state.density, dt)
    _check_blowup(bulk, model, state.t + dt, blowup_cap)
    new_density = state.density.with_bulk(bulk, head_or_flat(model.grid, bulk))
    return SimulationState(
        t=state.t + dt,
        density=new_density,
        w_log=state.w_log + dw,
        checkpoints=list(state.checkpoints),
        step_count=state.step_count + 1,
        rejected_steps=state.rejected_steps,
        min_density_seen=min(state.min_density_seen, float(bulk.min())),
    )


def _record_checkpoint(state: SimulationState, model: Model) -> None:
    fields = model.operator_fields(state.density)
    state.checkpoints.append(
        Checkpoint(t=state.t, density=state.density, fields=fields, w_log=state.w_log)
    )


def adaptive_advance(
    state: SimulationState,
    model: Model,
    config: StepperConfig,
    t_target: float,
    observer=None,
) -> SimulationState:
    """Advance ``state`` in place to ``t_target`` under step-doubling control.

    Checkpoints are recorded when the trajectory lands on configured times
    (steps are clipped to land exactly).  ``observer(state, dt)`` runs
    after every accepted step.
    """
    if t_target < state.t:
        raise ConfigurationError(f"t_target = {t_target} lies before t = {state.t}")
    recorded = {cp.t for cp in state.checkpoints}
    if state.t in config.checkpoint_times and state.t not in recorded:
        _record_checkpoint(state, model)
        recorded.add(state.t)
    if t_target == state.t:
        return state

    events = sorted(
        {tc for tc in config.checkpoint_times if state.t < tc <= t_target} | {t_target}
    )
    dt = min(config.dt_init, config.dt_max)
    grid = model.grid
    measure = state.density

    while state.t < t_target:
        t_next_event = events[0]
        clipped = dt > t_next_event - state.t
        dt_try = min(dt, t_next_event - state.t)
        try:
            coarse, _ = _raw_step(measure.bulk, model, measure, dt_try)
            half_bulk, dw_a = _raw_step(measure.bulk, model, measure, dt_try / 2.0)
            half_measure = measure.with_bulk(half_bulk, head_or_flat(grid, half_bulk))
            fine, dw_b = _raw_step(half_bulk, model, half_measure, dt_try / 2.0)
            if np.all(np.isfinite(coarse)) and np.all(np.isfinite(fine)):
                est = scaled_max_diff(coarse, fine, config.atol, config.rtol)
            else:
                est = np.inf
        except NumericError:
            # overflow inside a trial; shrink and retry
            est = np.inf
        if not np.isfinite(est):
            est = np.inf

        factor = _SAFETY * est**_CONTROL_EXPONENT if 0.0 < est < np.inf else (
            _GROW_CAP if est == 0.0 else _SHRINK_CAP
        )
        proposed = dt_try * min(max(factor, _SHRINK_CAP), _GROW_CAP)

        if est <= 1.0:
            _check_blowup(fine, model, state.t + dt_try, config.blowup_cap)
            state.t = state.t + dt_try
            if abs(state.t - t_next_event) < 1e-12 * max(1.0, t_next_event):
                state.t = t_next_event
            measure = measure.with_bulk(fine, head_or_flat(grid, fine))
            state.density = measure
            state.w_log += dw_a + dw_b
            state.step_count += 1
            state.min_density_seen = min(state.min_density_seen, float(fine.min()))
            if state.t == t_next_event:
                events.pop(0)
                if state.t in config.checkpoint_times and state.t not in recorded:
                    _record_checkpoint(state, model)
                    recorded.add(state.t)
            if observer is not None:
                observer(state, dt_try)
            # an event-clipped attempt must not shrink the running step
            dt = min(max(proposed, dt) if clipped else proposed, config.dt_max)
        else:
            state.rejected_steps += 1
            dt = min(proposed, config.dt_max)
            if dt < 1e-12 * t_target:
                raise StiffnessError(
                    f"step size underflow (dt = {dt}) at t = {state.t}: problem too stiff"
                )
    return state
