"""Exponential Heun time stepping with exact linear factors.

``q`` is damped by ``exp(-|k| dt)`` and ``u`` by ``exp(-|k|^2 dt)``; the
nonlinear terms are treated explicitly (second order). Steps are clipped so
that every requested sample time is hit exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import spectral as sp
from .model import SimState, rhs

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-8
GROWTH_LIMIT = 1.01
_LAND_TOL = 1e-12


class BlowUpError(RuntimeError):
    """Raised when a step produces non-finite values or the charge norm grows."""

    def __init__(self, message: str, last_good_time: float):
        super().__init__(f"{message} (last good time t={last_good_time:.17g})")
        self.last_good_time = last_good_time


@dataclass
class IntegratorConfig:
    dt_max: float
    t_end: float
    cfl: float = 0.4
    sample_times: Sequence[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        ts = [float(t) for t in self.sample_times]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample_times must be strictly increasing")
        if ts and (ts[0] < 0 or ts[-1] > self.t_end):
            raise ValueError("sample_times must lie in [0, t_end]")
        self.sample_times = ts


def cfl_dt(state: SimState, config: IntegratorConfig) -> float:
    umax = sp.norm(state.grid, state.u_hat, "Linf")
    return min(config.dt_max, config.cfl * state.grid.spacing / max(umax, EPS_FLOOR))


def linear_factors(grid: sp.Grid, dt: float) -> tuple[np.ndarray, np.ndarray]:
    return np.exp(-grid.kmag * dt), np.exp(-grid.kmag2 * dt)


def _zero_rhs(state: SimState) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros_like(state.q_hat), np.zeros_like(state.u_hat)


def step(state: SimState, dt: float, check: bool = False, nonlinear: bool = True) -> SimState:
    """One exponential Heun step of size ``dt``.

    With ``nonlinear=False`` only the linear factors act, so the step is the
    exact uncoupled evolution.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    grid = state.grid
    eq, eu = linear_factors(grid, dt)
    if not nonlinear:
        q_new, u_new = eq * state.q_hat, eu * state.u_hat
        return state.with_fields(state.t + dt, q_new, u_new)
    try:
        nq0, nu0 = rhs(state, check=check)
        q_pred = eq * (state.q_hat + dt * nq0)
        u_pred = eu * (state.u_hat + dt * nu0)
        nq1, nu1 = rhs(state.with_fields(state.t + dt, q_pred, u_pred), check=False)
    except sp.NonFiniteError as exc:
        raise BlowUpError(str(exc), state.t) from None
    q_new = eq * state.q_hat + 0.5 * dt * (eq * nq0 + nq1)
    u_new = eu * state.u_hat + 0.5 * dt * (eu * nu0 + nu1)
    if not (np.all(np.isfinite(q_new)) and np.all(np.isfinite(u_new))):
        raise BlowUpError("non-finite coefficients after step", state.t)
    return state.with_fields(state.t + dt, q_new, u_new)


Sink = Callable[[SimState], None]


def run(
    state: SimState,
    config: IntegratorConfig,
    sink: Sink | None = None,
    dt_fixed: float | None = None,
    nonlinear: bool = True,
    stats: dict | None = None,
) -> SimState:
    """Advance to ``config.t_end``, calling ``sink`` at every sample time.

    ``dt_fixed`` bypasses the CFL rule (used for convergence studies); steps
    are still clipped to land on sample times. ``stats``, if given, receives
    the step count.
    """
    samples = list(config.sample_times)
    targets = sorted(set(samples) | {float(config.t_end)})
    grid = state.grid
    last_norm = sp.norm(grid, state.q_hat, "L2")
    last_sample_t = state.t

    def emit(s: SimState) -> None:
        nonlocal last_norm, last_sample_t
        cur = sp.norm(grid, s.q_hat, "L2")
        if cur > GROWTH_LIMIT * last_norm:
            raise BlowUpError(
                f"charge L2 norm grew from {last_norm:.6e} to {cur:.6e}", last_sample_t
            )
        last_norm, last_sample_t = cur, s.t
        if sink is not None:
            sink(s)

    sample_set = set(samples)
    if state.t in sample_set:
        emit(state)
    nsteps = 0
    for target in targets:
        if target <= state.t:
            continue
        while target - state.t > _LAND_TOL * max(1.0, target):
            dt = dt_fixed if dt_fixed is not None else cfl_dt(state, config)
            dt = min(dt, target - state.t)
            try:
                state = step(state, dt, nonlinear=nonlinear)
            except BlowUpError as exc:
                raise BlowUpError("non-finite coefficients after step", last_sample_t) from exc
            nsteps += 1
        state = state.with_fields(target, state.q_hat, state.u_hat)
        if target in sample_set:
            emit(state)
    if stats is not None:
        stats["steps"] = nsteps
    log.debug("run finished at t=%g after %d steps", state.t, nsteps)
    return state
