"""Nonlinear right-hand sides of the charge/fluid system and the energy check.

The charge ``q`` obeys ``dq/dt + u.grad q + Lambda q = 0`` and the velocity
``du/dt + P[(u.grad)u] - Delta u = -P[q R q]``. Only the nonlinear parts are
returned here; the integrator treats ``Lambda`` and ``-Delta`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import spectral as sp
from .spectral import Grid

DIV_FREE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SimState:
    """Time plus spectral charge density ``q_hat`` (n, n) and velocity ``u_hat`` (2, n, n)."""

    grid: Grid
    t: float
    q_hat: np.ndarray
    u_hat: np.ndarray

    def __post_init__(self) -> None:
        if self.q_hat.shape != self.grid.shape:
            raise ValueError(f"q_hat shape {self.q_hat.shape} != {self.grid.shape}")
        if self.u_hat.shape != (2,) + self.grid.shape:
            raise ValueError(f"u_hat shape {self.u_hat.shape} != {(2,) + self.grid.shape}")

    def with_fields(self, t: float, q_hat: np.ndarray, u_hat: np.ndarray) -> "SimState":
        return replace(self, t=t, q_hat=q_hat, u_hat=u_hat)

    @property
    def mean_q(self) -> float:
        return float(self.q_hat[0, 0].real)


def zero_state(grid: Grid, t: float = 0.0) -> SimState:
    return SimState(grid, t, np.zeros(grid.shape, complex), np.zeros((2,) + grid.shape, complex))


def divergence_error(grid: Grid, u_hat: np.ndarray) -> float:
    """``||div u|| / ||grad u||`` (0 for a constant field)."""
    scale = sp.norm(grid, u_hat, "Hs", s=1.0)
    if scale == 0:
        return 0.0
    return sp.norm(grid, sp.divergence(grid, u_hat), "L2") / scale


def require_divergence_free(grid: Grid, u_hat: np.ndarray, tol: float = DIV_FREE_TOL) -> None:
    err = divergence_error(grid, u_hat)
    if err > tol:
        raise ValueError(f"velocity is not divergence-free (relative error {err:.3e})")


def mean_free(q_hat: np.ndarray) -> np.ndarray:
    out = q_hat.copy()
    out[..., 0, 0] = 0.0
    return out


def rhs_q(state: SimState, check: bool = True) -> np.ndarray:
    """``-div(u q)``, dealiased. The dissipation ``-Lambda q`` is excluded."""
    grid = state.grid
    if check:
        require_divergence_free(grid, state.u_hat)
    u = sp.inverse(grid, state.u_hat)
    q = sp.inverse(grid, state.q_hat)
    flux_hat = sp.dealias(grid, sp.forward(grid, u * q))
    out = -sp.divergence(grid, flux_hat)
    out[0, 0] = 0.0
    return out


def advection_u(grid: Grid, u_hat: np.ndarray, u: np.ndarray | None = None) -> np.ndarray:
    """Dealiased spectral ``(u.grad)u`` before projection."""
    if u is None:
        u = sp.inverse(grid, u_hat)
    grad_u = sp.inverse(grid, sp.gradient(grid, u_hat))  # [component, derivative]
    adv = np.einsum("jxy,ijxy->ixy", u, grad_u)
    return sp.dealias(grid, sp.forward(grid, adv))


def electric_force(grid: Grid, q_hat: np.ndarray, q: np.ndarray | None = None) -> np.ndarray:
    """Dealiased spectral ``q R q`` before projection.

    The Riesz transform annihilates the mean, so it acts on the fluctuation;
    the remaining ``mean * R q`` piece is a gradient and is removed by P.
    """
    if q is None:
        q = sp.inverse(grid, q_hat)
    rq = sp.inverse(grid, sp.riesz(grid, mean_free(q_hat)))
    return sp.dealias(grid, sp.forward(grid, q * rq))


def rhs_u(state: SimState, check: bool = True) -> np.ndarray:
    """``-P[(u.grad)u] - P[q R q]``. The viscous term is excluded."""
    grid = state.grid
    if check:
        require_divergence_free(grid, state.u_hat)
    total = advection_u(grid, state.u_hat) + electric_force(grid, state.q_hat)
    return -sp.leray_project(grid, total)


def rhs(state: SimState, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Both nonlinear terms, sharing the inverse transforms."""
    grid = state.grid
    if check:
        require_divergence_free(grid, state.u_hat)
    u = sp.inverse(grid, state.u_hat)
    q = sp.inverse(grid, state.q_hat)
    flux_hat = sp.dealias(grid, sp.forward(grid, u * q))
    dq = -sp.divergence(grid, flux_hat)
    dq[0, 0] = 0.0
    total = advection_u(grid, state.u_hat, u) + electric_force(grid, state.q_hat, q)
    return dq, -sp.leray_project(grid, total)


def energy(state: SimState) -> float:
    """``1/2 ||Lambda^{-1/2} q'||^2 + 1/2 ||u||^2`` with ``q'`` the fluctuation of q."""
    grid = state.grid
    qf = mean_free(state.q_hat)
    return 0.5 * sp.norm(grid, qf, "Hs", s=-0.5) ** 2 + 0.5 * sp.norm(grid, state.u_hat, "L2") ** 2


def dissipation(state: SimState) -> float:
    """``||q'||^2 + ||grad u||^2``."""
    grid = state.grid
    return (
        sp.norm(grid, mean_free(state.q_hat), "L2") ** 2
        + sp.norm(grid, state.u_hat, "Hs", s=1.0) ** 2
    )


def energy_residual(state_a: SimState, state_b: SimState) -> float:
    """Defect of the discrete energy identity between two states.

    Returns ``|(E_b - E_a)/(t_b - t_a) + (D_a + D_b)/2|``.
    """
    if not state_a.grid.same_as(state_b.grid):
        raise ValueError("states live on different grids")
    dt = state_b.t - state_a.t
    if not dt > 0:
        raise ValueError(f"need t_b > t_a, got t_a={state_a.t}, t_b={state_b.t}")
    slope = (energy(state_b) - energy(state_a)) / dt
    return abs(slope + 0.5 * (dissipation(state_a) + dissipation(state_b)))
