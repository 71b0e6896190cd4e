"""Linear comparison evolutions: the Poisson semigroup for the charge and the
heat semigroup for the velocity, applied as exact multipliers."""

from __future__ import annotations

import warnings

import numpy as np

from . import spectral as sp
from .spectral import Grid

RESOLVED_TOL = 1e-10


class UnresolvedFieldWarning(UserWarning):
    pass


def poisson_evolve(grid: Grid, q0_hat: np.ndarray, t: float) -> np.ndarray:
    """``exp(-t Lambda) q0``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return np.exp(-grid.kmag * t) * q0_hat


def heat_evolve(grid: Grid, u0_hat: np.ndarray, t: float) -> np.ndarray:
    """``exp(t Delta) u0``, componentwise."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return np.exp(-grid.kmag2 * t) * u0_hat


def tail_fraction(grid: Grid, f_hat: np.ndarray) -> float:
    """Share of the L2 energy sitting above the dealiasing cutoff."""
    power = np.abs(f_hat) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    return float(power[..., ~grid.keep].sum() / total)


def grad_sup(grid: Grid, field_hat: np.ndarray) -> float:
    """``||grad f||_Linf`` over the collocation points (Frobenius for vectors)."""
    if tail_fraction(grid, field_hat) > RESOLVED_TOL:
        warnings.warn("field is not resolved below the dealiasing cutoff", UnresolvedFieldWarning)
    grad = sp.inverse(grid, sp.gradient(grid, field_hat))
    lead = tuple(range(grad.ndim - 2))
    return float(np.sqrt(np.max(np.sum(grad**2, axis=lead))))
