"""Per-sample norms, moments, shell energies and probes, plus decay fits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import spectral as sp
from .model import SimState
from .spectral import Grid

MIN_FIT_SAMPLES = 20
SUPPORT_TOL = 0.01

DEFAULT_PROBE_MODES: tuple[tuple[int, int], ...] = (
    (1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2), (2, 1), (1, 2), (3, 0), (0, 3),
)

SERIES_COLUMNS = (
    "t", "l2q2", "l2u2", "l4q4", "h1q2", "h1u2", "h2q2", "h2u2", "w14u", "moment",
    "mean_q", "diffq2", "diffu2", "shell_low_q", "shell_high_q",
    "probe_zeta_max", "probe_v_max",
)


class SupportWarning(UserWarning):
    """Charge mass leaks out of the central half of the box."""


@dataclass(frozen=True)
class TimeSeriesRecord:
    t: float
    l2q2: float
    l2u2: float
    l4q4: float
    h1q2: float
    h1u2: float
    h2q2: float
    h2u2: float
    w14u: float
    moment: float
    mean_q: float
    diffq2: float
    diffu2: float
    shell_low_q: float
    shell_high_q: float
    probe_zeta_max: float
    probe_v_max: float
    probe_zeta: tuple[float, ...] = ()
    probe_v: tuple[float, ...] = ()

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in SERIES_COLUMNS)

    @classmethod
    def from_row(cls, values: Sequence[float]) -> "TimeSeriesRecord":
        if len(values) != len(SERIES_COLUMNS):
            raise ValueError(f"expected {len(SERIES_COLUMNS)} values, got {len(values)}")
        return cls(**{c: float(v) for c, v in zip(SERIES_COLUMNS, values)})


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    window: tuple[float, float]
    n_samples: int
    rms_residual: float


def splitting_radius(t: float, coefficient: float, power: float = 1.0) -> float:
    """``coefficient * (t + 1)^(-power)``; the charge radius is ``(r/2)/(t+1)``."""
    return coefficient * (t + 1.0) ** (-power)


def charge_radius(t: float, r: float = 4.0) -> float:
    return splitting_radius(t, 0.5 * r, 1.0)


def shell_split(grid: Grid, f_hat: np.ndarray, radius: float) -> tuple[float, float]:
    """L2 energy inside ``|k| <= radius`` and outside it."""
    power = grid.area * np.abs(f_hat) ** 2
    if power.ndim == 3:
        power = power.sum(axis=0)
    inside = grid.kmag <= radius
    return float(power[inside].sum()), float(power[~inside].sum())


def weight(grid: Grid) -> np.ndarray:
    """``a(x) = sqrt(|x|^2 + 1)`` in minimal-image coordinates."""
    x1, x2 = grid.coords()
    return np.sqrt(1.0 + x1**2 + x2**2)


def central_mask(grid: Grid) -> np.ndarray:
    x1, x2 = grid.coords()
    half = 0.5 * grid.half_period
    return (np.abs(x1) < half) & (np.abs(x2) < half)


def outside_fraction(grid: Grid, q: np.ndarray) -> float:
    """Share of ``||q||^2`` lying outside ``[-L/2, L/2)^2``."""
    total = np.sum(q**2)
    if total == 0:
        return 0.0
    return float(np.sum(q[~central_mask(grid)] ** 2) / total)


def moment(grid: Grid, q_hat: np.ndarray, warn: bool = True) -> float:
    """``M = ||a q||_L2`` by collocation quadrature."""
    q = sp.inverse(grid, q_hat)
    if warn and outside_fraction(grid, q) > SUPPORT_TOL:
        warnings.warn("charge mass outside the central half exceeds 1%", SupportWarning)
    a2 = weight(grid) ** 2
    return float(math.sqrt(grid.spacing**2 * np.sum(a2 * q**2)))


def fourier_probe(
    grid: Grid, f_hat: np.ndarray, modes: Sequence[tuple[int, int]]
) -> list[float]:
    """``|coeff(m)| * (2L)^2 / |k_m|`` for each integer mode ``m``."""
    out = []
    for m in modes:
        idx = grid.index(tuple(m))
        km = grid.kmag[idx]
        if km == 0:
            raise ValueError("probe mode (0, 0) has |k| = 0")
        c = f_hat[(...,) + idx]
        out.append(float(np.sqrt(np.sum(np.abs(c) ** 2)) * grid.area / km))
    return out


def record(
    state: SimState,
    Q_hat: np.ndarray,
    U_hat: np.ndarray,
    probe_modes: Sequence[tuple[int, int]] = DEFAULT_PROBE_MODES,
    splitting_r: float = 4.0,
    warn_support: bool = False,
) -> TimeSeriesRecord:
    """Assemble every diagnostic for one sample.

    ``Q_hat``/``U_hat`` are the linear evolutions of the same initial data at
    ``state.t``. The v probe is stored raw; callers normalize by
    ``ln^2(e + t)`` themselves.
    """
    grid = state.grid
    if Q_hat.shape != grid.shape or U_hat.shape != (2,) + grid.shape:
        raise ValueError("comparison fields do not match the state grid")
    q_hat, u_hat = state.q_hat, state.u_hat
    l2q2 = sp.norm(grid, q_hat, "L2") ** 2
    low, high = shell_split(grid, q_hat, charge_radius(state.t, splitting_r))
    zeta_hat = q_hat - Q_hat
    v_hat = u_hat - U_hat
    pz = fourier_probe(grid, zeta_hat, probe_modes) if probe_modes else []
    pv = fourier_probe(grid, v_hat, probe_modes) if probe_modes else []
    return TimeSeriesRecord(
        t=float(state.t),
        l2q2=l2q2,
        l2u2=sp.norm(grid, u_hat, "L2") ** 2,
        l4q4=sp.norm(grid, q_hat, "L4") ** 4,
        h1q2=sp.norm(grid, q_hat, "Hs", s=1.0) ** 2,
        h1u2=sp.norm(grid, u_hat, "Hs", s=1.0) ** 2,
        h2q2=sp.norm(grid, q_hat, "Hs", s=2.0) ** 2,
        h2u2=sp.norm(grid, u_hat, "Hs", s=2.0) ** 2,
        w14u=sp.norm(grid, u_hat, "W14"),
        moment=moment(grid, q_hat, warn=warn_support),
        mean_q=state.mean_q,
        diffq2=sp.norm(grid, zeta_hat, "L2") ** 2,
        diffu2=sp.norm(grid, v_hat, "L2") ** 2,
        shell_low_q=low,
        shell_high_q=high,
        probe_zeta_max=max(pz, default=0.0),
        probe_v_max=max(pv, default=0.0),
        probe_zeta=tuple(pz),
        probe_v=tuple(pv),
    )


def _window_mask(t: np.ndarray, window: tuple[float, float] | None) -> np.ndarray:
    if window is None:
        return np.ones(t.shape, bool)
    lo, hi = window
    # sample times are landed exactly, but allow for decimal round trips
    eps = 1e-12 * max(1.0, abs(hi))
    return (t >= lo - eps) & (t <= hi + eps)


def fit_exponent(
    t: Sequence[float], y: Sequence[float], window: tuple[float, float]
) -> FitResult:
    """Least-squares slope of ``ln y`` against ``ln(1 + t)`` on ``window``."""
    lo, hi = float(window[0]), float(window[1])
    if lo < 1:
        raise ValueError(f"fit window must start at t >= 1, got {lo}")
    if hi <= lo:
        raise ValueError(f"empty fit window [{lo}, {hi}]")
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    sel = _window_mask(t, (lo, hi))
    ts, ys = t[sel], y[sel]
    if ts.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples in window, got {ts.size}")
    if np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        raise ValueError("values must be positive and finite on the fit window")
    X = np.log1p(ts)
    Y = np.log(ys)
    A = np.vstack([X, np.ones_like(X)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = Y - (slope * X + intercept)
    return FitResult(
        float(slope), float(intercept), (lo, hi), int(ts.size), float(np.sqrt(np.mean(resid**2)))
    )


def sup_constant(
    t: Sequence[float], y: Sequence[float], p: float, window: tuple[float, float] | None = None
) -> float:
    """``sup (1 + t)^p y(t)`` over the samples in ``window``."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    sel = _window_mask(t, window)
    if not sel.any():
        raise ValueError("no samples in window")
    vals = (1.0 + t[sel]) ** p * y[sel]
    out = float(np.max(vals))
    if not math.isfinite(out):
        raise ValueError("supremum is not finite")
    return out


def relative_drift(a: float, b: float) -> float:
    """``|b - a| / max(|a|, |b|)``; 0 when both vanish."""
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(b - a) / scale


def monotone_violation(y: Sequence[float]) -> float:
    """Largest increase between consecutive samples (0 if non-increasing)."""
    y = np.asarray(y, float)
    if y.size < 2:
        return 0.0
    return float(max(0.0, np.max(np.diff(y))))

