"""Periodic grid, transforms, and exact Fourier-multiplier operators.

Fields are plain numpy arrays. A scalar field has shape ``(n, n)``; a vector
field has shape ``(2, n, n)`` with the component on the leading axis. Axis 0
of a scalar array is ``x1``, axis 1 is ``x2``.

Spectral coefficients follow

    coeff(m) = (1/n^2) * sum_j f(x_j) exp(-i k_m . x_j),   x_j = -L + j h,

so ``coeff(m)`` approximates the whole-plane transform at ``k_m`` divided by
the box area ``(2L)^2``. Coefficients are stored in FFT order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

NORM_KINDS = ("L2", "L4", "Linf", "Hs", "W14")
MEAN_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic lattice on ``[-L, L)^2`` with precomputed symbols."""

    n: int
    half_period: float
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)
    k1: np.ndarray = field(repr=False)
    k2: np.ndarray = field(repr=False)
    kmag: np.ndarray = field(repr=False)
    kmag2: np.ndarray = field(repr=False)
    phase: np.ndarray = field(repr=False)
    keep: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_period / self.n

    @property
    def dk(self) -> float:
        return np.pi / self.half_period

    @property
    def area(self) -> float:
        return (2.0 * self.half_period) ** 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Collocation coordinates ``(x1, x2)``, each of shape ``(n, n)``."""
        x = -self.half_period + self.spacing * np.arange(self.n)
        return np.meshgrid(x, x, indexing="ij")

    def index(self, m: tuple[int, int]) -> tuple[int, int]:
        """Array index of integer mode ``m`` in FFT order."""
        half = self.n // 2
        for c in m:
            if not -half <= c < half:
                raise ValueError(f"mode {m} outside [-{half}, {half})")
        return (m[0] % self.n, m[1] % self.n)

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n and self.half_period == other.half_period

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Grid) and self.same_as(other)

    def __hash__(self) -> int:
        return hash((self.n, self.half_period))


def make_grid(n: int, half_period: float) -> Grid:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"n must be an integer, got {type(n).__name__}")
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if not 16 <= n <= 2**14:
        raise ValueError(f"n must lie in [16, 16384], got {n}")
    if not np.isfinite(half_period) or half_period <= 0:
        raise ValueError(f"half_period must be positive, got {half_period}")
    n = int(n)
    L = float(half_period)
    m = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    k1 = (np.pi / L) * m1
    k2 = (np.pi / L) * m2
    kmag2 = k1**2 + k2**2
    kmag = np.sqrt(kmag2)
    # x_j = -L + j h shifts every mode by exp(i k_m L) = (-1)^m
    phase = np.where((m1 + m2) % 2 == 0, 1.0, -1.0)
    keep = np.maximum(np.abs(m1), np.abs(m2)) <= n / 3
    for a in (m1, m2, k1, k2, kmag, kmag2, phase, keep):
        a.setflags(write=False)
    return Grid(n, L, m1, m2, k1, k2, kmag, kmag2, phase, keep)


class NonFiniteError(ValueError):
    """A transform was handed NaN or infinite values."""


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("field contains non-finite values")


def forward(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Physical values to spectral coefficients (componentwise for vectors)."""
    f = np.asarray(f, dtype=float)
    _check_finite(f)
    if f.shape[-2:] != grid.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {grid.shape}")
    return grid.phase * sfft.fft2(f, axes=(-2, -1), workers=-1) / grid.n**2


def inverse(grid: Grid, f_hat: np.ndarray) -> np.ndarray:
    """Spectral coefficients to real physical values."""
    f_hat = np.asarray(f_hat)
    _check_finite(f_hat)
    if f_hat.shape[-2:] != grid.shape:
        raise ValueError(f"field shape {f_hat.shape} does not match grid {grid.shape}")
    return sfft.ifft2(grid.phase * f_hat * grid.n**2, axes=(-2, -1), workers=-1).real


def transform(grid: Grid, f: np.ndarray, direction: str) -> np.ndarray:
    if direction == "forward":
        return forward(grid, f)
    if direction == "inverse":
        return inverse(grid, f)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def mean_coefficient(f_hat: np.ndarray) -> np.ndarray:
    return f_hat[..., 0, 0]


def _is_mean_free(f_hat: np.ndarray) -> bool:
    scale = np.sqrt(np.sum(np.abs(f_hat) ** 2))
    if scale == 0:
        return True
    return bool(np.all(np.abs(mean_coefficient(f_hat)) <= MEAN_TOL * scale))


def symbol_power(grid: Grid, alpha: float) -> np.ndarray:
    """``|k|^alpha`` with the zero mode set to 0 (or 1 when alpha == 0)."""
    if alpha == 0:
        return np.ones(grid.shape)
    out = np.zeros(grid.shape)
    nz = grid.kmag > 0
    out[nz] = grid.kmag[nz] ** alpha
    return out


def fractional_laplacian(grid: Grid, f_hat: np.ndarray, alpha: float) -> np.ndarray:
    """Apply ``Lambda^alpha``, the multiplier ``|k|^alpha``."""
    if not -2.0 <= alpha <= 4.0:
        raise ValueError(f"alpha must lie in [-2, 4], got {alpha}")
    if alpha < 0 and not _is_mean_free(f_hat):
        raise ValueError("negative powers need a mean-free field")
    return symbol_power(grid, alpha) * f_hat


def _odd(grid: Grid, k: np.ndarray) -> np.ndarray:
    # the Nyquist row/column has no conjugate partner; odd symbols drop it
    nyq = (grid.m1 == -grid.n // 2) | (grid.m2 == -grid.n // 2)
    return np.where(nyq, 0.0, k)


def riesz(grid: Grid, f_hat: np.ndarray) -> np.ndarray:
    """Riesz transform ``R = grad Lambda^{-1}``, symbol ``i k / |k|``."""
    if not _is_mean_free(f_hat):
        raise ValueError("Riesz transform needs a mean-free field")
    inv = symbol_power(grid, -1.0)
    return np.stack(
        [1j * _odd(grid, grid.k1) * inv * f_hat, 1j * _odd(grid, grid.k2) * inv * f_hat]
    )


def gradient(grid: Grid, f_hat: np.ndarray) -> np.ndarray:
    """Spectral gradient; for a vector input returns shape ``(2, 2, n, n)``
    indexed as ``[component, derivative]``."""
    d1 = 1j * _odd(grid, grid.k1)
    d2 = 1j * _odd(grid, grid.k2)
    return np.stack([d1 * f_hat, d2 * f_hat], axis=f_hat.ndim - 2)


def divergence(grid: Grid, v_hat: np.ndarray) -> np.ndarray:
    return 1j * _odd(grid, grid.k1) * v_hat[0] + 1j * _odd(grid, grid.k2) * v_hat[1]


def differentiate(grid: Grid, f_hat: np.ndarray, mode: str) -> np.ndarray:
    if mode == "gradient":
        return gradient(grid, f_hat)
    if mode == "divergence":
        return divergence(grid, f_hat)
    raise ValueError(f"mode must be 'gradient' or 'divergence', got {mode!r}")


def leray_project(grid: Grid, v_hat: np.ndarray) -> np.ndarray:
    """Project onto divergence-free fields with symbol ``I - k k^T / |k|^2``.

    The zero mode passes through unchanged.
    """
    inv2 = symbol_power(grid, -2.0)
    kdotv = (grid.k1 * v_hat[0] + grid.k2 * v_hat[1]) * inv2
    return np.stack([v_hat[0] - grid.k1 * kdotv, v_hat[1] - grid.k2 * kdotv])


def dealias(grid: Grid, f_hat: np.ndarray) -> np.ndarray:
    """2/3 rule: zero every mode with ``max(|m1|, |m2|) > n/3``."""
    return np.where(grid.keep, f_hat, 0.0)


def _l2(grid: Grid, f_hat: np.ndarray) -> float:
    return float(2.0 * grid.half_period * np.sqrt(np.sum(np.abs(f_hat) ** 2)))


def _pointwise_magnitude(values: np.ndarray, ndim_field: int) -> np.ndarray:
    lead = values.ndim - ndim_field
    if lead == 0:
        return np.abs(values)
    return np.sqrt(np.sum(values**2, axis=tuple(range(lead))))


def _lp(grid: Grid, values: np.ndarray, p: float) -> float:
    mag = _pointwise_magnitude(values, 2)
    h2 = grid.spacing**2
    return float((h2 * np.sum(mag**p)) ** (1.0 / p))


def norm(grid: Grid, f_hat: np.ndarray, kind: str, s: float | None = None) -> float:
    """Norm of a spectral scalar or vector field.

    ``L2`` uses Parseval; ``L4`` and ``Linf`` use the collocation values;
    ``Hs`` is ``||Lambda^s f||_L2`` (homogeneous); ``W14`` is
    ``||f||_L4 + ||grad f||_L4`` with pointwise Euclidean/Frobenius magnitudes.
    """
    if kind not in NORM_KINDS:
        raise ValueError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
    if kind == "L2":
        return _l2(grid, f_hat)
    if kind == "Hs":
        if s is None:
            raise ValueError("Hs norm needs the order s")
        if s < 0 and not _is_mean_free(f_hat):
            raise ValueError("Hs with s < 0 needs a mean-free field")
        return _l2(grid, symbol_power(grid, s) * f_hat)
    values = inverse(grid, f_hat)
    if kind == "Linf":
        return float(np.max(_pointwise_magnitude(values, 2))) if values.size else 0.0
    if kind == "L4":
        return _lp(grid, values, 4)
    grad = inverse(grid, gradient(grid, f_hat))
    return _lp(grid, values, 4) + _lp(grid, grad, 4)


def inner(grid: Grid, f_hat: np.ndarray, g_hat: np.ndarray) -> float:
    """Real L2 inner product ``integral f . g dx`` via Parseval."""
    return float(grid.area * np.sum(np.conj(f_hat) * g_hat).real)
