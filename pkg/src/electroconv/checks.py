"""Seeded random-field checks of the operator inequalities used in the decay
analysis, plus the spectral identity suite.

Products that feed an inequality are evaluated on a grid padded to ``2n``,
which is exact for fields band-limited below the dealiasing cutoff.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import semigroups as sg
from . import spectral as sp
from .diagnostics import DEFAULT_PROBE_MODES, moment, outside_fraction
from .spectral import Grid

# Gaussian envelopes are treated as zero beyond this many widths
ENVELOPE_REACH = 6.0
SUPPORT_TOL = 0.01
REFINE_TOL = 0.20
CORDOBA_TOL = 1e-10


@dataclass(frozen=True)
class CheckReport:
    name: str
    n_trials: int
    worst: float
    seed: int
    n: int
    half_period: float
    passed: bool
    detail: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _cutoff_k(grid: Grid) -> float:
    return (grid.n / 3) * grid.dk


def _coefficient_box(grid: Grid, reach_k: float) -> int:
    """Half-width (in integer modes) of the box holding the random draws."""
    return min(int(grid.n // 3), int(math.ceil(reach_k / grid.dk)))


def _embed(grid: Grid, block: np.ndarray, K: int) -> np.ndarray:
    out = np.zeros(grid.shape, complex)
    idx = np.arange(-K, K + 1) % grid.n
    out[np.ix_(idx, idx)] = block
    return out


def _hermitian(grid: Grid, c: np.ndarray) -> np.ndarray:
    flip = np.roll(np.flip(c, axis=(0, 1)), 1, axis=(0, 1))
    return 0.5 * (c + np.conj(flip))


def random_field(
    grid: Grid, seed: int, envelope_k0: float, mean: float = 0.0
) -> np.ndarray:
    """Real Gaussian random field with coefficient std ``exp(-|k|^2 / (2 k0^2))``.

    Draws are made on a mode box fixed by the envelope, not by ``n``, so the
    same seed yields the same trigonometric polynomial on every grid wide
    enough to hold it.
    """
    if not 0 < envelope_k0 < _cutoff_k(grid):
        raise ValueError(
            f"envelope_k0={envelope_k0} must lie in (0, {_cutoff_k(grid):.6g}) "
            "to stay below the dealiasing cutoff"
        )
    K = _coefficient_box(grid, ENVELOPE_REACH * envelope_k0)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((2, 2 * K + 1, 2 * K + 1))
    block = (draws[0] + 1j * draws[1]) / math.sqrt(2.0)
    c = _embed(grid, block, K) * np.exp(-grid.kmag2 / (2.0 * envelope_k0**2))
    c = sp.dealias(grid, _hermitian(grid, c))
    c[0, 0] = mean
    return c


def random_velocity(grid: Grid, seed: int, envelope_k0: float) -> np.ndarray:
    """Divergence-free ``(-d2 psi, d1 psi)`` from a random stream function."""
    psi = random_field(grid, seed, envelope_k0)
    u = np.stack([-1j * grid.k2 * psi, 1j * grid.k1 * psi])
    return sp.dealias(grid, u)


def random_bump(grid: Grid, seed: int, spread: float = 0.0) -> np.ndarray:
    """Mean-free sum of a few Gaussians near the origin (exact transforms).

    Centres stay within ``spread`` (default ``L/8``) of the origin and widths
    are drawn from ``[0.6, 1.5]``; one extra Gaussian cancels the total mass.
    """
    rng = np.random.default_rng(seed)
    spread = spread or grid.half_period / 8
    count = int(rng.integers(2, 5))
    centers = rng.uniform(-spread, spread, size=(count + 1, 2))
    widths = rng.uniform(0.6, 1.5, size=count + 1)
    masses = rng.standard_normal(count)
    masses = np.append(masses, -masses.sum())
    out = np.zeros(grid.shape, complex)
    for (c1, c2), w, m in zip(centers, widths, masses):
        out += (
            m / grid.area
            * np.exp(-0.5 * w**2 * grid.kmag2)
            * np.exp(-1j * (grid.k1 * c1 + grid.k2 * c2))
        )
    out = sp.dealias(grid, out)
    out[0, 0] = 0.0
    return out


def padded(grid: Grid) -> Grid:
    return sp.make_grid(2 * grid.n, grid.half_period)


def pad(grid: Grid, big: Grid, f_hat: np.ndarray) -> np.ndarray:
    """Embed coefficients of ``grid`` into the larger grid ``big``."""
    out = np.zeros(f_hat.shape[:-2] + big.shape, complex)
    half = grid.n // 2
    idx_small = np.r_[0:half, grid.n - half + 1 : grid.n]
    idx_big = np.r_[0:half, big.n - half + 1 : big.n]
    out[..., idx_big[:, None], idx_big[None, :]] = f_hat[..., idx_small[:, None], idx_small[None, :]]
    return out


def truncate(big: Grid, grid: Grid, f_hat: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pad`: keep the modes representable on ``grid``."""
    out = np.zeros(f_hat.shape[:-2] + grid.shape, complex)
    half = grid.n // 2
    idx_small = np.r_[0:half, grid.n - half + 1 : grid.n]
    idx_big = np.r_[0:half, big.n - half + 1 : big.n]
    out[..., idx_small[:, None], idx_small[None, :]] = f_hat[..., idx_big[:, None], idx_big[None, :]]
    return out


# ---------------------------------------------------------------- inequalities


def cordoba_terms(grid: Grid, q_hat: np.ndarray) -> tuple[float, float]:
    """``(integral q^3 Lambda q, 1/2 ||Lambda^{1/2}(q^2)||^2)``."""
    big = padded(grid)
    qb = pad(grid, big, q_hat)
    q = sp.inverse(big, qb)
    lq = sp.inverse(big, sp.fractional_laplacian(big, qb, 1.0))
    lhs = big.spacing**2 * float(np.sum(q**3 * lq))
    sq_hat = sp.forward(big, q * q)
    rhs = 0.5 * sp.norm(big, sq_hat, "Hs", s=0.5) ** 2
    return lhs, rhs


def check_cordoba(grid: Grid, q_hat: np.ndarray) -> float:
    """Margin ``integral q^3 Lambda q - 1/2 ||Lambda^{1/2}(q^2)||^2`` (should be >= 0)."""
    lhs, rhs = cordoba_terms(grid, q_hat)
    return lhs - rhs


def cordoba_scale(grid: Grid, q_hat: np.ndarray) -> float:
    """Magnitude against which the margin is judged: the sum of both sides."""
    lhs, rhs = cordoba_terms(grid, q_hat)
    return abs(lhs) + abs(rhs)


def check_weight_commutator(grid: Grid, q_hat: np.ndarray) -> float:
    """``||a Lambda q - Lambda(a q)|| / ||q||`` with ``a = sqrt(1 + |x|^2)``."""
    qn = sp.norm(grid, q_hat, "L2")
    if qn == 0:
        return 0.0
    if abs(q_hat[0, 0]) > sp.MEAN_TOL * math.sqrt(np.sum(np.abs(q_hat) ** 2)):
        raise ValueError("weighted commutator needs a mean-free field")
    q = sp.inverse(grid, q_hat)
    if outside_fraction(grid, q) > SUPPORT_TOL:
        raise ValueError("field is not supported in the central half of the box")
    x1, x2 = grid.coords()
    a = np.sqrt(1.0 + x1**2 + x2**2)
    lq = sp.inverse(grid, sp.fractional_laplacian(grid, q_hat, 1.0))
    l_aq = sp.inverse(grid, sp.fractional_laplacian(grid, sp.forward(grid, a * q), 1.0))
    diff = a * lq - l_aq
    return float(math.sqrt(grid.spacing**2 * np.sum(diff**2)) / qn)


def h2_norm(grid: Grid, f_hat: np.ndarray) -> float:
    """Inhomogeneous ``H^2`` norm ``(sum (1 + |k|^2 + |k|^4) |f|^2)^{1/2}``."""
    w = 1.0 + grid.kmag2 + grid.kmag2**2
    return float(2 * grid.half_period * math.sqrt(np.sum(w * np.abs(f_hat) ** 2)))


def check_halfinv_commutator(grid: Grid, u_hat: np.ndarray, q_hat: np.ndarray) -> float:
    """``||Lambda^{-1/2}(u.grad q) - u.grad Lambda^{-1/2} q|| / (||u||_H2 ||q||)``."""
    un = h2_norm(grid, u_hat)
    qn = sp.norm(grid, q_hat, "L2")
    if un == 0 or qn == 0:
        return 0.0
    div = sp.norm(grid, sp.divergence(grid, u_hat), "L2")
    if div > 1e-10 * max(sp.norm(grid, u_hat, "Hs", s=1.0), 1e-300):
        raise ValueError("velocity is not divergence-free")
    big = padded(grid)
    ub = sp.inverse(big, pad(grid, big, u_hat))
    qb = pad(grid, big, q_hat)

    def transport(f_hat: np.ndarray) -> np.ndarray:
        g = sp.inverse(big, sp.gradient(big, f_hat))
        return sp.forward(big, ub[0] * g[0] + ub[1] * g[1])

    first = sp.fractional_laplacian(big, transport(qb), -0.5)
    second = transport(sp.fractional_laplacian(big, qb, -0.5))
    return sp.norm(big, first - second, "L2") / (un * qn)


def check_force_lowmode(
    grid: Grid, q_hat: np.ndarray, modes: Sequence[tuple[int, int]] = DEFAULT_PROBE_MODES
) -> float:
    """``max_m |P(q R q)(m)| (2L)^2 / (|k_m| ||q|| M(q))``."""
    qn = sp.norm(grid, q_hat, "L2")
    if qn == 0:
        return 0.0
    force = leray_force(grid, q_hat)
    M = moment(grid, q_hat, warn=False)
    out = 0.0
    for m in modes:
        idx = grid.index(tuple(m))
        km = grid.kmag[idx]
        if km == 0:
            raise ValueError("mode (0, 0) has |k| = 0")
        c = force[(slice(None),) + idx]
        out = max(out, float(np.sqrt(np.sum(np.abs(c) ** 2)) * grid.area / (km * qn * M)))
    return out


def leray_force(grid: Grid, q_hat: np.ndarray) -> np.ndarray:
    """``P(q R q)`` computed exactly on the padded grid, returned on ``grid``."""
    big = padded(grid)
    qb = pad(grid, big, q_hat)
    q = sp.inverse(big, qb)
    rq = sp.inverse(big, sp.riesz(big, qb))
    prod = sp.forward(big, q * rq)
    return truncate(big, grid, sp.leray_project(big, prod))


# ---------------------------------------------------------------- identity suite


def identity_errors(grid: Grid, f_hat: np.ndarray, v_hat: np.ndarray) -> dict[str, float]:
    """Relative errors of the spectral identities for one scalar/vector pair."""
    fn = sp.norm(grid, f_hat, "L2")
    f = sp.inverse(grid, f_hat)
    phys = math.sqrt(grid.spacing**2 * np.sum(f**2))
    rf = sp.riesz(grid, f_hat)
    anti = max(abs(sp.inner(grid, f_hat, rf[j])) for j in range(2))
    pv = sp.leray_project(grid, v_hat)
    vn = sp.norm(grid, v_hat, "L2")
    vscale = max(vn * np.max(grid.kmag), 1e-300)
    div = sp.norm(grid, sp.divergence(grid, pv), "L2") / vscale
    idem = sp.norm(grid, sp.leray_project(grid, pv) - pv, "L2") / max(vn, 1e-300)
    s, t = 0.7, 1.9
    a = sg.poisson_evolve(grid, sg.poisson_evolve(grid, f_hat, s), t)
    b = sg.poisson_evolve(grid, f_hat, s + t)
    h1 = sg.heat_evolve(grid, sg.heat_evolve(grid, v_hat, s), t)
    h2 = sg.heat_evolve(grid, v_hat, s + t)
    semi = max(
        sp.norm(grid, a - b, "L2") / max(sp.norm(grid, b, "L2"), 1e-300),
        sp.norm(grid, h1 - h2, "L2") / max(sp.norm(grid, h2, "L2"), 1e-300),
    )
    return {
        "riesz_antisymmetry": anti / fn**2,
        "riesz_isometry": abs(sp.norm(grid, rf, "L2") - fn) / fn,
        "leray_divergence": float(div),
        "leray_idempotence": idem,
        "parseval": abs(phys - fn) / fn,
        "semigroup": semi,
    }


IDENTITY_TOLS = {
    "riesz_antisymmetry": 1e-12,
    "riesz_isometry": 1e-12,
    "leray_divergence": 1e-12,
    "leray_idempotence": 1e-12,
    "parseval": 1e-12,
    "semigroup": 1e-13,
}


def run_identities(grid: Grid, seed: int, trials: int = 100) -> list[CheckReport]:
    k0 = 0.25 * _cutoff_k(grid)
    worst = {k: 0.0 for k in IDENTITY_TOLS}
    for i in range(trials):
        f = random_field(grid, seed + i, k0)
        rng = np.random.default_rng(seed + 10_000 + i)
        v = np.stack([random_field(grid, int(rng.integers(2**31)), k0, mean=0.0) for _ in range(2)])
        for k, err in identity_errors(grid, f, v).items():
            worst[k] = max(worst[k], err)
    return [
        CheckReport(k, trials, worst[k], seed, grid.n, grid.half_period, worst[k] <= IDENTITY_TOLS[k])
        for k in IDENTITY_TOLS
    ]


def run_cordoba(grid: Grid, seed: int, trials: int = 100) -> CheckReport:
    k0 = 0.25 * _cutoff_k(grid)
    worst = math.inf
    for i in range(trials):
        rng = np.random.default_rng(seed + 20_000 + i)
        q = random_field(grid, seed + i, k0, mean=float(rng.normal()) / grid.area)
        worst = min(worst, check_cordoba(grid, q) / cordoba_scale(grid, q))
    return CheckReport("cordoba", trials, worst, seed, grid.n, grid.half_period, worst >= -CORDOBA_TOL)


def _refined_ratio(name: str, coarse: list[float], fine: list[float], seed: int, grid: Grid) -> CheckReport:
    wc, wf = max(coarse), max(fine)
    drift = abs(wf - wc) / max(wc, wf, 1e-300)
    ok = math.isfinite(wc) and math.isfinite(wf) and drift <= REFINE_TOL
    return CheckReport(
        name, len(coarse), wf, seed, grid.n, grid.half_period, ok,
        {"worst_coarse": wc, "worst_fine": wf, "refinement_drift": drift},
    )


def run_weight_commutator(grid: Grid, seed: int, trials: int = 20) -> CheckReport:
    fine = sp.make_grid(2 * grid.n, grid.half_period)
    coarse_r, fine_r = [], []
    for i in range(trials):
        coarse_r.append(check_weight_commutator(grid, random_bump(grid, seed + i)))
        fine_r.append(check_weight_commutator(fine, random_bump(fine, seed + i)))
    return _refined_ratio("weight_commutator", coarse_r, fine_r, seed, grid)


def run_halfinv_commutator(grid: Grid, seed: int, trials: int = 100) -> CheckReport:
    fine = sp.make_grid(2 * grid.n, grid.half_period)
    # keep the whole envelope inside the coarse band so both grids draw alike
    k0 = _cutoff_k(grid) / (ENVELOPE_REACH + 1)
    coarse_r, fine_r = [], []
    for i in range(trials):
        for g, acc in ((grid, coarse_r), (fine, fine_r)):
            u = random_velocity(g, seed + 30_000 + i, k0)
            q = random_field(g, seed + i, k0)
            acc.append(check_halfinv_commutator(g, u, q))
    return _refined_ratio("halfinv_commutator", coarse_r, fine_r, seed, grid)


def run_force_lowmode(grid: Grid, seed: int, trials: int = 20) -> CheckReport:
    fine = sp.make_grid(2 * grid.n, grid.half_period)
    coarse_r, fine_r = [], []
    zero_mode = 0.0
    for i in range(trials):
        q = random_bump(grid, seed + i)
        coarse_r.append(check_force_lowmode(grid, q))
        fine_r.append(check_force_lowmode(fine, random_bump(fine, seed + i)))
        f = leray_force(grid, q)
        scale = max(sp.norm(grid, q, "L2") ** 2, 1e-300)
        zero_mode = max(zero_mode, float(np.max(np.abs(f[:, 0, 0]))) * grid.area / scale)
    rep = _refined_ratio("force_lowmode", coarse_r, fine_r, seed, grid)
    detail = dict(rep.detail or {}, zero_mode=zero_mode)
    return CheckReport(
        rep.name, rep.n_trials, rep.worst, seed, grid.n, grid.half_period,
        rep.passed and zero_mode <= 1e-12, detail,
    )


SUITES = ("identities", "cordoba", "weight_commutator", "halfinv_commutator", "force_lowmode")


def run_suite(name: str, grid: Grid, seed: int, trials: int | None = None) -> list[CheckReport]:
    """Run one named suite, or ``all`` of them."""
    if name == "all":
        out: list[CheckReport] = []
        for s in SUITES:
            out.extend(run_suite(s, grid, seed, trials))
        return out
    kw = {} if trials is None else {"trials": trials}
    if name == "identities":
        return run_identities(grid, seed, **kw)
    if name == "cordoba":
        return [run_cordoba(grid, seed, **kw)]
    if name == "weight_commutator":
        return [run_weight_commutator(grid, seed, **kw)]
    if name == "halfinv_commutator":
        return [run_halfinv_commutator(grid, seed, **kw)]
    if name == "force_lowmode":
        return [run_force_lowmode(grid, seed, **kw)]
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
