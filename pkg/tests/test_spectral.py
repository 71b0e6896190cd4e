import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from electroconv import spectral as sp
from electroconv.checks import random_field, random_velocity

from conftest import max_abs, physical


def test_grid_spacing_and_wavenumbers():
    g = sp.make_grid(16, math.pi)
    assert g.spacing == pytest.approx(2 * math.pi / 16)
    assert g.dk == pytest.approx(1.0)
    big = sp.make_grid(512, 40 * math.pi)
    assert big.dk == pytest.approx(1 / 40)


@pytest.mark.parametrize("n", [15, 8, 0, 2**15])
def test_grid_rejects_bad_n(n):
    with pytest.raises(ValueError):
        sp.make_grid(n, math.pi)


def test_grid_rejects_bad_half_period():
    with pytest.raises(ValueError):
        sp.make_grid(16, -1.0)


def test_forward_single_cosine(g16):
    c = physical(g16, lambda x1, x2: np.cos(x1))
    assert c[g16.index((1, 0))] == pytest.approx(0.5, abs=1e-15)
    assert c[g16.index((-1, 0))] == pytest.approx(0.5, abs=1e-15)
    c[g16.index((1, 0))] = c[g16.index((-1, 0))] = 0
    assert max_abs(c) < 1e-15


def test_round_trip(g32):
    rng = np.random.default_rng(1)
    f = rng.normal(size=g32.shape)
    back = sp.inverse(g32, sp.forward(g32, f))
    assert max_abs(back - f) <= 1e-12 * max_abs(f)
    assert np.array_equal(sp.transform(g32, f, "forward"), sp.forward(g32, f))
    with pytest.raises(ValueError):
        sp.transform(g32, f, "sideways")


def test_l2_norm_of_cosine_both_ways(g16):
    c = physical(g16, lambda x1, x2: np.cos(x1))
    spectral = sp.norm(g16, c, "L2")
    x = sp.inverse(g16, c)
    direct = math.sqrt(g16.spacing**2 * np.sum(x**2))
    assert spectral == pytest.approx(math.pi * math.sqrt(2), rel=1e-14)
    assert direct == pytest.approx(math.pi * math.sqrt(2), rel=1e-14)


def test_fractional_laplacian_examples(g16):
    c1 = physical(g16, lambda x1, x2: np.cos(x1))
    assert max_abs(sp.fractional_laplacian(g16, c1, 1.0) - c1) < 1e-15
    c2 = physical(g16, lambda x1, x2: np.cos(2 * x1))
    assert max_abs(sp.fractional_laplacian(g16, c2, -0.5) - c2 / math.sqrt(2)) < 1e-15
    mix = physical(g16, lambda x1, x2: np.cos(x1) + np.cos(2 * x2))
    want = physical(g16, lambda x1, x2: np.cos(x1) + 4 * np.cos(2 * x2))
    assert max_abs(sp.fractional_laplacian(g16, mix, 2.0) - want) < 1e-14


def test_negative_power_needs_mean_free(g16):
    c = physical(g16, lambda x1, x2: 1 + np.cos(x1))
    with pytest.raises(ValueError):
        sp.fractional_laplacian(g16, c, -0.5)


def test_riesz_examples(g16):
    c = physical(g16, lambda x1, x2: np.cos(x1))
    r = sp.riesz(g16, c)
    want = physical(g16, lambda x1, x2: -np.sin(x1))
    assert max_abs(r[0] - want) < 1e-15
    assert max_abs(r[1]) < 1e-15


def test_riesz_antisymmetric_on_random_fields(g32):
    for seed in range(5):
        f = random_field(g32, seed, 4.0)
        r = sp.riesz(g32, f)
        val = sp.inner(g32, f, r[0]) + sp.inner(g32, f, r[1])
        assert abs(sp.inner(g32, f, r[0])) <= 1e-12 * sp.norm(g32, f, "L2") ** 2
        assert abs(val) <= 2e-12 * sp.norm(g32, f, "L2") ** 2


def test_leray_examples(g16):
    grad = np.stack([physical(g16, lambda x1, x2: np.cos(x1)), np.zeros(g16.shape, complex)])
    assert max_abs(sp.leray_project(g16, grad)) < 1e-15
    shear = np.stack([physical(g16, lambda x1, x2: np.sin(x2)), np.zeros(g16.shape, complex)])
    assert max_abs(sp.leray_project(g16, shear) - shear) < 1e-15


def test_leray_idempotent_and_divergence_free(g32):
    v = np.stack([random_field(g32, 3, 4.0), random_field(g32, 4, 4.0)])
    p = sp.leray_project(g32, v)
    assert max_abs(sp.leray_project(g32, p) - p) <= 1e-12 * max_abs(p)
    assert sp.norm(g32, sp.divergence(g32, p), "L2") <= 1e-12 * sp.norm(g32, p, "Hs", s=1.0)


def test_differentiate_examples(g16):
    s = physical(g16, lambda x1, x2: np.sin(x1))
    grad = sp.differentiate(g16, s, "gradient")
    assert max_abs(grad[0] - physical(g16, lambda x1, x2: np.cos(x1))) < 1e-15
    assert max_abs(grad[1]) < 1e-15
    shear = np.stack([physical(g16, lambda x1, x2: np.sin(x2)), np.zeros(g16.shape, complex)])
    assert max_abs(sp.differentiate(g16, shear, "divergence")) < 1e-15


def test_divergence_of_gradient_is_minus_laplacian(g32):
    f = random_field(g32, 7, 4.0, mean=0.3)
    lhs = sp.divergence(g32, sp.gradient(g32, f))
    assert max_abs(lhs + sp.fractional_laplacian(g32, f, 2.0)) <= 1e-12 * max_abs(lhs)


def test_dealias_cutoff(g16):
    f = np.zeros(g16.shape, complex)
    f[g16.index((6, 0))] = 1
    f[g16.index((5, 0))] = 1
    d = sp.dealias(g16, f)
    assert d[g16.index((6, 0))] == 0
    assert d[g16.index((5, 0))] == 1
    assert np.array_equal(sp.dealias(g16, d), d)


def test_norm_examples(g16):
    zero = np.zeros(g16.shape, complex)
    for kind in sp.NORM_KINDS:
        assert sp.norm(g16, zero, kind, s=1.0 if kind == "Hs" else None) == 0.0
    c = physical(g16, lambda x1, x2: np.cos(2 * x1))
    assert sp.norm(g16, c, "Hs", s=-0.5) == pytest.approx(math.pi, rel=1e-14)
    assert sp.norm(g16, c, "Linf") == pytest.approx(1.0, rel=1e-14)
    # ||cos||_4^4 = (3/8) * (2 pi)^2
    assert sp.norm(g16, c, "L4") ** 4 == pytest.approx(1.5 * math.pi**2, rel=1e-13)
    with pytest.raises(ValueError):
        sp.norm(g16, c, "L3")


def test_non_finite_input_rejected(g16):
    f = np.zeros(g16.shape)
    f[0, 0] = np.nan
    with pytest.raises(ValueError):
        sp.forward(g16, f)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), alpha=st.floats(-1.0, 2.0), beta=st.floats(-1.0, 2.0))
def test_fractional_powers_compose(seed, alpha, beta):
    g = sp.make_grid(32, math.pi)
    f = random_field(g, seed, 4.0)
    lhs = sp.fractional_laplacian(g, sp.fractional_laplacian(g, f, alpha), beta)
    rhs = sp.fractional_laplacian(g, f, alpha + beta) if -2 <= alpha + beta <= 4 else lhs
    assert max_abs(lhs - rhs) <= 1e-12 * max(max_abs(rhs), 1e-300)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_parseval(seed):
    g = sp.make_grid(32, 2.0)
    f = random_field(g, seed, 3.0, mean=1.0)
    x = sp.inverse(g, f)
    direct = math.sqrt(g.spacing**2 * np.sum(x**2))
    assert sp.norm(g, f, "L2") == pytest.approx(direct, rel=1e-12)


def test_random_velocity_is_divergence_free(g32):
    u = random_velocity(g32, 5, 4.0)
    assert sp.norm(g32, sp.divergence(g32, u), "L2") <= 1e-12 * sp.norm(g32, u, "Hs", s=1.0)
