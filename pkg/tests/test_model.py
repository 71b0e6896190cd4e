import math

import numpy as np
import pytest

from electroconv import spectral as sp
from electroconv.checks import random_field, random_velocity
from electroconv.integrator import step
from electroconv.model import (
    SimState, divergence_error, dissipation, energy, energy_residual, require_divergence_free,
    rhs, rhs_q, rhs_u, zero_state,
)

from conftest import max_abs, physical


def _shear(grid):
    return np.stack([physical(grid, lambda x1, x2: np.sin(x2)), np.zeros(grid.shape, complex)])


def test_rhs_q_hand_expansion(g16):
    q = physical(g16, lambda x1, x2: np.sin(x1))
    s = SimState(g16, 0.0, q, _shear(g16))
    want = physical(g16, lambda x1, x2: -np.sin(x2) * np.cos(x1))
    assert max_abs(rhs_q(s) - want) < 1e-15


def test_rhs_q_zero_velocity_and_mean(g32):
    q = random_field(g32, 1, 4.0, mean=0.5)
    assert max_abs(rhs_q(SimState(g32, 0.0, q, np.zeros((2,) + g32.shape, complex)))) == 0
    u = random_velocity(g32, 2, 4.0)
    assert rhs_q(SimState(g32, 0.0, q, u))[0, 0] == 0


def test_rhs_u_examples(g16):
    shear_only = SimState(g16, 0.0, np.zeros(g16.shape, complex), _shear(g16))
    assert max_abs(rhs_u(shear_only)) < 1e-15
    q = physical(g16, lambda x1, x2: np.cos(x1))
    charge_only = SimState(g16, 0.0, q, np.zeros((2,) + g16.shape, complex))
    assert max_abs(rhs_u(charge_only)) < 1e-15
    nq, nu = rhs(zero_state(g16))
    assert max_abs(nq) == 0 and max_abs(nu) == 0


def test_rhs_matches_individual_terms(g32):
    s = SimState(g32, 0.0, random_field(g32, 3, 4.0, mean=0.2), random_velocity(g32, 4, 4.0))
    nq, nu = rhs(s)
    assert max_abs(nq - rhs_q(s)) < 1e-15
    assert max_abs(nu - rhs_u(s)) < 1e-15
    assert divergence_error(g32, nu) < 1e-12


def test_rhs_rejects_compressible_velocity(g16):
    grad = np.stack([physical(g16, lambda x1, x2: np.cos(x1)), np.zeros(g16.shape, complex)])
    with pytest.raises(ValueError):
        require_divergence_free(g16, grad)
    with pytest.raises(ValueError):
        rhs(SimState(g16, 0.0, np.zeros(g16.shape, complex), grad))


def test_state_shape_validation(g16):
    with pytest.raises(ValueError):
        SimState(g16, 0.0, np.zeros((8, 8), complex), np.zeros((2,) + g16.shape, complex))
    with pytest.raises(ValueError):
        SimState(g16, 0.0, np.zeros(g16.shape, complex), np.zeros(g16.shape, complex))


def test_energy_of_single_modes(g16):
    q = physical(g16, lambda x1, x2: np.cos(2 * x1))
    s = SimState(g16, 0.0, q, _shear(g16))
    # 1/2 * (1/2) * 2 pi^2  +  1/2 * 2 pi^2
    assert energy(s) == pytest.approx(0.5 * math.pi**2 + math.pi**2, rel=1e-14)
    assert dissipation(s) == pytest.approx(2 * math.pi**2 + 2 * math.pi**2, rel=1e-14)


def test_energy_ignores_the_mean(g16):
    q = physical(g16, lambda x1, x2: 3.0 + np.cos(x1))
    s = SimState(g16, 0.0, q, np.zeros((2,) + g16.shape, complex))
    assert energy(s) == pytest.approx(math.pi**2, rel=1e-14)


def test_energy_residual_zero_states(g16):
    assert energy_residual(zero_state(g16, 0.0), zero_state(g16, 0.5)) == 0.0


def test_energy_residual_requires_forward_time(g16):
    with pytest.raises(ValueError):
        energy_residual(zero_state(g16, 1.0), zero_state(g16, 1.0))


def test_energy_residual_linear_pair_is_second_order(g16):
    q = physical(g16, lambda x1, x2: np.cos(x1))
    zero_u = np.zeros((2,) + g16.shape, complex)
    a = SimState(g16, 0.0, q, zero_u)
    res = []
    for dt in (0.1, 0.05):
        b = SimState(g16, dt, math.exp(-dt) * q, zero_u)
        res.append(energy_residual(a, b))
    assert 3.0 <= res[0] / res[1] <= 5.0


def test_energy_residual_nonlinear_ratio():
    g = sp.make_grid(64, 4 * math.pi)
    s0 = SimState(g, 0.0, random_field(g, 5, 1.0, mean=0.01), random_velocity(g, 6, 1.0))
    res = []
    for dt in (0.1, 0.05):
        s1 = step(s0, dt)
        res.append(energy_residual(s0, s1))
    assert 3.0 <= res[0] / res[1] <= 5.0
