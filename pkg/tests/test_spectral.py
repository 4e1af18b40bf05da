import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.acceptance import _resolvent_residual
from coulomb_dirac.errors import DomainError, NearZeroLambda
from coulomb_dirac.grids import RadialGrid, SpectralGrid
from coulomb_dirac.params import HALF_PI, make_params
from coulomb_dirac.spectral import (
    FOUR_PI_INV,
    BumpSpinor,
    SpectralTransform,
    apply_resolvent,
    green_kernel,
    no_zero_margin,
    projection_kernel_E,
    smooth_bump,
    spectral_density,
    stone_jump_extrapolated,
    transform_defects,
)
from strategies import admissible

CELLS = [(0.5, 0.0, 0.7), (1.0, 1.0, HALF_PI), (0.7, 0.5, 0.3), (0.4, 0.5, 1.0),
         (0.5, 0.5, 0.4), (0.0, -0.3, 0.6), (0.2, 1.5, HALF_PI)]


def test_free_density_is_constant():
    p = make_params(0.5, 0.0, 0.7)
    lam = np.array([-3.0, -1e-3, 1e-3, 7.0])
    assert np.allclose(spectral_density(p, lam), FOUR_PI_INV, rtol=0, atol=1e-15)


@given(admissible(), st.floats(-6, 6), st.sampled_from([-1.0, 1.0]))
def test_density_positive(p, log_lam, sign):
    lam = sign * 10.0 ** log_lam
    m, im = spectral_density(p, lam, return_imag=True)
    assert m > 0
    assert abs(im) <= 1e-8 * m
    assert no_zero_margin(p, lam) > 0


def test_density_rejects_zero():
    with pytest.raises(NearZeroLambda):
        spectral_density(make_params(0.4, 0.5, 1.0), 0.0)
    with pytest.raises(DomainError):
        green_kernel(make_params(0.4, 0.5, 1.0), 2.0, 1.0, 1.0)


@pytest.mark.parametrize("cell", CELLS)
def test_green_symmetry(cell):
    p = make_params(*cell)
    lam = 0.7 + 0.9j
    G = green_kernel(p, lam, 0.8, 2.1)
    Gt = green_kernel(p, lam, 2.1, 0.8)
    assert np.allclose(G, Gt.T, atol=1e-13)


@pytest.mark.parametrize("cell", CELLS[:4])
def test_stone_formula(cell):
    p = make_params(*cell)
    lam, x, y = 1.3, 0.9, 1.7
    jump = stone_jump_extrapolated(p, lam, x, y)
    ref = projection_kernel_E(p, lam, x, y)
    assert np.max(np.abs(jump - ref)) <= 1e-6 * max(1, np.max(np.abs(ref)))


@pytest.mark.parametrize("cell", CELLS[1:4])
def test_resolvent_solves_equation(cell):
    p = make_params(*cell)
    r = np.linspace(0.05, 8.0, 4001)
    f = np.stack([smooth_bump(r, 1.0, 3.0), 0.5 * smooth_bump(r, 1.5, 4.0)], axis=-1)
    assert _resolvent_residual(p, 0.4 + 1.1j, r, f) < 1e-6


def test_resolvent_of_zero_is_zero():
    p = make_params(0.4, 0.5, 1.0)
    r = np.linspace(0.1, 5, 101)
    assert np.all(apply_resolvent(p, 1j - 0.5, r, np.zeros((101, 2))) == 0)


@pytest.mark.parametrize("cell", [(0.4, 0.5, 1.0), (0.5, 0.0, 0.7)])
def test_coarse_transform_is_nearly_unitary(cell):
    p = make_params(*cell)
    sg = SpectralGrid.symmetric(1e-4, 12.5, panels=512, order=2)
    fn = BumpSpinor(0.5, 3.0, 0.4, 0.3)
    rg = RadialGrid.gauss_interval(0.5, 3.0, panel=math.pi / 50, order=2)
    T = SpectralTransform.build(p, rg, sg)
    d = transform_defects(T, fn)
    assert d["parseval_defect"] < 5e-3
    assert d["diag_defect"] < 5e-3


def test_transform_is_linear():
    p = make_params(0.7, 0.5, 0.3)
    sg = SpectralGrid.symmetric(1e-3, 5.0, panels=64, order=2)
    rg = RadialGrid.gauss_interval(0.5, 3.0, panel=0.2, order=4)
    T = SpectralTransform.build(p, rg, sg)
    f = BumpSpinor(0.5, 3.0, 0.2)(rg.r)
    g = BumpSpinor(0.5, 3.0, 1.1, 0.3)(rg.r)
    assert np.allclose(T.forward(2 * f - 3j * g), 2 * T.forward(f) - 3j * T.forward(g))
