import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.errors import DomainError
from coulomb_dirac.params import HALF_PI, make_params
from coulomb_dirac.solutions import (
    WRONSKIAN_POINTS,
    apply_dirac,
    bc_coeffs,
    connection_coeffs,
    ode_residual,
    phi_infinity,
    phi_m,
    phi_u,
    phi_zero,
    wronskian,
    wronskian_good,
    wronskian_mu,
    wronskian_sweep,
    zero_asymptotics,
)
from strategies import admissible

BRANCH_CELLS = [(0.5, 0.0, 0.7), (1.0, 1.0, HALF_PI), (0.0, -0.3, 1.0), (0.7, 0.5, 0.3),
                (0.4, 0.5, 1.0), (0.3, 1.2, HALF_PI), (0.2, 2.5, HALF_PI)]


def test_wronskian_sweep_matches_closed_form():
    rows = wronskian_sweep()
    assert len(rows) == len(WRONSKIAN_POINTS)
    assert {r.branch for r in rows} == {"kappa0", "beta0", "minus_kappa", "imag", "real"}
    for row in rows:
        assert row.rel_err <= 1e-10, row
        assert row.rel_spread <= 1e-10, row


@given(admissible(), st.floats(0.05, 20), st.floats(-3, 3))
def test_wronskian_constant_in_r(p, r, phase):
    lam = np.exp(1j * phase)
    x = lam * np.array([r, 2 * r])
    if np.any((x.real == 0) & (x.imag >= 0)):
        return
    pm, pu = phi_m(p, x), phi_u(p, x)
    w = wronskian(pm, pu)
    ref = wronskian_mu(p)
    # off the real axis one solution grows like exp(|Im x|): cancellation costs eps*|pm|*|pu|
    cond = 64 * np.finfo(float).eps * np.linalg.norm(pm, axis=-1) * np.linalg.norm(pu, axis=-1)
    assert np.all(np.abs(w - ref) <= 1e-8 * abs(ref) + cond)


@pytest.mark.parametrize("cell", BRANCH_CELLS)
@pytest.mark.parametrize("family", ["M", "U", "zero"])
def test_ode_residual(cell, family):
    p = make_params(*cell)
    lam = 1.3 + 0.4j
    fn = {"M": lambda r: phi_m(p, lam * r), "U": lambda r: phi_u(p, lam * r),
          "zero": lambda r: phi_zero(p, lam, r)}[family]
    r = np.array([0.3, 1.0, 4.0])
    assert np.max(ode_residual(p, lam, fn, r)) < 1e-6


@pytest.mark.parametrize("cell", BRANCH_CELLS)
def test_phi_infinity_decays(cell):
    p = make_params(*cell)
    lam = 0.8 + 0.5j
    r = np.array([10.0, 20.0, 40.0])
    v = np.linalg.norm(phi_infinity(p, lam, r), axis=-1)
    assert v[2] < v[1] < v[0]
    assert np.max(ode_residual(p, lam, lambda s: phi_infinity(p, lam, s), r)) < 1e-6


@pytest.mark.parametrize("cell", BRANCH_CELLS[1:])
def test_direct_and_recessive_agree(cell):
    p = make_params(*cell)
    lam = 1.0 + 0.7j
    r = np.array([0.5, 1.5, 3.0])
    a = phi_infinity(p, lam, r, method="direct")
    b = phi_infinity(p, lam, r, method="recessive")
    assert np.allclose(a, b, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("cell", BRANCH_CELLS[1:])
def test_good_wronskian(cell):
    p = make_params(*cell)
    lam = 0.9 + 0.6j
    r = np.array([0.7])
    w = wronskian(phi_infinity(p, lam, r), phi_zero(p, lam, r))[0]
    assert abs(w - wronskian_good(p, lam)) <= 1e-9 * max(1, abs(w))


@pytest.mark.parametrize("cell", BRANCH_CELLS)
def test_zero_asymptotics_leading_terms(cell):
    p = make_params(*cell)
    za = zero_asymptotics(p, np.array([1e-6]))
    r = np.array([1e-6])
    for val, lead, order in ((phi_m(p, r), za.lead_m, za.order_m), (phi_u(p, r), za.lead_u, za.order_u)):
        rem = np.linalg.norm(val - lead) / max(np.linalg.norm(lead), 1e-300)
        assert rem < 1e-3


def test_connection_coefficients_real_beta_symmetry():
    cc = connection_coeffs(make_params(0.4, 0.5, 1.0))
    assert np.isfinite([cc.c_plus_pos, cc.c_plus_neg, cc.c_minus]).all()


def test_bc_coeffs_theta_half_pi_is_m_only():
    p = make_params(0.2, 1.5, HALF_PI)
    c = bc_coeffs(p, 1.0)
    assert abs(c.a) < 1e-14 * max(1, abs(c.b))


def test_cut_rejected():
    p = make_params(0.4, 0.5, 1.0)
    with pytest.raises(DomainError):
        phi_m(p, 2j)
    with pytest.raises(DomainError):
        phi_infinity(p, 1.0, [1.0])


def test_apply_dirac_matches_eigenvalue():
    p = make_params(0.4, 0.5, 1.0)
    lam = 1.1 - 0.3j
    fn = lambda r: phi_zero(p, lam, r)
    r = np.array([0.5, 2.0])
    assert np.allclose(apply_dirac(p, fn, r), lam * fn(r), rtol=1e-6)
