"""Frozen reference values against a live mpmath computation and against the package."""

import mpmath as mp
import pytest

import oracles
from coulomb_dirac.acceptance import ORACLES, oracle_deviations


@pytest.fixture(scope="module")
def live():
    return {k: complex(v) for k, v in oracles.table().items()}


def test_frozen_table_matches_live_mpmath(live):
    for key, frozen in ORACLES.items():
        assert abs(live[key] - frozen) <= 1e-15 * abs(frozen), key


def test_two_independent_u_routes_agree(live):
    assert abs(live["kummer_u_nu05_b2_z10i"] - live["kummer_u_mpmath"]) < 1e-25


def test_digamma_coth_identity(live):
    assert abs(live["im_digamma_1_plus_i"] - live["coth_identity"]) < 1e-30


def test_c_jump_closed_form(live):
    assert abs(live["c_jump_beta0"] - live["c_jump_closed"]) < 1e-30


def test_m_series_against_hyp1f1():
    with mp.workdps(30):
        a, b, z = mp.mpc(0.3, 1.1), mp.mpf(1.7), mp.mpc(-1.5, 2.0)
        assert abs(oracles.m_series(a, b, z) - mp.hyp1f1(a, b, z)) < 1e-25


def test_herbst_constant_value(live):
    assert abs(live["herbst_k"].real - 0.22847329052223181) < 1e-16


@pytest.mark.parametrize("nu", ["0.5", "1", "2"])
def test_c_nu_root_solves_quadratic(nu):
    from coulomb_dirac.twodim import f_nu

    b = float(oracles.c_nu_root(nu))
    assert abs(f_nu(float(nu), b)) < 1e-12


def test_package_against_oracles():
    dev = oracle_deviations()
    assert max(dev.values()) <= 1e-12, dev
