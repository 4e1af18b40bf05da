import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac import twodim as td
from coulomb_dirac.errors import ChannelCutTooSmall, ConfigError
from coulomb_dirac.params import HALF_PI
from coulomb_dirac.potentials import PotentialSpec

PROFILE = PotentialSpec.bump(2.0, 1.0, 1.0)


def test_herbst_constant():
    assert td.herbst_k() == pytest.approx(0.2284732905222318, rel=1e-14)


@given(st.floats(0.05, 5.0))
def test_c_nu_is_root(nu):
    c = td.c_nu(nu)
    assert 0 < c < 1
    assert abs(td.f_nu(nu, 1 - c)) <= 1e-9 * max(1.0, nu ** 4 * td.kappa_nu(nu) ** 2)


@given(st.floats(0.0, 5.0))
def test_kappa_nu(nu):
    k = td.kappa_nu(nu)
    assert k * k > nu * nu + 0.25 >= (k - 1) ** 2 or k == 0.5


def test_channels():
    assert td.channels(1.5) == [0.5, -0.5, 1.5, -1.5]


def test_theta_map():
    tm = td.ThetaMap.from_dict({"nu": 0.5, "theta": {"0.5": 1.0}})
    assert tm(0.5) == 1.0 and tm(-0.5) == HALF_PI
    assert td.ThetaMap.from_dict(tm.to_dict()) == tm
    with pytest.raises(ConfigError):
        td.ThetaMap(0.5, {1.5: 0.3})


def _terms(a=1.0, b=(0.3, -0.2), d=0.5, mode=1):
    return td.Potential2D.from_terms([{"profile": PROFILE.to_dict(), "a": a, "b": list(b), "d": d,
                                       "mode": mode}])


def test_channel_potential_entries():
    Q = _terms()
    V = td.channel_potential(Q)
    r = np.array([1.5, 2.0, 2.5])
    f = PROFILE.matrix(r)[:, 0, 0]
    m = V.matrix(r)
    assert np.allclose(m[:, 0, 0], f) and np.allclose(m[:, 1, 1], 0.5 * f)
    assert np.allclose(m[:, 0, 1], -1j * (0.3 - 0.2j) * f)
    assert np.allclose(m[:, 1, 0], np.conj(m[:, 0, 1]))


def test_non_resonant_mode_drops_out():
    V = td.channel_potential(_terms(mode=3))
    assert np.allclose(V.matrix(np.array([2.0]))[:, 0, 1], 0)


def test_angular_decomposition_is_isometric():
    def u(x, y):
        r2 = x * x + y * y
        g = np.exp(-r2)
        return np.stack([g * (1 + x), g * (y - 0.5j * x * y)], axis=-1)

    assert td.decomposition_defect(u, 6.0) < 1e-6


def test_channel_spinor_inverts_decomposition():
    r, wr, phi, _ = td.polar_grid(4.0, 64, 32)
    psi = np.stack([r * np.exp(-r), r ** 2 * np.exp(-r)], axis=-1)
    comp = td.angular_decomposition(td.channel_spinor(psi, 1.5, r, phi), r, phi, 3.5)
    assert np.allclose(comp[1.5], psi)
    assert all(np.allclose(c, 0) for k, c in comp.items() if k != 1.5)


def test_kato_check_accepts_herbst_constant():
    chk = td.kato_check(0.5, packets=6)
    assert chk.min_eigenvalue > 0


def test_cut_below_kappa_nu():
    Q = td.Potential2D.radial(PROFILE)
    with pytest.raises(ChannelCutTooSmall):
        td.analyze_2d(2.0, td.ThetaMap.distinguished(2.0), Q, kappa_cut=0.5)


def test_analyze_reports_negative_spectrum_in_regime_one():
    Q = td.Potential2D.radial(PROFILE)
    rep = td.analyze_2d(0.5, td.ThetaMap.distinguished(0.5), Q)
    assert rep.verdict == td.NEGATIVE_SPECTRUM
    d = rep.to_dict()
    assert d["alpha_c"] == 0.0 and d["channels"]


def test_corollary_integral_of_scalar_profile():
    V = td.channel_potential(td.Potential2D.radial(PROFILE))
    ref = 2 * math.fsum(PROFILE.matrix(np.linspace(1, 3, 20001))[:, 0, 0].real) * (2 / 20000)
    assert td.corollary_integral(V) == pytest.approx(ref, rel=1e-4)
