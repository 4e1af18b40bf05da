import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac import virtual
from coulomb_dirac.errors import RegimeError
from coulomb_dirac.params import HALF_PI, make_params
from coulomb_dirac.potentials import PotentialSpec
from coulomb_dirac.virtual import LN2, Verdict

REGIME_I = [(0.3, 0.0, 0.7), (0.7, 0.5, 0.3), (0.4, 0.5, 0.0), (1.0, 1.0, HALF_PI)]
V = PotentialSpec.bump(2.0, 1.0, 1.0)


@pytest.mark.parametrize("cell", REGIME_I)
def test_a_theta_solves_zero_energy_equation(cell):
    from coulomb_dirac.solutions import apply_dirac

    p = make_params(*cell)
    r = np.array([0.3, 1.0, 3.0])
    Dv = apply_dirac(p, lambda s: virtual.a_theta_vector(p, s), r)
    assert np.max(np.abs(Dv)) < 1e-6 * np.max(np.abs(virtual.a_theta_vector(p, r)))


def test_outside_regime_one():
    p = make_params(0.4, 0.5, 1.0)
    with pytest.raises(RegimeError):
        virtual.a_theta_vector(p, [1.0])
    rep = virtual.detect_virtual_level(p, V, n_max=16, extend_to_log2=None)
    assert rep.criterion is None


@pytest.mark.parametrize("cell", REGIME_I)
def test_criterion_positive_for_positive_bump(cell):
    crit = virtual.virtual_criterion(make_params(*cell), V)
    assert crit.verdict and crit.a_integral > 0


@given(st.floats(1.0, 60.0))
def test_kinetic_identity(log2_n):
    p = make_params(0.7, 0.5, 0.3)
    sg = virtual.trial_spectral_grid(p, log2_n)
    assert virtual.kinetic_energy(sg, log2_n) == pytest.approx(log2_n * LN2, rel=1e-6)


def test_trial_norm_in_both_representations():
    p = make_params(0.3, 0.0, 0.7)
    n = 8
    sg = virtual.trial_spectral_grid(p, 3.0)
    full = virtual.norm_squared(sg, 3.0)
    assert full == pytest.approx(n * n - n, rel=1e-9)
    # the radial side stops at 10 n^2 and misses a few percent of tail mass
    near, far = virtual.space_norm2(p, n, r_max=2.0 * n * n), virtual.space_norm2(p, n)
    assert near < far < full
    assert far == pytest.approx(full, rel=0.05)


def test_v_form_two_routes_agree():
    p = make_params(0.7, 0.5, 0.3)
    a = virtual.v_form_space(p, V, 6.0)
    b = virtual.v_form_spectral(p, V, 6.0)
    assert a == pytest.approx(b, rel=1e-6)


def test_ladder():
    assert virtual.default_ladder(16) == [1, 2, 3, 4]
    lad = virtual.default_ladder(1024, 100)
    assert lad[:10] == list(range(1, 11)) and lad[-1] == 100 and lad[10:13] == [20.0, 40.0, 80.0]


@pytest.mark.parametrize("cell", REGIME_I[:3])
def test_detects_negative_spectrum(cell):
    rep = virtual.detect_virtual_level(make_params(*cell), V.scaled(0.1))
    assert rep.verdict is Verdict.NEGATIVE_SPECTRUM
    assert rep.table[-1]["q_n"] < 0 <= min(row["q_n"] for row in rep.table[:-1])


def test_zero_potential_is_inconclusive():
    rep = virtual.detect_virtual_level(make_params(0.3, 0.0, 0.7), PotentialSpec.zero(), n_max=8,
                                       extend_to_log2=None)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert [row["q_n"] for row in rep.table] == pytest.approx([k * LN2 for k in (1, 2, 3)])


def test_report_serialises():
    d = virtual.detect_virtual_level(make_params(0.4, 0.5, 0.0), V).to_dict()
    assert d["verdict"] == "NEGATIVE_SPECTRUM" and d["criterion"]["verdict"] is True
    assert math.isfinite(d["q_n"][0]["v_form"])


def test_indicator_potential_free_case():
    p = make_params(0.0, 0.0, 0.0)
    ind = PotentialSpec.from_dict({"kind": "scalar_radial", "pieces": [
        {"type": "power", "height": 1.0, "exponent": 0.0, "r_min": 1.0, "r_max": 2.0}]})
    rep = virtual.detect_virtual_level(p, ind, n_max=1024, extend_to_log2=None)
    assert rep.verdict is Verdict.NEGATIVE_SPECTRUM and rep.first_log2_n <= 10


def test_regime_two_small_coupling_consistent_with_count():
    from coulomb_dirac.counting import count_negative

    p = make_params(0.4, 0.5, HALF_PI)
    W = V.scaled(0.01)
    rep = virtual.detect_virtual_level(p, W, n_max=1024, extend_to_log2=None)
    assert all(row["q_n"] > 0 for row in rep.table)
    assert count_negative(p, W) == 0
