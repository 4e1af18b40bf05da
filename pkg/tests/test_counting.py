import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.counting import (
    TAU_MIN,
    _restrict,
    bound_rhs_II,
    bound_rhs_III,
    bs_from_form,
    clr_crossover,
    clr_weight,
    count_from_form,
    count_negative,
    count_report,
    default_basis,
    dense_count,
    dense_spectrum,
    first_eigenvalue_coupling,
    fit_constants,
    layer_cake,
    lt_bound_rhs,
    lt_modified_case,
    lt_sum,
)
from coulomb_dirac.errors import RegimeError
from coulomb_dirac.params import HALF_PI, make_params
from coulomb_dirac.potentials import PotentialSpec

CELL = (0.4, 0.5, 1.0)
V = PotentialSpec.bump(2.0, 1.0, 6.0)


@pytest.fixture(scope="module")
def form():
    p = make_params(*CELL)
    basis = default_basis(p, [V], log_panels=12, panel=1.0)
    lam, vt = _restrict(basis, basis.form_matrix(V), math.inf)
    return p, basis, lam, vt


def test_zero_potential():
    p = make_params(*CELL)
    assert count_negative(p, PotentialSpec.zero()) == 0
    assert lt_sum(p, PotentialSpec.zero(), 1.0) == 0.0
    assert first_eigenvalue_coupling(p, PotentialSpec.zero()) == math.inf


@pytest.mark.parametrize("tau", [1e-3, 1e-2, 0.1, 1.0])
def test_birman_schwinger_equals_dense(form, tau):
    _, _, lam, vt = form
    assert bs_from_form(lam, vt, tau).count_above_one() == dense_count(lam, vt, tau)


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(-4, 0))
def test_count_monotone_in_coupling(form, a1, a2, log_tau):
    _, _, lam, vt = form
    lo, hi = sorted((a1, a2))
    tau = 10.0 ** log_tau
    assert dense_count(lam, lo * vt, tau) <= dense_count(lam, hi * vt, tau)


@given(st.floats(-4, 0), st.floats(-4, 0))
def test_count_monotone_in_tau(form, l1, l2):
    _, _, lam, vt = form
    t_small, t_big = sorted((10.0 ** l1, 10.0 ** l2))
    assert bs_from_form(lam, vt, t_small).count_above_one() >= bs_from_form(lam, vt, t_big).count_above_one()


def test_tau_limit_converges(form):
    _, _, lam, vt = form
    c, trace = count_from_form(lam, vt)
    assert trace.converged and trace.counts[-1] == c
    assert c == dense_count(lam, vt, trace.taus[-1])


def test_first_eigenvalue_coupling(form):
    p, basis, lam, vt = form
    a1 = first_eigenvalue_coupling(p, V, basis=basis)
    assert bs_from_form(lam, 0.99 * a1 * vt, TAU_MIN).count_above_one() == 0
    assert bs_from_form(lam, 1.01 * a1 * vt, TAU_MIN).count_above_one() == 1


@given(st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=6), st.sampled_from([0.5, 1.0, 2.0]))
def test_layer_cake_recovers_eigenvalue_sum(energies, gamma):
    e = np.array(energies)
    count = lambda t: int(np.sum(e > t))
    total, _ = layer_cake(count, gamma, np.geomspace(1e-4, 20.0, 30), rel=1e-9)
    assert total == pytest.approx(np.sum(e ** gamma), rel=1e-7)


def test_lt_sum_matches_dense_spectrum(form):
    p, basis, lam, vt = form
    ev = dense_spectrum(lam, vt)
    ref = np.sum(np.abs(ev[ev < 0]))
    assert lt_sum(p, V, 1.0, basis=basis) == pytest.approx(ref, rel=1e-4)


def test_fit_constants():
    fit = fit_constants([2, 0, 3], [1.0, 5.0, 2.0])
    assert fit.constant == 2.0 and fit.ratios == (2.0, 0.0, 1.5)
    assert fit_constants([1], [0.0]).constant == math.inf


@pytest.mark.parametrize("cell,q", [((0.4, 0.5, 1.0), 1.3), ((0.3, 0.5, 0.7), 1.5), ((0.45, 0.6, 2.5), 1.5)])
def test_clr_weight_continuous(cell, q):
    p = make_params(*cell)
    r0 = clr_crossover(p)
    lo, hi = clr_weight(p, q, np.nextafter(r0, 0)), clr_weight(p, q, np.nextafter(r0, np.inf))
    assert abs(hi - lo) <= 1e-12 * abs(hi)


def test_clr_weight_regime_checks():
    with pytest.raises(RegimeError):
        clr_weight(make_params(0.4, 0.5, 0.0), 1.2, 1.0)
    with pytest.raises(RegimeError):
        clr_weight(make_params(0.4, 0.5, 1.0), 1.7, 1.0)


@given(st.floats(0.1, 10))
def test_bound_integrals_scale(alpha):
    p2, p3 = make_params(0.4, 0.5, HALF_PI), make_params(0.5, 0.5, 0.4)
    q = 1 + p2.beta.real
    assert bound_rhs_II(p2, V.scaled(alpha), q) == pytest.approx(alpha ** q * bound_rhs_II(p2, V, q), rel=1e-10)
    assert lt_bound_rhs(p2, V.scaled(alpha), 1.0) == pytest.approx(alpha ** 2 * lt_bound_rhs(p2, V, 1.0), rel=1e-10)
    assert bound_rhs_III(p3, V.scaled(alpha)) > 0


def test_lt_case_split():
    assert lt_modified_case(make_params(0.4, 0.5, 0.0))
    assert not lt_modified_case(make_params(0.2, 1.5, HALF_PI))


def test_count_report(form):
    p, basis, _, _ = form
    rep = count_report(p, V, constant=10.0, basis=basis)
    assert rep.regime == "II" and rep.margin == rep.bound_value - rep.count
    assert math.isnan(count_report(p, V, basis=basis).bound_value)
