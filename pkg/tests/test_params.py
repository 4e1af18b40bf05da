import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.errors import DomainError, NotSelfAdjoint
from coulomb_dirac.params import (
    HALF_PI,
    Regime,
    classify_regime,
    compute_beta,
    in_admissible_set,
    make_params,
    table_cell,
)
from strategies import admissible


def test_beta_branches():
    assert compute_beta(0.3, 0.5) == pytest.approx(0.4)
    assert compute_beta(0.5, 0.3) == pytest.approx(0.4j)
    assert compute_beta(0.7, -0.7) == 0


@given(st.floats(0, 3), st.floats(-3, 3))
def test_beta_squares_back(nu, kappa):
    b = compute_beta(nu, kappa)
    assert b.real >= 0 and b.imag >= 0 and b.real * b.imag == 0
    assert abs(b * b - (kappa ** 2 - nu ** 2)) <= 1e-12 * max(1, kappa ** 2, nu ** 2)


@pytest.mark.parametrize("triple,regime,cell", [
    ((0.5, 0.0, 0.7), Regime.I, "Ia1"),
    ((0.7, 0.5, 0.3), Regime.I, "Ia1"),
    ((1.0, 1.0, HALF_PI), Regime.I, "Ia1"),
    ((0.4, 0.5, 0.0), Regime.I, "Ib"),
    ((0.4, 0.5, 1.0), Regime.II, "IIa"),
    ((0.4, 0.5, HALF_PI), Regime.II, "IIa1"),
    ((0.2, 1.5, HALF_PI), Regime.II, "IIa1"),
    ((0.5, 0.5, 0.4), Regime.III, "IIIa"),
])
def test_regime_table(triple, regime, cell):
    p = make_params(*triple)
    assert classify_regime(p) is regime
    assert table_cell(p) == cell


def test_not_self_adjoint():
    with pytest.raises(NotSelfAdjoint):
        make_params(0.2, 1.5, 0.7)
    assert not in_admissible_set(0.2, 1.5, 0.7)
    assert in_admissible_set(0.2, 1.5, HALF_PI)


@pytest.mark.parametrize("bad", [(0.1, 0.5, -0.1), (0.1, 0.5, math.pi), (math.nan, 0.5, 0.0)])
def test_domain(bad):
    with pytest.raises(DomainError):
        make_params(*bad)


def test_theta_snap():
    assert make_params(0.2, 1.5, HALF_PI + 1e-13).theta == HALF_PI


@given(admissible())
def test_every_admissible_triple_has_a_regime(p):
    assert classify_regime(p) in (Regime.I, Regime.II, Regime.III)
    assert p.branch in ("kappa0", "beta0", "minus_kappa", "imag", "real")


@given(admissible())
def test_regime_one_iff_virtual_level_conditions(p):
    b = p.beta
    expect = (p.kappa == 0 or b.imag > 0 or (b == 0 and p.theta == HALF_PI)
              or (0 < b.real < 0.5 and p.theta == 0.0))
    assert (classify_regime(p) is Regime.I) == expect
