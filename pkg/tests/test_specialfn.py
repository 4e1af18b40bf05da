import cmath

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_dirac.specialfn import (
    EULER_GAMMA,
    asymptotic_radius,
    digamma_c,
    gamma_c,
    kummer_m,
    kummer_m_derivative,
    kummer_m_regimes,
    kummer_u,
    kummer_u_derivative,
    kummer_u_regimes,
    rgamma_c,
)

real = st.floats(-2.0, 2.0)
pos = st.floats(0.2, 3.0)


def _close(x, y, tol):
    return abs(complex(x) - complex(y)) <= tol * max(1.0, abs(complex(y)))


def test_gamma_known_values():
    assert _close(gamma_c(0.5), np.sqrt(np.pi), 1e-14)
    assert _close(gamma_c(5), 24.0, 1e-15)
    assert _close(digamma_c(1), -EULER_GAMMA, 1e-15)


def test_rgamma_vanishes_at_poles():
    assert abs(rgamma_c(-3)) == 0.0


@given(real, real)
def test_gamma_reflection(x, y):
    z = complex(x, y)
    if min(abs(z - round(z.real)), 1) < 1e-3:
        return
    lhs = gamma_c(z) * gamma_c(1 - z)
    rhs = np.pi / cmath.sin(np.pi * z)
    assert _close(lhs, rhs, 1e-11)


@given(real, real)
def test_digamma_recurrence(x, y):
    z = complex(x, y)
    if abs(z - round(z.real)) < 1e-2:
        return
    assert _close(digamma_c(z + 1) - digamma_c(z), 1 / z, 1e-11)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), pos, st.floats(-8, 8), st.floats(-8, 8))
def test_kummer_m_against_mpmath(ar, ai, b, zr, zi):
    a, z = complex(ar, ai), complex(zr, zi)
    ref = complex(mp.hyp1f1(a, b, z))
    assert _close(kummer_m(a, b, z), ref, 1e-10)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.1, 2.9), st.floats(0.3, 20), st.floats(-20, 20))
def test_kummer_u_against_mpmath(ar, ai, b, zr, zi):
    a, z = complex(ar, ai), complex(zr, zi)
    ref = complex(mp.hyperu(a, b, z))
    assert _close(kummer_u(a, b, z), ref, 1e-9)


@given(st.floats(-1, 1), st.floats(-1, 1), pos, st.floats(-5, 5), st.floats(-5, 5))
def test_kummer_transformation(ar, ai, b, zr, zi):
    a, z = complex(ar, ai), complex(zr, zi)
    lhs = kummer_m(a, b, z)
    rhs = cmath.exp(z) * kummer_m(b - a, b, -z)
    assert _close(lhs, rhs, 1e-10)


def test_m_derivative_contiguous():
    a, b, z = 0.3 + 0.7j, 1.6, 2.0 - 1.0j
    assert _close(kummer_m_derivative(a, b, z), a / b * kummer_m(a + 1, b + 1, z), 1e-12)


def test_u_derivative_contiguous():
    a, b, z = 0.3 + 0.7j, 1.6, 2.0 - 1.0j
    assert _close(kummer_u_derivative(a, b, z), -a * kummer_u(a + 1, b + 1, z), 1e-12)


def test_integer_b_u_matches_mpmath():
    for b in (1, 2, 3):
        z = 0.7 + 2.0j
        assert _close(kummer_u(0.5j, b, z), complex(mp.hyperu(0.5j, b, z)), 1e-12)


def test_vectorised_shapes():
    z = np.linspace(0.1, 5, 7) * 1j
    assert np.shape(kummer_m(0.5, 1.5, z)) == (7,)
    assert np.shape(kummer_u(0.5, 1.5, z)) == (7,)


@pytest.mark.parametrize("a,b", [(0.3j + 0.95, 1.9), (0.5j, 2.0), (1.0 - 0.4j, 0.7)])
def test_regimes_agree_where_valid(a, b):
    z = np.array([0.5j, 2.0 + 1j, 8j, 60j, -50.0 + 20j])
    for regimes in (kummer_m_regimes(a, b, z), kummer_u_regimes(a, b, z)):
        vals = [v for v in regimes.values()]
        for i in range(z.size):
            col = [v[i] for v in vals if np.isfinite(v[i])]
            ref = col[0]
            assert all(abs(c - ref) <= 1e-8 * max(1, abs(ref)) for c in col)


def test_asymptotic_radius_positive():
    assert asymptotic_radius(0.5j, 2.0) > 10
