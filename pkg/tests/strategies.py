import math

from hypothesis import strategies as st

from coulomb_dirac.params import HALF_PI, compute_beta, make_params


def _magnitude(lo, hi):
    # exact zero or a value of order one; tiny nonzero couplings are degenerate
    return st.one_of(st.just(0.0), st.floats(lo, hi).filter(lambda x: abs(x) >= 1e-2))


def _beta_ok(n, k):
    b = abs(compute_beta(n, k))
    return b == 0 or b >= 1e-2


@st.composite
def admissible(draw, nu=(0.0, 2.0), kappa=(-2.0, 2.0)):
    """Admissible triples; theta is forced to pi/2 where beta >= 1/2."""
    n = draw(_magnitude(*nu))
    k = draw(_magnitude(*kappa).filter(lambda k: _beta_ok(n, k)))
    th = draw(st.one_of(st.just(0.0), st.just(HALF_PI), st.floats(0.0, math.pi * 0.999)))
    b = compute_beta(n, k)
    if k != 0 and b.imag == 0 and b.real >= 0.5:
        th = HALF_PI
    return make_params(n, k, th)
