"""Arbitrary-precision reference values, computed with mpmath independently of the package.

Run as a script to print the table that is frozen into ``coulomb_dirac.acceptance``.
"""

import mpmath as mp

DPS = 40


def m_series(a, b, z, terms=200):
    """Plain 200-term power series of M(a, b, z)."""
    s = term = mp.mpc(1)
    for k in range(terms):
        term *= (a + k) * z / ((b + k) * (k + 1))
        s += term
    return s


def u_integer_b(a, n, z, terms=200):
    """U(a, n + 1, z) by the logarithmic limit formula for integer b = n + 1."""
    lead = (-1) ** (n + 1) / (mp.factorial(n) * mp.gamma(a - n))
    s = mp.mpc(0)
    poch_a = mp.mpf(1)
    poch_b = mp.mpf(1)
    zk = mp.mpf(1)
    for k in range(terms):
        s += poch_a / (poch_b * mp.factorial(k)) * zk * (
            mp.log(z) + mp.digamma(a + k) - mp.digamma(1 + k) - mp.digamma(n + k + 1))
        poch_a *= a + k
        poch_b *= n + 1 + k
        zk *= z
    tail = mp.mpc(0)
    for k in range(1, n + 1):
        tail += mp.factorial(k - 1) * mp.rf(1 - a + k, n - k) / mp.factorial(n - k) * z ** (-k)
    return lead * s + tail / mp.gamma(a)


def c_nu_root(nu):
    """1 - C^nu as the positive root of f_nu, by the quadratic formula."""
    nu = mp.mpf(nu)
    k = mp.mpf(1) / 2
    while not k * k > nu * nu + mp.mpf(1) / 4:
        k += 1
    k2 = k * k
    A = (k2 - mp.mpf(1) / 4) ** 2
    B = 2 * (k2 + mp.mpf(1) / 4) * nu ** 2
    C = nu ** 4 - 4 * nu ** 2 * k2
    return (-B + mp.sqrt(B * B - 4 * A * C)) / (2 * A)


def table():
    with mp.workdps(DPS):
        g34, g14 = mp.gamma(mp.mpf(3) / 4), mp.gamma(mp.mpf(1) / 4)
        beta = mp.sqrt(mp.mpf("0.91"))
        nu = mp.mpf("0.3")
        m_val = m_series(1j * nu + beta, 2 * beta, 2j)
        u_val = u_integer_b(0.5j, 1, 10j)
        out = {
            "gamma_3_4": g34,
            "gamma_1_4": g14,
            "herbst_k": 2 * g34 ** 2 / g14 ** 2,
            "im_digamma_1_plus_i": mp.im(mp.digamma(1 + 1j)),
            "coth_identity": mp.pi / 2 * mp.coth(mp.pi) - mp.mpf(1) / 2,
            "kummer_m_nu03_kappa1": m_val,
            "kummer_u_nu05_b2_z10i": u_val,
            "kummer_u_mpmath": mp.hyperu(0.5j, 2, 10j),
            "c_jump_beta0": mp.gamma(1 - 1j) * mp.gamma(1j) * mp.exp(mp.pi),
            "c_jump_closed": -1j * mp.pi * mp.coth(mp.pi) - 1j * mp.pi,
            "one_minus_c_nu_0.5": c_nu_root("0.5"),
            "one_minus_c_nu_1": c_nu_root(1),
            "one_minus_c_nu_2": c_nu_root(2),
        }
    return out


if __name__ == "__main__":
    for k, v in table().items():
        v = mp.mpc(v)
        print(f'    "{k}": complex({mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)}),')
