"""Eigensolutions of ``d f = lambda f`` built from Kummer functions.

All solution routines take an argument ``x = lambda * r`` (scalar or array,
complex allowed) and return arrays of shape ``x.shape + (2,)``.  Arguments
on the closed positive imaginary axis are rejected; powers of ``x`` follow
the branch ``arg x in (-3pi/2, pi/2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, KappaZero
from .params import OperatorParams
from .specialfn import (
    EULER_GAMMA,
    branch_log,
    branch_power,
    digamma_c,
    gamma_c,
    kummer_m_pair,
    kummer_u_pair,
)

BETA_HALF_GAP = 1e-6
DIRECT_LIMIT = 3.0


@dataclass(frozen=True)
class ConnectionCoeffs:
    c_plus_pos: complex
    c_plus_neg: complex
    c_minus: complex


@dataclass(frozen=True)
class BCCoeffs:
    a: complex
    b: complex


def _check_x(x):
    x = np.asarray(x, dtype=complex)
    bad = (x.real == 0) & (x.imag >= 0)
    if np.any(bad):
        raise DomainError("argument lies on the cut i*[0, inf)")
    return x


def _vec(c1, c2):
    return np.stack(np.broadcast_arrays(np.asarray(c1, complex), np.asarray(c2, complex)), axis=-1)


def _check_beta_gap(p: OperatorParams):
    if p.beta_pos and 0.5 - BETA_HALF_GAP < p.beta.real < 0.5:
        raise DomainError("beta within 1e-6 below 1/2 is excluded; use beta = 1/2 exactly")


# ---------------------------------------------------------------------------
# Phi_M and the auxiliary Phi_U tilde


def _kummer_parts(p: OperatorParams, x, kind):
    """Scaled Kummer pieces ``exp(-i x) K(a, b, 2 i x)`` for the current branch."""
    z = 2j * x
    nu, beta = p.nu, p.beta
    if p.branch == "beta0":
        a, b = 1 + 1j * nu, 2.0
    elif p.branch == "minus_kappa":
        a, b = beta, 2 * beta
    else:
        a, b = 1j * nu + beta, 2 * beta
    pair = kummer_m_pair if kind == "M" else kummer_u_pair
    return pair(a, b, z, scaled=True)


def phi_m(p: OperatorParams, x):
    """The solution regular at the origin, evaluated at ``x = lambda r``."""
    x = _check_x(x)
    nu, kap, beta = p.nu, p.kappa, p.beta
    br = p.branch
    if br == "kappa0":
        ph = branch_power(x, -1j * nu) * np.exp(-1j * x)
        return _vec(ph, -1j * ph)
    k1, k2 = _kummer_parts(p, x, "M")
    if br == "beta0":
        c = (kap + 1j * nu) * x
        first = _vec(c * k1 - nu * k1, -1j * c * k1 + kap * k1)
        second = (nu - 1j) * x * k2
        return first + _vec(nu * second, -kap * second)
    xb = np.asarray(branch_power(x, beta))
    if br == "minus_kappa":
        return beta * xb[..., None] * _vec(1j * k1 - 1j * k2, k1)
    t1 = beta * (kap + beta + 1j * nu) * k1
    t2 = (nu - 1j * beta) * k2
    return xb[..., None] * _vec(t1 + nu * t2, -1j * t1 - (kap + beta) * t2)


def phi_u_tilde(p: OperatorParams, x):
    """The auxiliary solution built from ``U`` (not defined for kappa = 0)."""
    x = _check_x(x)
    nu, kap, beta = p.nu, p.kappa, p.beta
    br = p.branch
    if br == "kappa0":
        raise KappaZero("no U-type auxiliary solution for kappa = 0")
    k1, k2 = _kummer_parts(p, x, "U")
    if br == "beta0":
        c = (kap + 1j * nu) * x
        first = _vec(c * k1 - nu * k1, -1j * c * k1 + kap * k1)
        second = 2 * (1j - nu) * x * k2
        return first + _vec(nu * second, -kap * second)
    xb = np.asarray(branch_power(x, beta))
    if br == "minus_kappa":
        return xb[..., None] * _vec(1j * k1 + 2j * beta * k2, k1)
    t1 = (kap + beta + 1j * nu) * k1
    t2 = 2 * (1j * beta - nu) * k2
    return xb[..., None] * _vec(t1 + nu * t2, -1j * t1 - (kap + beta) * t2)


def _beta0_shift(nu: float) -> complex:
    """``ln 2 + 2 gamma_E + psi(1 + i nu) + i pi/2 + i/(2 nu)``."""
    return (math.log(2.0) + 2 * EULER_GAMMA + complex(digamma_c(1 + 1j * nu))
            + 0.5j * math.pi + 0.5j / nu)


def u_recombination(p: OperatorParams):
    """``(P, Q)`` with ``Phi_U = P * Phi_U_tilde + Q * Phi_M`` (kappa != 0)."""
    nu, kap, beta = p.nu, p.kappa, p.beta
    br = p.branch
    if br == "kappa0":
        raise KappaZero("kappa = 0 has closed-form Phi_U")
    if br == "beta0":
        return complex(gamma_c(1j * nu)), -_beta0_shift(nu)
    pref = (-(2 ** (2 * beta - 1)) * 1j * np.exp(1j * math.pi * beta)
            * complex(gamma_c(beta + 1j * nu)) / complex(gamma_c(2 * beta)))
    if br == "imag":
        pref = pref * kap * (kap - beta) / nu
    if p.beta_pos and p.beta.real >= 0.5:
        return complex(pref), 0j
    mix = 2 * complex(gamma_c(-2 * beta)) / complex(gamma_c(1 - beta + 1j * nu))
    return complex(pref), complex(pref * mix)


def phi_u(p: OperatorParams, x):
    """The second solution, normalised by its behaviour at the origin."""
    x = _check_x(x)
    if p.branch == "kappa0":
        ph = branch_power(x, 1j * p.nu) * np.exp(1j * x)
        return _vec(ph, 1j * ph)
    _check_beta_gap(p)
    P, Q = u_recombination(p)
    out = P * phi_u_tilde(p, x)
    if Q != 0:
        out = out + Q * phi_m(p, x)
    return out


@dataclass(frozen=True)
class ZeroAsymptotics:
    """Leading terms of ``Phi_M`` and ``Phi_U`` at the origin and the order of the remainders.

    A remainder of order ``r^e ln r`` is flagged by ``*_log``.
    """

    lead_m: np.ndarray
    order_m: float
    lead_u: np.ndarray
    order_u: float
    log_u: bool


def zero_asymptotics(p: OperatorParams, r) -> ZeroAsymptotics:
    r = np.asarray(r, dtype=float)
    nu, kap, beta = p.nu, p.kappa, p.beta
    br = p.branch
    col = lambda v, s: np.asarray(s, complex)[..., None] * np.asarray(v, complex)
    if br == "kappa0":
        ph = np.exp(-1j * nu * np.log(r))
        return ZeroAsymptotics(col([1, -1j], ph), 1.0, col([1, 1j], np.conj(ph)), 1.0, False)
    if br == "beta0":
        ln = np.log(r)
        lead_u = col([-nu, kap], ln) - col([nu, kap], np.full_like(r, 1 / (2 * kap)))
        return ZeroAsymptotics(col([-nu, kap], np.ones_like(r)), 1.0, lead_u, 1.0, True)
    if br == "imag":
        rb = np.exp(beta * np.log(r))
        return ZeroAsymptotics(col([kap + beta, -nu], kap * rb), 1.0,
                               col([kap - beta, -nu], kap / rb), 1.0, False)
    b = beta.real
    rb = r ** b
    half = abs(b - 0.5) < 1e-9
    if br == "minus_kappa":
        lead_m, lead_u = col([0, 1], b * rb), col([1, 0], 1 / rb)
    else:
        lead_m, lead_u = col([kap + b, -nu], kap * rb), col([nu, -kap - b], 1 / rb)
    return ZeroAsymptotics(lead_m, 1 + b, lead_u, 1 - b, half)


# ---------------------------------------------------------------------------
# Connection coefficients, boundary coefficients, Wronskians


def connection_coeffs(p: OperatorParams) -> ConnectionCoeffs:
    """Sector constants ``c_{+,+}``, ``c_{+,-}``, ``c_-``."""
    if p.kappa_zero:
        raise KappaZero("connection coefficients are not defined for kappa = 0")
    _check_beta_gap(p)
    nu, kap, beta = p.nu, p.kappa, p.beta
    pi = math.pi
    if p.beta_zero:
        shift = _beta0_shift(nu)
        g = complex(gamma_c(1 - 1j * nu)) * complex(gamma_c(1j * nu))
        return ConnectionCoeffs(g * math.exp(pi * nu) + shift, g * math.exp(-pi * nu) + shift, shift)
    gbn = complex(gamma_c(beta + 1j * nu))
    g2b = complex(gamma_c(2 * beta))
    if p.beta_imag:
        pref = 1j * kap * (kap - beta) * 2 ** (2 * beta - 1) * gbn * np.exp(1j * pi * beta) / (nu * g2b)
        tail = 2 * complex(gamma_c(-2 * beta)) / complex(gamma_c(1 - beta + 1j * nu))
        gmn = complex(gamma_c(beta - 1j * nu))

        def cp(s):
            return pref * (gmn * np.exp(s * pi * nu - s * 1j * pi * beta) / (beta * g2b) + tail)

        return ConnectionCoeffs(complex(cp(1)), complex(cp(-1)), complex(pref * tail))
    b = beta.real
    base = 1j * 2 ** (2 * b - 1) * abs(gbn) ** 2 / (b * g2b.real ** 2)

    def first(s):
        return base * math.exp(s * pi * nu) * np.exp((1 - s) * 1j * pi * b)

    if b >= 0.5:
        return ConnectionCoeffs(complex(first(1)), complex(first(-1)), 0j)
    cm = (1j * 2 ** (2 * b) * gbn * np.exp(1j * pi * b) * complex(gamma_c(-2 * b))
          / (g2b * complex(gamma_c(1 - b + 1j * nu))))
    return ConnectionCoeffs(complex(first(1) + cm), complex(first(-1) + cm), complex(cm))


def c_of_lambda(p: OperatorParams, lam: complex) -> complex:
    """``c(lambda)`` for lambda off the real line and off i[0, inf)."""
    lam = complex(lam)
    if lam.imag == 0 or (lam.real == 0 and lam.imag > 0):
        raise DomainError("c(lambda) needs lambda off R and off i[0, inf)")
    cc = connection_coeffs(p)
    if lam.imag < 0:
        return cc.c_minus
    return cc.c_plus_pos if lam.real > 0 else cc.c_plus_neg


def boundary_values_c(p: OperatorParams, lam: float):
    """``(c(lambda + i0), c(lambda - i0))`` for real non-zero lambda."""
    cc = connection_coeffs(p)
    return (cc.c_plus_pos if lam > 0 else cc.c_plus_neg), cc.c_minus


def bc_coeffs(p: OperatorParams, lam) -> BCCoeffs:
    """Coefficients ``a``, ``b`` of the boundary-adapted solution."""
    lam = complex(lam)
    if lam == 0 or (lam.real == 0 and lam.imag > 0):
        raise DomainError("lambda must avoid i[0, inf)")
    th = p.theta
    if p.kappa_zero:
        return BCCoeffs(complex(branch_power(lam, -1j * p.nu)) * np.exp(1j * th),
                        complex(branch_power(lam, 1j * p.nu)) * np.exp(-1j * th))
    if p.beta_imag:
        return BCCoeffs(complex(branch_power(lam, p.beta)) * np.exp(1j * th),
                        complex(branch_power(lam, -p.beta)) * np.exp(-1j * th))
    c, s = p.cos_theta, p.sin_theta
    if p.beta_zero:
        return BCCoeffs(complex(c), complex(s - c * complex(branch_log(lam))))
    b = p.beta.real
    a = complex(branch_power(lam, b)) * c if c != 0 else 0j
    bb = complex(branch_power(lam, -b)) * s if s != 0 else 0j
    return BCCoeffs(a, bb)


def wronskian(f, g):
    """``W[f, g] = f_1 g_2 - f_2 g_1`` for spinor arrays of shape ``(..., 2)``."""
    f = np.asarray(f)
    g = np.asarray(g)
    return f[..., 0] * g[..., 1] - f[..., 1] * g[..., 0]


def wronskian_mu(p: OperatorParams) -> complex:
    """Closed-form ``W[Phi_M, Phi_U]``."""
    nu, kap, beta = p.nu, p.kappa, p.beta
    br = p.branch
    if br == "kappa0":
        return 2j
    if br == "beta0":
        return complex(nu)
    if br == "minus_kappa":
        return complex(-beta)
    if br == "imag":
        return complex(-2 * kap * kap * nu * beta)
    return complex(-2 * beta * kap * (kap + beta))


def wronskian_good(p: OperatorParams, lam) -> complex:
    """Closed-form ``W[Phi_inf(lambda), Phi_0(lambda)]``."""
    lam = complex(lam)
    w = wronskian_mu(p)
    ab = bc_coeffs(p, lam)
    if p.kappa_zero:
        if lam.imag > 0:
            return -w * ab.b
        if lam.imag < 0:
            return w * ab.a
        raise DomainError("lambda must be non-real")
    return w * (c_of_lambda(p, lam) * ab.a - ab.b)


# ---------------------------------------------------------------------------
# Phi_infinity and Phi_0


def _recessive(p: OperatorParams, lam: complex, r):
    """A solution decaying at infinity that does not go through c(lambda)."""
    if lam.imag < 0:
        return phi_u_tilde(p, lam * r)
    return np.conj(phi_u_tilde(p, np.conj(lam) * r))


def phi_infinity(p: OperatorParams, lam, r, method: str = "auto"):
    """Solution square integrable at infinity, normalised as ``Phi_U + c Phi_M``.

    ``method='direct'`` evaluates ``Phi_U(lambda r) + c(lambda) Phi_M(lambda r)``
    literally.  ``'recessive'`` evaluates a decaying Kummer solution and fixes
    its normalisation through ``W[Phi_inf, Phi_M] = -W[Phi_M, Phi_U]``, which
    avoids cancellation between exponentially growing terms.  ``'auto'`` uses
    the direct form where ``|Im lambda| r <= 3``.
    """
    lam = complex(lam)
    if lam.imag == 0 or (lam.real == 0 and lam.imag > 0):
        raise DomainError("Phi_inf needs lambda off R and off i[0, inf)")
    r = np.asarray(r, dtype=float)
    if p.kappa_zero:
        return phi_u(p, lam * r) if lam.imag > 0 else phi_m(p, lam * r)
    if method == "direct":
        return phi_u(p, lam * r) + c_of_lambda(p, lam) * phi_m(p, lam * r)
    if method not in ("auto", "recessive"):
        raise ValueError(f"unknown method {method!r}")
    r0 = 1.0 / abs(lam)
    xi0 = _recessive(p, lam, np.array([r0]))
    w = complex(wronskian(xi0, phi_m(p, lam * np.array([r0])))[0])
    scale = -wronskian_mu(p) / w
    if method == "recessive":
        return scale * _recessive(p, lam, r)
    out = np.empty(r.shape + (2,), dtype=complex)
    near = np.abs(lam.imag) * r <= DIRECT_LIMIT
    if np.any(near):
        rn = r[near]
        out[near] = phi_u(p, lam * rn) + c_of_lambda(p, lam) * phi_m(p, lam * rn)
    if np.any(~near):
        out[~near] = scale * _recessive(p, lam, r[~near])
    return out


def phi_zero(p: OperatorParams, lam, r):
    """Boundary-adapted solution ``a Phi_U(lambda r) + b Phi_M(lambda r)``."""
    lam = complex(lam)
    r = np.asarray(r, dtype=float)
    ab = bc_coeffs(p, lam)
    x = lam * r
    out = np.zeros(r.shape + (2,), dtype=complex)
    if ab.a != 0:
        out = out + ab.a * phi_u(p, x)
    if ab.b != 0:
        out = out + ab.b * phi_m(p, x)
    return out


def phi_zero_grid(p: OperatorParams, lam, r):
    """``Phi_0(lambda_j; r_i)`` for real ``lam`` (n_lam,) and ``r`` (n_r,); shape (n_lam, n_r, 2).

    Exploits ``a`` and ``b`` depending on lambda only through the sign and a
    power of ``|lambda|``, so ``Phi_M`` and ``Phi_U`` are evaluated once on the
    product set ``lambda_j r_i``.
    """
    lam = np.asarray(lam, dtype=float)
    r = np.asarray(r, dtype=float)
    x = lam[:, None] * r[None, :]
    coeffs = [bc_coeffs(p, l) for l in lam]
    a = np.array([c.a for c in coeffs])
    b = np.array([c.b for c in coeffs])
    out = np.zeros(x.shape + (2,), dtype=complex)
    if np.any(a != 0):
        out += a[:, None, None] * phi_u(p, x)
    if np.any(b != 0):
        out += b[:, None, None] * phi_m(p, x)
    return out


# ---------------------------------------------------------------------------
# Checks


def apply_dirac(p: OperatorParams, fn, r, h_rel: float = 1e-4):
    """``d f`` at ``r`` with fourth-order central differences, step ``h = h_rel * r``."""
    r = np.asarray(r, dtype=float)
    h = h_rel * r
    f0 = fn(r)
    df = (-fn(r + 2 * h) + 8 * fn(r + h) - 8 * fn(r - h) + fn(r - 2 * h)) / (12 * h[..., None])
    nu, kap = p.nu, p.kappa
    rr = r[..., None]
    out = np.empty_like(f0)
    out[..., 0] = -nu / rr[..., 0] * f0[..., 0] - df[..., 1] - kap / rr[..., 0] * f0[..., 1]
    out[..., 1] = df[..., 0] - kap / rr[..., 0] * f0[..., 0] - nu / rr[..., 0] * f0[..., 1]
    return out


def ode_residual(p: OperatorParams, lam, fn, r, h_rel: float = 1e-4):
    """Relative residual ``|d f - lambda f| / |f|`` at each ``r``."""
    r = np.asarray(r, dtype=float)
    res = apply_dirac(p, fn, r, h_rel) - complex(lam) * fn(r)
    return np.linalg.norm(res, axis=-1) / np.maximum(np.linalg.norm(fn(r), axis=-1), 1e-300)


# ---------------------------------------------------------------------------
# Wronskian sweep

# two or three points per branch of the closed form
WRONSKIAN_POINTS = (
    (0.5, 0.0), (1.3, 0.0),                 # kappa = 0
    (1.0, 1.0), (0.7, -0.7),                # beta = 0
    (0.0, -0.5), (0.0, -1.3),               # beta = -kappa
    (0.7, 0.5), (1.5, -0.4),                # beta imaginary
    (0.4, 0.5), (0.3, 1.2), (0.2, 2.5), (0.0, 0.8),
)
WRONSKIAN_RADII = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class WronskianRow:
    nu: float
    kappa: float
    branch: str
    computed: complex
    formula: complex
    abs_err: float
    rel_err: float
    rel_spread: float


def wronskian_sweep(points=WRONSKIAN_POINTS, radii=WRONSKIAN_RADII) -> list[WronskianRow]:
    """``W[Phi_M, Phi_U]`` at ``lambda = 1`` over ``radii`` against the closed form.

    ``computed`` is the mean over the radii and ``rel_spread`` their standard
    deviation relative to ``|mean|``.
    """
    from .params import make_params

    r = np.asarray(radii, float)
    rows = []
    for nu, kap in points:
        p = make_params(nu, kap, 0.0 if kap * kap - nu * nu < 0.25 else math.pi / 2)
        w = wronskian(phi_m(p, r), phi_u(p, r))
        mean = complex(np.mean(w))
        ref = wronskian_mu(p)
        spread = float(np.sqrt(np.mean(np.abs(w - mean) ** 2)) / abs(mean))
        rows.append(WronskianRow(nu, kap, p.branch, mean, ref, abs(mean - ref),
                                 abs(mean - ref) / abs(ref), spread))
    return rows
