"""Complex gamma, digamma and Kummer confluent hypergeometric functions.

Kummer's ``M(a, b, z)`` and Tricomi's ``U(a, b, z)`` are evaluated for scalar
complex parameters and array-valued complex arguments.  Three regimes are
combined:

* power series (and, for ``U``, the connection formula or the logarithmic
  series at integer ``b``) inside ``|z| <= SERIES_RADIUS``;
* Taylor stepping of the Kummer ODE ``z w'' + (b - z) w' - a w = 0`` along
  rays in the intermediate band;
* truncated asymptotic expansions for ``|z| >= asymptotic_radius(a, b)``.

Powers of the spectral parameter use the branch ``arg in (-3pi/2, pi/2]``
(see :class:`BranchPower`); with that choice ``z = 2 i lambda r`` always has a
principal argument and all Kummer evaluations use principal branches.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sps

from .errors import AccuracyLoss, BranchCutError, ParameterPole, PoleError

EULER_GAMMA = float(np.euler_gamma)

SERIES_RADIUS = 3.0
STEP_RATIO = 0.25
MAX_STEP = 2.0
_EPS = 1e-17
_MAX_TERMS = 600


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite argument")
    return arr


def _is_nonpositive_integer(z, tol=0.0):
    z = np.asarray(z, dtype=complex)
    re = z.real
    near = np.abs(re - np.round(re)) <= tol
    return (np.abs(z.imag) <= tol) & near & (np.round(re) <= 0)


def gamma_c(z):
    """Gamma function for complex arguments (scalar or array)."""
    arr = _as_complex_array(z)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"gamma has a pole at {z!r}")
    # the real routine is exact at small integers, the complex one is not
    out = sps.gamma(arr.real).astype(complex) if not np.any(arr.imag) else sps.gamma(arr)
    return out[()] if out.ndim == 0 else out


def rgamma_c(z):
    """Reciprocal gamma ``1/Gamma(z)``, entire, zero at the poles of gamma."""
    out = sps.rgamma(_as_complex_array(z))
    return out[()] if out.ndim == 0 else out


def loggamma_c(z):
    arr = _as_complex_array(z)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"log-gamma has a pole at {z!r}")
    out = sps.loggamma(arr)
    return out[()] if out.ndim == 0 else out


def digamma_c(z):
    """Digamma function ``psi = Gamma'/Gamma`` for complex arguments."""
    arr = _as_complex_array(z)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"digamma has a pole at {z!r}")
    out = sps.psi(arr)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Branch of powers and logarithms of the spectral parameter


def branch_arg(lam):
    """Argument of ``lam`` taken in ``(-3pi/2, pi/2]``."""
    lam = np.asarray(lam, dtype=complex)
    ang = np.angle(lam)
    ang = np.where(ang > np.pi / 2, ang - 2 * np.pi, ang)
    return ang[()] if ang.ndim == 0 else ang


def branch_log(lam):
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise BranchCutError("logarithm of zero")
    out = np.log(np.abs(lam)) + 1j * branch_arg(lam)
    return out[()] if np.ndim(out) == 0 else out


def branch_power(lam, gamma):
    """``lam**gamma`` with ``arg lam in (-3pi/2, pi/2]``.

    For ``lam < 0`` this equals ``exp(-i pi gamma) |lam|**gamma``.
    """
    out = np.exp(complex(gamma) * branch_log(lam))
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BranchPower:
    """A power ``base**exponent`` under the fixed spectral-parameter branch."""

    base: complex
    exponent: complex

    def __post_init__(self):
        if not (np.isfinite(complex(self.base)) and np.isfinite(complex(self.exponent))):
            raise ValueError("BranchPower needs finite base and exponent")
        if complex(self.base) == 0:
            raise BranchCutError("BranchPower base must be non-zero")

    @property
    def arg(self) -> float:
        return float(branch_arg(self.base))

    def value(self) -> complex:
        return complex(branch_power(self.base, self.exponent))

    def __complex__(self) -> complex:
        return self.value()


# ---------------------------------------------------------------------------
# Kummer functions: building blocks


def _series_m(a, b, z):
    """Power series of ``M(a, b, z)``; Kummer's transformation for Re z < 0."""
    flip = z.real < 0
    zz = np.where(flip, -z, z)
    aa = np.where(flip, b - a, a)
    term = np.ones_like(zz)
    total = term.copy()
    k = 0
    while k < _MAX_TERMS:
        term = term * (aa + k) / ((b + k) * (k + 1)) * zz
        total = total + term
        k += 1
        if k > 4 and np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
    return np.where(flip, np.exp(z) * total, total)


def _asym_sum(p, q, w, tol=_EPS):
    """Sum ``sum_s (p)_s (q)_s / s! * w**s`` up to its smallest term.

    The cut-off index is fixed by the largest ``|w|`` in the batch: terms
    past the smallest one at that radius are dropped, and for smaller
    ``|w|`` the retained terms are still decreasing.  Evaluated by Horner.
    Returns the sums and the magnitude of the first omitted term.
    """
    w = np.asarray(w, dtype=complex)
    if w.size == 0:
        return w.copy(), np.abs(w)
    wmax = float(np.max(np.abs(w)))
    coef = [1.0 + 0j]
    mag = 1.0
    for s in range(_MAX_TERMS):
        c = coef[-1] * (p + s) * (q + s) / (s + 1)
        m = abs(c) * wmax ** (s + 1)
        if m > mag and s > 0:
            break
        coef.append(c)
        mag = m
        if m <= tol * 1e-2 or c == 0:
            break
    total = np.full(w.shape, coef[-1])
    for c in reversed(coef[:-1]):
        total = total * w + c
    nxt = coef[-1] * (p + len(coef) - 1) * (q + len(coef) - 1) / len(coef)
    return total, np.abs(nxt * w ** len(coef))


def _asym_u(a, b, z):
    s, _ = _asym_sum(a, a - b + 1, -1.0 / z)
    return np.exp(-a * np.log(z)) * s


def _asym_m_scaled(a, b, z):
    """``exp(-z/2) M(a, b, z)`` from its large-|z| expansion."""
    sgn = np.where(z.imag >= 0, 1.0, -1.0)
    logz = np.log(z)
    s1, _ = _asym_sum(a, a - b + 1, -1.0 / z)
    s2, _ = _asym_sum(1 - a, b - a, 1.0 / z)
    gb = complex(sps.gamma(b))
    t1 = np.exp(sgn * 1j * np.pi * a - a * logz - z / 2) * complex(sps.rgamma(b - a)) * s1
    t2 = np.exp(z / 2 + (a - b) * logz) * complex(sps.rgamma(a)) * s2
    return gb * (t1 + t2)


def _smallest_term(p, q, radius):
    """Smallest term magnitude of ``sum (p)_s (q)_s / s! radius**-s``."""
    t = 1.0
    best = 1.0
    for s in range(_MAX_TERMS):
        t *= abs(p + s) * abs(q + s) / ((s + 1) * radius)
        if t < best:
            best = t
        elif s > 2:
            break
        if best < 1e-18:
            break
    return best


@lru_cache(maxsize=512)
def asymptotic_radius(a: complex, b: complex) -> float:
    """Smallest ``|z|`` at which both large-argument series reach 1e-16."""
    radius = 20.0
    while radius < 5000.0:
        if (_smallest_term(a, a - b + 1, radius) < 1e-16
                and _smallest_term(1 - a, b - a, radius) < 1e-16):
            return radius
        radius *= 1.15
    return radius


def _taylor_step(a, b, z0, w, dw, h):
    """Advance a solution of the Kummer ODE from ``z0`` to ``z0 + h``.

    Uses the scaled Taylor coefficients ``d_k = w^{(k)}(z0) h^k / k!`` which
    obey ``z0 (k+1)(k+2) d_{k+2} = (k+a) h^2 d_k - (k+1)(k+b-z0) h d_{k+1}``.
    """
    d0 = w
    d1 = dw * h
    sw = d0 + d1
    sd = d1.copy()
    scale = np.abs(sw) + np.abs(sd) + 1e-300
    for k in range(_MAX_TERMS):
        d2 = ((k + a) * d0 * h * h - (k + 1) * (k + b - z0) * d1 * h) / (z0 * (k + 1) * (k + 2))
        sw = sw + d2
        sd = sd + (k + 2) * d2
        if k > 4 and np.all(np.abs(d2) + np.abs(d1) <= _EPS * (np.abs(sw) + np.abs(sd) + scale * 1e-3)):
            break
        d0, d1 = d1, d2
    safe_h = np.where(h == 0, 1.0, h)
    return sw, np.where(h == 0, dw, sd / safe_h)


def _radial_nodes(lo, hi):
    """Node magnitudes from ``lo`` up to at least ``hi``; relative step q, absolute cap."""
    nodes = [lo]
    while nodes[-1] < hi:
        x = nodes[-1]
        nodes.append(min(x * (1 + STEP_RATIO), x + MAX_STEP))
    return np.array(nodes)


def _directions(z):
    """Group points by ray direction; returns (unit vectors, inverse index)."""
    ang = np.round(np.angle(z), 13)
    uniq, inv = np.unique(ang, return_inverse=True)
    return np.exp(1j * uniq), inv.reshape(z.shape)


def _march_table(a, b, z, start_mag, anchor):
    """Evaluate (w, w') at ``z`` by Taylor stepping from an anchor radius.

    ``anchor(zs)`` returns (w, w') at points ``zs`` of magnitude
    ``start_mag``.  Nodes are laid out between ``start_mag`` and the points
    and values are propagated node to node along each ray, then one short
    Taylor step reaches every target.
    """
    units, inv = _directions(z)
    rho = np.abs(z)
    w_out = np.empty(z.shape, dtype=complex)
    dw_out = np.empty(z.shape, dtype=complex)
    outward = bool(np.all(rho >= start_mag))
    for j, u in enumerate(units):
        sel = inv == j
        r_sel = rho[sel]
        if outward:
            mags = _radial_nodes(start_mag, r_sel.max())
        else:
            mags = _radial_nodes(min(r_sel.min(), start_mag), start_mag)
            mags[-1] = start_mag
            mags = np.unique(mags)
        zn = mags * u
        wn = np.empty(len(mags), dtype=complex)
        dwn = np.empty(len(mags), dtype=complex)
        if outward:
            w0, dw0 = anchor(np.array([zn[0]]))
            wn[0], dwn[0] = w0[0], dw0[0]
            for i in range(1, len(mags)):
                w1, dw1 = _taylor_step(a, b, np.array([zn[i - 1]]), np.array([wn[i - 1]]),
                                       np.array([dwn[i - 1]]), np.array([zn[i] - zn[i - 1]]))
                wn[i], dwn[i] = w1[0], dw1[0]
            idx = np.clip(np.searchsorted(mags, r_sel, side="right") - 1, 0, len(mags) - 1)
        else:
            w0, dw0 = anchor(np.array([zn[-1]]))
            wn[-1], dwn[-1] = w0[0], dw0[0]
            for i in range(len(mags) - 2, -1, -1):
                w1, dw1 = _taylor_step(a, b, np.array([zn[i + 1]]), np.array([wn[i + 1]]),
                                       np.array([dwn[i + 1]]), np.array([zn[i] - zn[i + 1]]))
                wn[i], dwn[i] = w1[0], dw1[0]
            idx = np.clip(np.searchsorted(mags, r_sel, side="left"), 0, len(mags) - 1)
        zt = z[sel]
        w1, dw1 = _taylor_step(a, b, zn[idx], wn[idx], dwn[idx], zt - zn[idx])
        w_out[sel] = w1
        dw_out[sel] = dw1
    return w_out, dw_out


def _check_m_params(b):
    if _is_nonpositive_integer(b, tol=1e-14):
        raise ParameterPole(f"M(a, b, z) undefined for b = {b!r}")


def _m_and_dm(a, b, z):
    """``(M, M')`` without scaling, for |z| below the asymptotic radius."""
    out = np.empty(z.shape, dtype=complex)
    dout = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= SERIES_RADIUS
    if np.any(small):
        out[small] = _series_m(a, b, z[small])
        dout[small] = (a / b) * _series_m(a + 1, b + 1, z[small])
    mid = ~small
    if np.any(mid):
        def anchor(zs):
            return _series_m(a, b, zs), (a / b) * _series_m(a + 1, b + 1, zs)
        w, dw = _march_table(a, b, z[mid], SERIES_RADIUS, anchor)
        out[mid] = w
        dout[mid] = dw
    return out, dout


def _pair_radius(a, b):
    return max(asymptotic_radius(a, b), asymptotic_radius(a + 1, b + 1))


def _m_scaled(a, b, z):
    """``exp(-z/2) M(a,b,z)`` and ``exp(-z/2) M'(a,b,z)``."""
    r_asym = _pair_radius(a, b)
    out = np.empty(z.shape, dtype=complex)
    dout = np.empty(z.shape, dtype=complex)
    far = np.abs(z) >= r_asym
    if np.any(far):
        zf = z[far]
        out[far] = _asym_m_scaled(a, b, zf)
        dout[far] = (a / b) * _asym_m_scaled(a + 1, b + 1, zf)
    near = ~far
    if np.any(near):
        zn = z[near]
        w, dw = _m_and_dm(a, b, zn)
        e = np.exp(-zn / 2)
        out[near] = w * e
        dout[near] = dw * e
    return out, dout


def _finish(out, scaled, z, shape):
    if not scaled:
        out = out * np.exp(z / 2)
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def kummer_m(a, b, z, scaled: bool = False, check: bool = False):
    """Kummer's function ``M(a, b, z) = 1F1(a; b; z)``.

    Parameters
    ----------
    a, b : complex
        Parameters; ``b`` must not be a non-positive integer.
    z : complex or array_like
        Argument(s).
    scaled : bool
        Return ``exp(-z/2) M(a, b, z)`` instead, which stays finite for
        large ``|Re z|``.
    check : bool
        Re-evaluate points near regime boundaries with the neighbouring
        regime and warn with :class:`AccuracyLoss` on disagreement > 1e-6.
    """
    a, b = complex(a), complex(b)
    _check_m_params(b)
    z = _as_complex_array(z)
    shape = z.shape
    zf = z.ravel()
    out, _ = _m_scaled(a, b, zf)
    if check:
        _cross_check(out, kummer_m_regimes(a, b, zf, scaled=True), "M")
    return _finish(out, scaled, zf, shape)


def kummer_m_derivative(a, b, z, scaled: bool = False):
    """``dM/dz``, equal to ``(a/b) M(a+1, b+1, z)``."""
    a, b = complex(a), complex(b)
    _check_m_params(b)
    z = _as_complex_array(z)
    zf = z.ravel()
    _, dout = _m_scaled(a, b, zf)
    return _finish(dout, scaled, zf, z.shape)


def _is_integer(x, tol):
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


def _u_log_series(a, n, z):
    """``U(a, n+1, z)`` for a non-negative integer ``n`` (logarithmic series)."""
    logz = np.log(z)
    ra = complex(sps.rgamma(a))
    pref = (-1) ** (n + 1) * complex(sps.rgamma(a - n)) / math.factorial(n)
    term = np.ones_like(z)
    total = np.zeros_like(z)
    psi_a = complex(sps.psi(a)) if not _is_nonpositive_integer(a) else None
    k = 0
    while k < _MAX_TERMS:
        if psi_a is None:
            psi_ak = complex(sps.psi(a + k)) if not _is_nonpositive_integer(a + k) else 0.0
        elif k == 0:
            psi_ak = psi_a
        else:
            psi_ak = psi_ak + 1.0 / (a + k - 1)
        bracket = logz + psi_ak - sps.digamma(1 + k) - sps.digamma(n + k + 1)
        add = term * bracket
        total = total + add
        term = term * (a + k) / ((n + 1 + k) * (k + 1)) * z
        k += 1
        if k > 4 and np.all(np.abs(term) * (np.abs(logz) + 10 + k) <= _EPS * (np.abs(total) + 1e-300)):
            break
    out = pref * total
    if n > 0:
        for k in range(1, n + 1):
            poch = 1.0 + 0j
            for j in range(n - k):
                poch *= (1 - a + k + j)
            out = out + ra * math.factorial(k - 1) * poch / math.factorial(n - k) * z ** (-k)
    return out


def _u_connection(a, b, z):
    """Connection formula with two M terms, for ``b`` away from the integers."""
    c1 = complex(sps.gamma(1 - b)) * complex(sps.rgamma(a - b + 1))
    c2 = complex(sps.gamma(b - 1)) * complex(sps.rgamma(a))
    return c1 * _series_m(a, b, z) + c2 * np.exp((1 - b) * np.log(z)) * _series_m(a - b + 1, 2 - b, z)


def _u_small_kind(b):
    """Method for ``U`` inside the series radius: 'log', 'connection' or 'march'."""
    if _is_integer(b, 1e-14) and round(b.real) >= 1:
        return "log"
    dist = abs(b - complex(round(b.real), 0.0))
    if dist >= 0.1:
        return "connection"
    return "march"


def _u_small(a, b, z):
    kind = _u_small_kind(b)
    if kind == "log":
        n = int(round(b.real)) - 1
        return _u_log_series(a, n, z)
    return _u_connection(a, b, z)


def _arc_march(a, b, z0, w, dw, z1):
    """Taylor-step along the circle ``|z| = |z0|`` from ``z0`` to ``z1``."""
    rad = abs(z0)
    t0, t1 = np.angle(z0), np.angle(z1)
    n = max(1, int(np.ceil(rad * abs(t1 - t0) / (0.5 * MAX_STEP))))
    pts = rad * np.exp(1j * np.linspace(t0, t1, n + 1))
    for i in range(n):
        w, dw = _taylor_step(a, b, pts[i:i + 1], w, dw, pts[i + 1:i + 2] - pts[i:i + 1])
    return w, dw


def _u_anchor_small(a, b, zs):
    """``(U, U')`` at points of modulus ``SERIES_RADIUS``."""
    if _u_small_kind(b) != "march":
        return _u_small(a, b, zs), -a * _u_small(a + 1, b + 1, zs)
    r_asym = _pair_radius(a, b)
    w_out = np.empty(zs.shape, dtype=complex)
    dw_out = np.empty(zs.shape, dtype=complex)

    def far_anchor(zf):
        return _asym_u(a, b, zf), -a * _asym_u(a + 1, b + 1, zf)

    for i, z1 in enumerate(zs):
        zi = np.array([abs(z1) * (1j if z1.imag >= 0 else -1j)])
        w, dw = _march_table(a, b, zi, r_asym, far_anchor)
        w, dw = _arc_march(a, b, zi[0], w, dw, z1)
        w_out[i], dw_out[i] = w[0], dw[0]
    return w_out, dw_out


def _u_and_du(a, b, z):
    """``(U, U')`` on points below the asymptotic radius.

    In the right half-plane ``U`` is recessive as ``|z|`` grows, so values
    are propagated inwards from the asymptotic anchor.  In the left
    half-plane it is dominant and is propagated outwards from the small-|z|
    closed forms instead.
    """
    r_asym = _pair_radius(a, b)
    out = np.empty(z.shape, dtype=complex)
    dout = np.empty(z.shape, dtype=complex)
    kind = _u_small_kind(b)
    rho = np.abs(z)
    small = (rho <= SERIES_RADIUS) & (kind != "march")
    if np.any(small):
        zs = z[small]
        out[small] = _u_small(a, b, zs)
        dout[small] = -a * _u_small(a + 1, b + 1, zs)
    left = (z.real < 0) & ~small
    right = ~small & ~left

    def anchor_small(zs):
        return _u_anchor_small(a, b, zs)

    for mask in (left & (rho > SERIES_RADIUS), left & (rho <= SERIES_RADIUS)):
        if np.any(mask):
            w, dw = _march_table(a, b, z[mask], SERIES_RADIUS, anchor_small)
            out[mask] = w
            dout[mask] = dw
    if np.any(right):
        r_anchor = max(r_asym, float(rho[right].max()))

        def anchor(zs):
            return _asym_u(a, b, zs), -a * _asym_u(a + 1, b + 1, zs)

        w, dw = _march_table(a, b, z[right], r_anchor, anchor)
        out[right] = w
        dout[right] = dw
    return out, dout


def _check_u_arg(z):
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise BranchCutError("U(a, b, z) is evaluated off the cut z in (-inf, 0]")


def _u_scaled(a, b, z):
    r_asym = _pair_radius(a, b)
    out = np.empty(z.shape, dtype=complex)
    dout = np.empty(z.shape, dtype=complex)
    far = np.abs(z) >= r_asym
    if np.any(far):
        zf = z[far]
        e = np.exp(-zf / 2)
        out[far] = _asym_u(a, b, zf) * e
        dout[far] = -a * _asym_u(a + 1, b + 1, zf) * e
    near = ~far
    if np.any(near):
        zn = z[near]
        w, dw = _u_and_du(a, b, zn)
        e = np.exp(-zn / 2)
        out[near] = w * e
        dout[near] = dw * e
    return out, dout


def kummer_u(a, b, z, scaled: bool = False, check: bool = False):
    """Tricomi's confluent hypergeometric function ``U(a, b, z)``.

    ``z`` must avoid the cut ``(-inf, 0]``; ``z**-a`` uses the principal
    branch.  ``scaled`` returns ``exp(-z/2) U(a, b, z)``.
    """
    a, b = complex(a), complex(b)
    z = _as_complex_array(z)
    _check_u_arg(z)
    shape = z.shape
    zf = z.ravel()
    if a == 0:
        out = np.exp(-zf / 2)
    else:
        out, _ = _u_scaled(a, b, zf)
    if check:
        _cross_check(out, kummer_u_regimes(a, b, zf, scaled=True), "U")
    return _finish(out, scaled, zf, shape)


def kummer_u_derivative(a, b, z, scaled: bool = False):
    """``dU/dz``, equal to ``-a U(a+1, b+1, z)``."""
    a, b = complex(a), complex(b)
    z = _as_complex_array(z)
    _check_u_arg(z)
    zf = z.ravel()
    _, dout = _u_scaled(a, b, zf)
    return _finish(dout, scaled, zf, z.shape)


def kummer_m_pair(a, b, z, scaled: bool = False):
    """``(M(a, b, z), M(a+1, b+1, z))`` from one evaluation of ``M`` and ``M'``."""
    a, b = complex(a), complex(b)
    _check_m_params(b)
    z = _as_complex_array(z)
    zf = z.ravel()
    if a == 0:
        return kummer_m(a, b, z, scaled), kummer_m(a + 1, b + 1, z, scaled)
    out, dout = _m_scaled(a, b, zf)
    return _finish(out, scaled, zf, z.shape), _finish(dout * (b / a), scaled, zf, z.shape)


def kummer_u_pair(a, b, z, scaled: bool = False):
    """``(U(a, b, z), U(a+1, b+1, z))`` from one evaluation of ``U`` and ``U'``."""
    a, b = complex(a), complex(b)
    z = _as_complex_array(z)
    _check_u_arg(z)
    zf = z.ravel()
    if a == 0:
        return kummer_u(a, b, z, scaled), kummer_u(a + 1, b + 1, z, scaled)
    out, dout = _u_scaled(a, b, zf)
    return _finish(out, scaled, zf, z.shape), _finish(dout * (-1.0 / a), scaled, zf, z.shape)


# ---------------------------------------------------------------------------
# Regime-by-regime evaluation (used for consistency checks)


def kummer_m_regimes(a, b, z, scaled: bool = False):
    """Evaluate ``M`` separately with every regime; returns a dict of arrays.

    Entries are NaN where a regime is not meaningful (series beyond the
    cancellation limit, asymptotics inside their validity radius).
    """
    a, b = complex(a), complex(b)
    _check_m_params(b)
    z = _as_complex_array(z).ravel()
    res = {}
    e = np.exp(-z / 2)
    ser = np.full(z.shape, np.nan, dtype=complex)
    ok = np.abs(z) <= 12.0
    if np.any(ok):
        ser[ok] = _series_m(a, b, z[ok]) * e[ok]
    res["series"] = ser
    mar = np.full(z.shape, np.nan, dtype=complex)
    ok = (np.abs(z) > SERIES_RADIUS) & (np.abs(z) <= 120.0)
    if np.any(ok):
        mar[ok] = _m_and_dm(a, b, z[ok])[0] * e[ok]
    res["ode"] = mar
    asy = np.full(z.shape, np.nan, dtype=complex)
    ok = np.abs(z) >= asymptotic_radius(a, b)
    if np.any(ok):
        asy[ok] = _asym_m_scaled(a, b, z[ok])
    res["asymptotic"] = asy
    if not scaled:
        for k in res:
            res[k] = res[k] / e
    return res


def kummer_u_regimes(a, b, z, scaled: bool = False):
    """Evaluate ``U`` with the small-|z| closed form, ODE stepping and asymptotics."""
    a, b = complex(a), complex(b)
    z = _as_complex_array(z).ravel()
    _check_u_arg(z)
    e = np.exp(-z / 2)
    res = {}
    small = np.full(z.shape, np.nan, dtype=complex)
    ok = np.abs(z) <= 12.0
    if _u_small_kind(b) != "march" and np.any(ok):
        small[ok] = _u_small(a, b, z[ok]) * e[ok]
    res["closed_form"] = small
    mar = np.full(z.shape, np.nan, dtype=complex)
    ok = np.abs(z) <= 120.0
    if np.any(ok):
        zz = z[ok]
        r_anchor = max(asymptotic_radius(a, b), float(np.abs(zz).max()))

        def anchor(zs):
            return _asym_u(a, b, zs), -a * _asym_u(a + 1, b + 1, zs)

        mar[ok] = _march_table(a, b, zz, r_anchor, anchor)[0] * e[ok]
    res["ode"] = mar
    asy = np.full(z.shape, np.nan, dtype=complex)
    ok = np.abs(z) >= asymptotic_radius(a, b)
    if np.any(ok):
        asy[ok] = _asym_u(a, b, z[ok]) * e[ok]
    res["asymptotic"] = asy
    if not scaled:
        for k in res:
            res[k] = res[k] / e
    return res


def _cross_check(value, regimes, name, tol=1e-6):
    worst = 0.0
    for arr in regimes.values():
        ok = np.isfinite(arr)
        if not np.any(ok):
            continue
        dev = np.abs(arr[ok] - value[ok]) / np.maximum(np.abs(value[ok]), 1e-300)
        worst = max(worst, float(dev.max()))
    if worst > tol:
        warnings.warn(f"{name}: evaluation regimes disagree by {worst:.2e}", AccuracyLoss, stacklevel=3)
    return worst
