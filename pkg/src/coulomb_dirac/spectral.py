"""Spectral density, Green kernel, projection kernel and the spectral transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import DomainError, NearZeroLambda
from .grids import RadialGrid, SpectralGrid, SpinorField
from .params import OperatorParams
from .solutions import (
    connection_coeffs,
    phi_infinity,
    phi_m,
    phi_u,
    phi_zero,
    wronskian_good,
    wronskian_mu,
)
from .specialfn import branch_log, branch_power

FOUR_PI_INV = 1.0 / (4.0 * math.pi)


def _ab_arrays(p: OperatorParams, lam):
    """Vectorised ``a(lambda)``, ``b(lambda)`` for real non-zero lambda."""
    lam = np.asarray(lam, dtype=complex)
    th = p.theta
    if p.kappa_zero:
        return (branch_power(lam, -1j * p.nu) * np.exp(1j * th),
                branch_power(lam, 1j * p.nu) * np.exp(-1j * th))
    if p.beta_imag:
        return (branch_power(lam, p.beta) * np.exp(1j * th),
                branch_power(lam, -p.beta) * np.exp(-1j * th))
    c, s = p.cos_theta, p.sin_theta
    if p.beta_zero:
        return np.full(lam.shape, complex(c)), s - c * branch_log(lam)
    b = p.beta.real
    a = branch_power(lam, b) * c if c != 0 else np.zeros(lam.shape, complex)
    bb = branch_power(lam, -b) * s if s != 0 else np.zeros(lam.shape, complex)
    return a, bb


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) < 1e-12):
        raise NearZeroLambda("spectral density requested at |lambda| < 1e-12")
    return lam


def no_zero_factors(p: OperatorParams, lam):
    """``(c(lambda+i0) a - b, c(lambda-i0) a - b)`` on real non-zero lambda (kappa != 0)."""
    lam = _check_lambda(lam)
    cc = connection_coeffs(p)
    a, b = _ab_arrays(p, lam)
    cplus = np.where(lam > 0, cc.c_plus_pos, cc.c_plus_neg)
    return cplus * a - b, cc.c_minus * a - b


def no_zero_margin(p: OperatorParams, lam):
    """Scale-free distance of both factors from zero.

    Each factor ``c a - b`` is divided by ``|c| |a| + |b|``, which removes the
    ``lambda**(+-beta)`` growth of ``a`` and ``b``.  Returns the pointwise
    minimum over the two factors (1 for kappa = 0, where no factor occurs).
    """
    lam = _check_lambda(lam)
    if p.kappa_zero:
        return np.ones(lam.shape)[()]
    cc = connection_coeffs(p)
    a, b = _ab_arrays(p, lam)
    cplus = np.where(lam > 0, cc.c_plus_pos, cc.c_plus_neg)
    out = np.full(lam.shape, np.inf)
    for c in (cplus, np.full(lam.shape, cc.c_minus)):
        out = np.minimum(out, np.abs(c * a - b) / (np.abs(c) * np.abs(a) + np.abs(b)))
    return out[()]


def density_unguarded(p: OperatorParams, lam):
    """``m(lambda)`` without the small-``|lambda|`` guard (for test functions near 0)."""
    lam = np.asarray(lam, dtype=float)
    if p.kappa_zero:
        return np.full(lam.shape, FOUR_PI_INV)
    cc = connection_coeffs(p)
    a, b = _ab_arrays(p, lam)
    cplus = np.where(lam > 0, cc.c_plus_pos, cc.c_plus_neg)
    m = (cc.c_minus - cplus) / (2j * math.pi * wronskian_mu(p) * (cplus * a - b) * (cc.c_minus * a - b))
    return m


def spectral_density(p: OperatorParams, lam, return_imag: bool = False):
    """Density ``m(lambda)`` of the spectral measure, for real non-zero lambda.

    Vectorised over ``lam``.  With ``return_imag`` the (rounding-level)
    imaginary part of the closed-form expression is returned as well.
    """
    lam = _check_lambda(lam)
    m = density_unguarded(p, lam)
    re = np.real(m)
    re = re[()] if np.ndim(re) == 0 else re
    if return_imag:
        im = np.imag(m)
        return re, (im[()] if np.ndim(im) == 0 else im)
    return re


def green_kernel(p: OperatorParams, lam, x, y):
    """Resolvent kernel ``G(lambda; x, y)``, shape ``broadcast(x, y).shape + (2, 2)``."""
    lam = complex(lam)
    if lam.imag == 0 or (lam.real == 0 and lam.imag > 0):
        raise DomainError("green_kernel needs lambda off R and off i[0, inf)")
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    w = wronskian_good(p, lam)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    f0 = phi_zero(p, lam, lo)
    finf = phi_infinity(p, lam, hi)
    left = x < y
    # x < y: Phi_0(x) Phi_inf(y)^T ; x >= y: Phi_inf(x) Phi_0(y)^T
    first = np.where(left[..., None], f0, finf)
    second = np.where(left[..., None], finf, f0)
    return first[..., :, None] * second[..., None, :] / w


def projection_kernel_E(p: OperatorParams, lam, x, y):
    """``E(lambda; x, y) = m(lambda) Phi_0(lambda; x) Phi_0(lambda; y)^T`` (real 2x2)."""
    lam = float(lam)
    m = spectral_density(p, lam)
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    fx = phi_zero(p, lam, x).real
    fy = phi_zero(p, lam, y).real
    return m * fx[..., :, None] * fy[..., None, :]


def stone_jump(p: OperatorParams, lam: float, x, y, eps: float = 1e-5):
    """``(G(lambda + i eps) - G(lambda - i eps)) / (2 pi i)``."""
    gp = green_kernel(p, lam + 1j * eps, x, y)
    gm = green_kernel(p, lam - 1j * eps, x, y)
    return (gp - gm) / (2j * math.pi)


def stone_jump_extrapolated(p: OperatorParams, lam: float, x, y, eps: float = 1e-5):
    """Richardson extrapolation of :func:`stone_jump` to ``eps -> 0`` (error O(eps**2))."""
    return 2 * stone_jump(p, lam, x, y, eps / 2) - stone_jump(p, lam, x, y, eps)


def _cumsimpson(y, x):
    # scipy's cumulative_simpson is real-only
    return (cumulative_simpson(y.real, x=x, initial=0.0)
            + 1j * cumulative_simpson(y.imag, x=x, initial=0.0))


def apply_resolvent(p: OperatorParams, lam, r, f):
    """``((D - lambda)^{-1} f)(r)`` for ``f`` sampled on an equispaced grid ``r`` (n, 2).

    The two one-sided integrals of the factorised kernel are accumulated with
    cumulative Simpson sums, so the result is smooth across the diagonal.
    """
    lam = complex(lam)
    r = np.asarray(r, float)
    f = np.asarray(f, complex)
    w = wronskian_good(p, lam)
    f0 = phi_zero(p, lam, r)
    finf = phi_infinity(p, lam, r)
    inner0 = np.sum(f0 * f, axis=-1)
    innerinf = np.sum(finf * f, axis=-1)
    left = _cumsimpson(inner0, r)
    tot = _cumsimpson(innerinf, r)
    right = tot[-1] - tot
    return (finf * left[:, None] + f0 * right[:, None]) / w


# ---------------------------------------------------------------------------
# Spectral transform


def eigen_kernel(p: OperatorParams, lam, r, weights=None, density=None, chunk: int = 256):
    """Real array ``sqrt(weights_j m(lambda_j)) Phi_0(lambda_j; r_i)`` of shape (n_lam, n_r, 2)."""
    lam = np.asarray(lam, dtype=float)
    r = np.asarray(r, dtype=float)
    m = density_unguarded(p, lam).real if density is None else np.asarray(density, float)
    scale = np.sqrt(m if weights is None else m * np.asarray(weights, float))
    a, b = _ab_arrays(p, lam)
    kernel = np.empty((lam.size, r.size, 2))
    for s in range(0, lam.size, chunk):
        sl = slice(s, s + chunk)
        x = lam[sl, None] * r[None, :]
        acc = np.zeros(x.shape + (2,), complex)
        if np.any(a[sl] != 0):
            acc += a[sl, None, None] * phi_u(p, x)
        if np.any(b[sl] != 0):
            acc += b[sl, None, None] * phi_m(p, x)
        kernel[sl] = scale[sl, None, None] * acc.real
    return kernel


@dataclass
class SpectralTransform:
    """Discretised transform between a radial grid and a spectral grid.

    ``kernel[j, i, :] = sqrt(m(lambda_j)) Phi_0(lambda_j; r_i)``; the forward
    map is ``g_j = sum_i kernel[j, i] . f_i w_i`` and the adjoint is
    ``f_i = sum_j kernel[j, i] g_j omega_j``.
    """

    params: OperatorParams
    rg: RadialGrid
    sg: SpectralGrid
    kernel: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: OperatorParams, rg: RadialGrid, sg: SpectralGrid, chunk: int = 256):
        m = spectral_density(p, sg.lam)
        return cls(p, rg, sg, eigen_kernel(p, sg.lam, rg.r, density=m, chunk=chunk), m)

    def forward(self, values):
        """Transform of a field given by its values (n_r, 2) on ``rg``."""
        v = np.asarray(values, complex)
        return np.einsum("jik,ik->j", self.kernel, v * self.rg.w[:, None])

    def inverse(self, g):
        g = np.asarray(g, complex)
        return np.einsum("jik,j->ik", self.kernel, g * self.sg.w)

    def spectral_norm2(self, g) -> float:
        return float(np.sum(self.sg.w * np.abs(g) ** 2))

    def radial_norm2(self, values) -> float:
        return float(np.sum(self.rg.w * np.sum(np.abs(values) ** 2, axis=1)))


def forward_transform(p: OperatorParams, f: SpinorField, sg: SpectralGrid,
                      support=None, transform: SpectralTransform | None = None):
    """``(U f)(lambda_j)`` for a field with compact support on its grid."""
    if support is not None:
        f.check_support(*support)
    if transform is None:
        transform = SpectralTransform.build(p, f.grid, sg)
    return transform.forward(f.values)


def inverse_transform(p: OperatorParams, g, sg: SpectralGrid, rg: RadialGrid,
                      transform: SpectralTransform | None = None) -> SpinorField:
    """Adjoint transform ``U* g`` sampled on ``rg``."""
    if transform is None:
        transform = SpectralTransform.build(p, rg, sg)
    return SpinorField(rg, transform.inverse(g))


def excised_mass(transform: SpectralTransform, values, r_probe=None) -> dict:
    """Diagnostics for the spectral truncation of a given field."""
    g = transform.forward(values)
    return {
        "lam_min": transform.sg.lam_min,
        "lam_max": transform.sg.lam_max,
        "edge_density_low": float(np.max(np.abs(g[np.abs(transform.sg.lam) <= 2 * transform.sg.lam_min]) ** 2, initial=0.0)),
        "edge_density_high": float(np.max(np.abs(g[np.abs(transform.sg.lam) >= 0.9 * transform.sg.lam_max]) ** 2, initial=0.0)),
    }


# ---------------------------------------------------------------------------
# Unitarity study


def smooth_bump(r, r_a: float, r_b: float):
    """``exp(-1/(1-s^2))`` on ``(r_a, r_b)`` with ``s`` the centred coordinate; 0 outside."""
    r = np.asarray(r, float)
    s = (2 * r - r_a - r_b) / (r_b - r_a)
    out = np.zeros_like(r)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class BumpSpinor:
    """Smooth compactly supported spinor ``bump(r) (cos phi, sin phi (1 + slope r))``."""

    r_a: float
    r_b: float
    phi: float = 0.0
    slope: float = 0.0

    def __call__(self, r):
        b = smooth_bump(r, self.r_a, self.r_b)
        return np.stack([b * math.cos(self.phi),
                         b * math.sin(self.phi) * (1 + self.slope * np.asarray(r))], axis=-1)


DEFAULT_BUMPS = (
    BumpSpinor(0.5, 3.0, 0.0),
    BumpSpinor(1.0, 2.5, 0.7, 0.3),
    BumpSpinor(0.3, 1.5, 1.3, 0.3),
    BumpSpinor(2.0, 5.0, 2.0, 0.3),
    BumpSpinor(0.8, 4.0, -0.5, 0.3),
)

# (lam_min, lam_max, panels); the radial panel follows lam_max
UNITARITY_LADDER = ((1e-4, 12.5, 512), (1e-5, 25.0, 1024), (1e-6, 50.0, 2048))


def transform_defects(T: SpectralTransform, fn) -> dict:
    """Parseval, round-trip and diagonalisation defects of ``T`` on the field ``fn``."""
    from .solutions import apply_dirac

    r = T.rg.r
    v = np.asarray(fn(r), complex)
    n2 = T.radial_norm2(v)
    g = T.forward(v)
    parseval = abs(T.spectral_norm2(g) / n2 - 1.0)
    back = T.inverse(g)
    roundtrip = math.sqrt(T.radial_norm2(back - v) / n2)
    df = apply_dirac(T.params, fn, r)
    gd = T.forward(df)
    diag = math.sqrt(T.spectral_norm2(gd - T.sg.lam * g) / T.radial_norm2(df))
    return {"parseval_defect": parseval, "roundtrip_err": roundtrip, "diag_defect": diag}


def unitarity_study(p: OperatorParams, bumps=DEFAULT_BUMPS, ladder=UNITARITY_LADDER,
                    r_span=(0.25, 5.25), order: int = 2) -> dict:
    """Defects of the discretised transform on each test field along a refinement ladder.

    Each rung halves the radial panel and doubles the spectral range and
    panel count.  Returns the per-rung maxima over ``bumps`` and a flag for a
    non-increasing trend.
    """
    levels = []
    for lam_min, lam_max, panels in ladder:
        sg = SpectralGrid.symmetric(lam_min, lam_max, panels=panels, order=order)
        rg = RadialGrid.gauss_interval(r_span[0], r_span[1], panel=math.pi / (4 * lam_max), order=order)
        T = SpectralTransform.build(p, rg, sg)
        per = [transform_defects(T, fn) for fn in bumps]
        level = {k: max(d[k] for d in per) for k in per[0]}
        level.update({"lam_min": lam_min, "lam_max": lam_max, "panels": panels,
                      "n_lambda": sg.n, "n_r": rg.n})
        levels.append(level)
    keys = ("parseval_defect", "roundtrip_err", "diag_defect")
    monotone = all(levels[i + 1][k] <= levels[i][k] for i in range(len(levels) - 1) for k in keys)
    final = {k: levels[-1][k] for k in keys}
    return {**final, "levels": levels, "monotone": monotone}
