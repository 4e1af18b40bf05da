"""Operator parameters (nu, kappa, theta), admissibility and regime tags.

The half-line operator acts as

    d = [[-nu/r, -d/dr - kappa/r], [d/dr - kappa/r, -nu/r]]

with ``beta = sqrt(kappa**2 - nu**2)`` taken on the closed positive real axis
or the open positive imaginary axis.  ``theta`` selects the boundary
condition at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, GridTooCoarse, NotSelfAdjoint
from .grids import SpinorField

HALF_PI = math.pi / 2
BETA_ZERO_TOL = 1e-14
THETA_SNAP = 1e-12


class Regime(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    NOT_IN_M = "NotInM"


def _snap_theta(theta: float) -> float:
    if abs(theta - HALF_PI) <= THETA_SNAP:
        return HALF_PI
    if abs(theta) <= THETA_SNAP:
        return 0.0
    return float(theta)


@dataclass(frozen=True)
class OperatorParams:
    nu: float
    kappa: float
    theta: float
    beta: complex

    # -- branch predicates -------------------------------------------------
    @property
    def kappa_zero(self) -> bool:
        return self.kappa == 0.0

    @property
    def beta_zero(self) -> bool:
        return self.beta == 0

    @property
    def beta_imag(self) -> bool:
        return self.beta.imag > 0

    @property
    def beta_real(self) -> bool:
        """``beta`` on the closed positive real axis."""
        return self.beta.imag == 0

    @property
    def beta_pos(self) -> bool:
        return self.beta.imag == 0 and self.beta.real > 0

    @property
    def beta_minus_kappa(self) -> bool:
        """The exceptional case ``beta = -kappa > 0`` (equivalently nu = 0, kappa < 0)."""
        return self.beta_pos and self.nu == 0.0 and self.kappa < 0

    @property
    def imaginary_bc(self) -> bool:
        """True when the boundary condition pairs with ``e^{i theta}``, ``e^{-i theta}``."""
        return self.kappa_zero or self.beta_imag

    @property
    def cos_theta(self) -> float:
        if self.theta == HALF_PI:
            return 0.0
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        if self.theta == HALF_PI:
            return 1.0
        return math.sin(self.theta)

    @property
    def branch(self) -> str:
        """Name of the solution family: 'kappa0', 'beta0', 'minus_kappa', 'imag' or 'real'."""
        if self.kappa_zero:
            return "kappa0"
        if self.beta_zero:
            return "beta0"
        if self.beta_minus_kappa:
            return "minus_kappa"
        if self.beta_imag:
            return "imag"
        return "real"


def compute_beta(nu: float, kappa: float) -> complex:
    d = kappa * kappa - nu * nu
    if abs(d) <= BETA_ZERO_TOL * max(nu * nu, kappa * kappa):
        return 0j
    if d > 0:
        return complex(math.sqrt(d), 0.0)
    return complex(0.0, math.sqrt(-d))


def make_params(nu: float, kappa: float, theta: float) -> OperatorParams:
    """Build validated operator parameters.

    Raises :class:`NotSelfAdjoint` for ``beta >= 1/2`` with ``theta != pi/2``.
    """
    nu, kappa, theta = float(nu), float(kappa), float(theta)
    if not all(map(math.isfinite, (nu, kappa, theta))):
        raise DomainError("parameters must be finite")
    if not (0.0 <= theta < math.pi):
        raise DomainError("theta must lie in [0, pi)")
    theta = _snap_theta(theta)
    beta = compute_beta(nu, kappa)
    if kappa != 0.0 and beta.imag == 0 and beta.real >= 0.5 and theta != HALF_PI:
        raise NotSelfAdjoint(
            f"beta = {beta.real:.6g} >= 1/2 admits only theta = pi/2 (got {theta!r})")
    return OperatorParams(nu, kappa, theta, beta)


def in_admissible_set(nu: float, kappa: float, theta: float) -> bool:
    try:
        make_params(nu, kappa, theta)
    except NotSelfAdjoint:
        return False
    return True


def table_cell(p: OperatorParams) -> str:
    """Cell label of the applicability table (e.g. 'Ia1', 'IIa', 'Ib', 'IIIa')."""
    if p.kappa_zero or p.beta_imag:
        return "Ia1"
    if p.beta_zero:
        return "Ia1" if p.theta == HALF_PI else "IIIa"
    b = p.beta.real
    if b < 0.5:
        if p.theta == 0.0:
            return "Ib"
        if p.theta == HALF_PI:
            return "IIa1"
        return "IIa"
    return "IIa1"


def classify_regime(p: OperatorParams) -> Regime:
    """Regime tag: I (virtual level), II (weighted CLR bound), III (log bound)."""
    if p.kappa_zero or p.beta_imag:
        return Regime.I
    if p.beta_zero:
        return Regime.I if p.theta == HALF_PI else Regime.III
    b = p.beta.real
    if b >= 0.5:
        return Regime.II if p.theta == HALF_PI else Regime.NOT_IN_M
    if p.theta == 0.0:
        return Regime.I
    return Regime.II


# ---------------------------------------------------------------------------
# Zero-energy solutions


def psi_zero_solutions(p: OperatorParams, r):
    """``(Psi_M(r), Psi_U(r))`` solving ``d Psi = 0``; arrays of shape ``r.shape + (2,)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    nu, kap, beta = p.nu, p.kappa, p.beta
    one = np.ones_like(r, dtype=complex)
    br = p.branch
    if br == "kappa0":
        ph = np.exp(-1j * nu * np.log(r))
        psi_m = np.stack([ph, -1j * ph], axis=-1)
        psi_u = np.stack([1 / ph, 1j / ph], axis=-1)
    elif br == "beta0":
        psi_m = np.stack([-nu * one, kap * one], axis=-1)
        lr = np.log(r)
        psi_u = np.stack([-nu * lr - nu / (2 * kap), kap * lr - 0.5], axis=-1)
    elif br == "minus_kappa":
        b = beta.real
        psi_m = np.stack([0 * one, b * r ** b], axis=-1)
        psi_u = np.stack([r ** (-b) * one, 0 * one], axis=-1)
    else:
        rb = np.exp(beta * np.log(r))
        psi_m = np.stack([kap * (kap + beta) * rb, -kap * nu * rb], axis=-1)
        if br == "real":
            psi_u = np.stack([nu / rb, (-kap - beta) / rb], axis=-1)
        else:
            psi_u = np.stack([kap * (kap - beta) / rb, -kap * nu / rb], axis=-1)
    return psi_m, psi_u


def boundary_combo(p: OperatorParams, r):
    """The vector paired with ``J f`` in the boundary condition at ``r``."""
    psi_m, psi_u = psi_zero_solutions(p, r)
    if p.imaginary_bc:
        return np.exp(1j * p.theta) * psi_u + np.exp(-1j * p.theta) * psi_m
    return p.cos_theta * psi_u + p.sin_theta * psi_m


def _residual_exponents(p: OperatorParams):
    """Correction terms of the boundary pairing near 0, as callables of r."""
    br = p.branch
    if br == "beta0":
        return [lambda r: r * np.log(r) ** 2, lambda r: r * np.log(r)]
    if br in ("kappa0", "imag"):
        b = p.beta if br == "imag" else 1j * abs(p.nu)
        return [lambda r, b=b: r ** (1 + b), lambda r, b=b: r ** (1 - b)]
    b = p.beta.real
    if b < 0.5:
        return [lambda r, b=b: r ** (1 - 2 * b), lambda r: r]
    return [lambda r, b=b: r ** (1 + 2 * b), lambda r, b=b: r ** (2 + 2 * b)]


def boundary_pairing(p: OperatorParams, r, values):
    """``<J f(r), combo(r)>`` pointwise (conjugate-linear in the first slot)."""
    values = np.asarray(values, dtype=complex)
    jf = np.stack([-values[..., 1], values[..., 0]], axis=-1)
    combo = boundary_combo(p, r)
    return np.sum(np.conj(jf) * combo, axis=-1)


def boundary_residual(p: OperatorParams, f: SpinorField, n_nodes: int = 3) -> float:
    """Limit ``r -> 0+`` of the boundary pairing, by extrapolation over the smallest nodes."""
    r = f.grid.r
    if r[0] > 1e-2:
        raise GridTooCoarse(f"smallest node {r[0]:.3g} > 1e-2; cannot extrapolate to r = 0")
    idx = np.arange(n_nodes)
    rs = r[idx]
    g = boundary_pairing(p, rs, f.values[idx])
    basis = [np.ones_like(rs, dtype=complex)] + [np.asarray(fn(rs), dtype=complex)
                                                  for fn in _residual_exponents(p)]
    A = np.stack(basis[:n_nodes], axis=1)
    coef = np.linalg.lstsq(A, g, rcond=None)[0]
    return float(abs(coef[0]))

