"""Virtual level at zero: the profile ``A_theta``, the criterion integrals and trial functions.

The trial functions are ``phi_n = U^*(lambda^-1 1_[1/n^2, 1/n])``.  Their kinetic
energy is ``ln n`` while ``<phi_n, V phi_n>`` grows faster in regime I, so the
form ``q_n = ln n - <phi_n, V phi_n>`` eventually turns negative.  ``n`` is
handled through ``k = log2 n`` so that very large ``n`` stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DivergentIntegral, GridTooCoarse, RegimeError
from .grids import RadialGrid, SpectralGrid, SpinorField, _gauss_panels
from .params import OperatorParams, Regime, classify_regime
from .spectral import density_unguarded, eigen_kernel

LN2 = math.log(2.0)
MAX_LOG2_N = 480  # keeps 1/n^2 above the double-precision underflow threshold
MIN_NODES = 16


class Verdict(str, Enum):
    NEGATIVE_SPECTRUM = "NEGATIVE_SPECTRUM"
    INCONCLUSIVE = "Inconclusive"


def _require_regime_one(p: OperatorParams):
    if classify_regime(p) is not Regime.I:
        raise RegimeError("the virtual-level profile exists only in regime I")


def a_theta_vector(p: OperatorParams, r):
    """Profile ``A_theta(r)``, shape ``r.shape + (2,)``."""
    _require_regime_one(p)
    r = np.asarray(r, dtype=float)
    nu, kap, th = p.nu, p.kappa, p.theta
    if p.kappa_zero:
        ph = np.exp(1j * (th + nu * np.log(r)))
        return np.stack([ph + np.conj(ph), 1j * ph - 1j * np.conj(ph)], axis=-1)
    if p.beta_zero:
        one = np.ones_like(r, dtype=complex)
        return np.stack([-nu * one, kap * one], axis=-1)
    if p.beta_imag:
        beta = p.beta
        rm = np.exp(-beta * np.log(r))
        rp = np.exp(beta * np.log(r))
        e = np.exp(1j * th)
        c1 = e * rm * kap
        c2 = rp * kap / e
        return np.stack([c1 * (kap - beta) + c2 * (kap + beta), -nu * (c1 + c2)], axis=-1)
    b = p.beta.real
    rb = r ** (-b)
    return np.stack([nu * rb, (-kap - b) * rb], axis=-1).astype(complex)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VirtualCriterion:
    a_integral: float
    abs_integral: float
    weight_integral: float

    @property
    def verdict(self) -> bool:
        finite = math.isfinite(self.abs_integral) and math.isfinite(self.weight_integral)
        return bool(self.a_integral > 0 and finite)

    def to_dict(self) -> dict:
        return {"a_integral": self.a_integral, "abs_integral": self.abs_integral,
                "weight_integral": self.weight_integral, "verdict": self.verdict}


def _support_grid(V, order: int = 16, per_unit: int = 16) -> RadialGrid:
    lo, hi = V.support()
    if lo <= 0:
        lo = 1e-12 * hi
    knots = sorted(set([lo, hi] + [k for k in V.breakpoints() if lo < k < hi]))
    edges = []
    for a, b in zip(knots[:-1], knots[1:]):
        n = max(2, math.ceil((b - a) * per_unit))
        edges += list(np.linspace(a, b, n + 1)[:-1])
    edges.append(hi)
    return RadialGrid.gauss(np.asarray(edges), order)


def _quad_form(vecs, mats):
    """``<v, M v>`` pointwise (conjugate-linear in the first slot)."""
    return np.einsum("...s,...st,...t->...", np.conj(vecs), mats, vecs)


def virtual_criterion(p: OperatorParams, V, rg: RadialGrid | None = None) -> VirtualCriterion:
    """The three integrals deciding the applicability of the virtual-level argument."""
    _require_regime_one(p)
    if V.is_zero:
        return VirtualCriterion(0.0, 0.0, 0.0)
    rg = rg or _support_grid(V)
    r, w = rg.r, rg.w
    A = a_theta_vector(p, r)
    vm = V.matrix(r)
    from .potentials import abs_value, op_norm

    a_int = float(np.sum(w * _quad_form(A, vm).real))
    abs_int = float(np.sum(w * _quad_form(A, abs_value(vm)).real))
    weight = float(np.sum(w * op_norm(vm) * r ** (2 - 2 * p.beta.real)))
    for name, val in (("abs_integral", abs_int), ("weight_integral", weight)):
        if not math.isfinite(val):
            raise DivergentIntegral(f"{name} diverges")
    return VirtualCriterion(a_int, abs_int, weight)


# ---------------------------------------------------------------------------
# trial functions


def _oscillation_rate(p: OperatorParams) -> float:
    rate = abs(p.nu) if p.kappa_zero else (abs(p.beta.imag) if p.beta_imag else 0.0)
    return max(rate, abs(p.nu))


def trial_spectral_grid(p: OperatorParams, log2_n: float, order: int = 8,
                        panel: float = 0.5) -> SpectralGrid:
    """Gauss panels in ``ln lambda`` over ``[1/n^2, 1/n]``; weights are for ``d lambda``."""
    L = log2_n * LN2
    width = panel / max(1.0, _oscillation_rate(p))
    npan = max(2, math.ceil(L / width))
    t, wt = _gauss_panels(np.linspace(-2 * L, -L, npan + 1), order)
    lam = np.exp(t)
    return SpectralGrid(lam, lam * wt, float(np.exp(-2 * L)), float(np.exp(-L)),
                        {"positive_only": True, "log2_n": log2_n, "order": order})


def _check_grid(sg: SpectralGrid, log2_n: float):
    L = log2_n * LN2
    lo, hi = math.exp(-2 * L), math.exp(-L)
    inside = (sg.lam >= lo * (1 - 1e-12)) & (sg.lam <= hi * (1 + 1e-12))
    if np.count_nonzero(inside) < MIN_NODES:
        raise GridTooCoarse(f"spectral grid has fewer than {MIN_NODES} nodes in [1/n^2, 1/n]")
    return inside


def trial_profile(sg: SpectralGrid, log2_n: float):
    """Spectral profile ``g(lambda) = lambda^-1`` on ``[1/n^2, 1/n]``, zero elsewhere."""
    inside = _check_grid(sg, log2_n)
    return np.where(inside, 1.0 / sg.lam, 0.0)


def test_function(p: OperatorParams, n: int | None = None, rg: RadialGrid | None = None,
                  sg: SpectralGrid | None = None, log2_n: float | None = None) -> SpinorField:
    """``phi_n`` sampled on ``rg`` by the adjoint transform of ``lambda^-1 1_[1/n^2, 1/n]``."""
    if log2_n is None:
        if n is None or n < 2:
            raise ValueError("n must be an integer >= 2")
        log2_n = math.log2(n)
    if rg is None:
        rg = RadialGrid.log_uniform(1e-3, 1e3, 512)
    if sg is None:
        sg = trial_spectral_grid(p, log2_n)
    g = trial_profile(sg, log2_n)
    keep = g != 0
    lam, w = sg.lam[keep], sg.w[keep]
    k = eigen_kernel(p, lam, rg.r)  # sqrt(m) Phi_0
    vals = np.einsum("jis,j->is", k, g[keep] * w)
    return SpinorField(rg, vals)


def kinetic_energy(sg: SpectralGrid, log2_n: float) -> float:
    """``int lambda |g|^2 dlambda`` by the grid quadrature (exactly ``ln n`` in the limit)."""
    g = trial_profile(sg, log2_n)
    return float(np.sum(sg.w * sg.lam * g * g))


def norm_squared(sg: SpectralGrid, log2_n: float) -> float:
    g = trial_profile(sg, log2_n)
    return float(np.sum(sg.w * g * g))


def v_form_space(p: OperatorParams, V, log2_n: float, sg: SpectralGrid | None = None,
                 rg: RadialGrid | None = None) -> float:
    """``<phi_n, V phi_n>`` by radial quadrature of the sampled trial function."""
    if V.is_zero:
        return 0.0
    rg = rg or _support_grid(V)
    phi = test_function(p, rg=rg, sg=sg, log2_n=log2_n).values
    return float(np.sum(rg.w * _quad_form(phi, V.matrix(rg.r)).real))


def v_form_spectral(p: OperatorParams, V, log2_n: float, order: int = 6, panel: float = 0.35,
                    rg: RadialGrid | None = None) -> float:
    """``<phi_n, V phi_n>`` as the double spectral integral of ``Phi_0^T V Phi_0``.

    Uses its own spectral and radial rules, independent of :func:`v_form_space`.
    """
    if V.is_zero:
        return 0.0
    sg = trial_spectral_grid(p, log2_n, order=order, panel=panel)
    rg = rg or _support_grid(V, order=10, per_unit=24)
    X = eigen_kernel(p, sg.lam, rg.r, weights=sg.w)  # sqrt(omega m) Phi_0, (j, i, s)
    h = np.sqrt(sg.w) / sg.lam  # sqrt(omega) g
    vm = V.matrix(rg.r) * rg.w[:, None, None]
    n = sg.n
    xf = np.ascontiguousarray(X.transpose(1, 2, 0)).reshape(-1, n)
    ys = np.einsum("ist,itk->isk", vm, xf.reshape(rg.n, 2, n)).reshape(-1, n)
    vt = xf.T @ np.ascontiguousarray(ys.real)
    if np.any(ys.imag):
        vt = vt + 1j * (xf.T @ np.ascontiguousarray(ys.imag))
    return float(np.real(h @ vt @ h))


def spectral_growth(p: OperatorParams, log2_n: float) -> float:
    """``int_{1/n^2}^{1/n} sqrt(m(lambda)) / lambda dlambda``."""
    sg = trial_spectral_grid(p, log2_n)
    m = density_unguarded(p, sg.lam).real
    return float(np.sum(sg.w * np.sqrt(m) / sg.lam))


# ---------------------------------------------------------------------------


@dataclass
class VirtualReport:
    verdict: Verdict
    first_log2_n: float | None
    table: list = field(default_factory=list)
    criterion: VirtualCriterion | None = None
    slope: float | None = None
    predicted_log2_n: float | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "first_log2_n": self.first_log2_n,
            "criterion": None if self.criterion is None else self.criterion.to_dict(),
            "q_n": self.table,
            "trend_ratio": self.slope,
            "predicted_log2_n": self.predicted_log2_n,
        }


def default_ladder(n_max: int = 2 ** 10, extend_to_log2: float | None = None):
    """Powers of two up to ``n_max``, then doubling exponents up to ``2^extend_to_log2``."""
    kmax = int(math.floor(math.log2(n_max)))
    ks = list(range(1, kmax + 1))
    if extend_to_log2 is not None:
        top = min(float(extend_to_log2), MAX_LOG2_N)
        k = float(kmax)
        while k * 2 <= top:
            k *= 2
            ks.append(k)
        if ks[-1] < top:
            ks.append(top)
    return ks


def detect_virtual_level(p: OperatorParams, V, n_max: int = 2 ** 10,
                         extend_to_log2: float | None = MAX_LOG2_N) -> VirtualReport:
    """Scan ``q_n = ln n - <phi_n, V phi_n>`` along a geometric ladder of ``n``.

    Stops at the first negative ``q_n``.  Without one, the verdict is
    inconclusive; the report then carries the ratio of ``<phi_n, V phi_n>`` to
    the squared growth integral and the ``log2 n`` at which that ratio would
    make ``q_n`` negative.  Outside regime I the table is still produced but
    no criterion is attached.
    """
    crit = virtual_criterion(p, V) if classify_regime(p) is Regime.I else None
    table = []
    if V.is_zero:
        for k in default_ladder(n_max, extend_to_log2):
            table.append({"log2_n": k, "ln_n": k * LN2, "v_form": 0.0, "q_n": k * LN2})
        return VirtualReport(Verdict.INCONCLUSIVE, None, table, crit)
    rg = _support_grid(V)
    ratio = None
    for k in default_ladder(n_max, extend_to_log2):
        vf = v_form_space(p, V, k, rg=rg)
        q = k * LN2 - vf
        growth = spectral_growth(p, k)
        ratio = vf / growth ** 2 if growth > 0 else None
        table.append({"log2_n": k, "ln_n": k * LN2, "v_form": vf, "q_n": q, "growth": growth})
        if q < 0:
            return VirtualReport(Verdict.NEGATIVE_SPECTRUM, k, table, crit, ratio)
    predicted = _predict_crossover(p, ratio) if ratio and ratio > 0 else None
    return VirtualReport(Verdict.INCONCLUSIVE, None, table, crit, ratio, predicted)


def _predict_crossover(p: OperatorParams, ratio: float):
    """Smallest ``log2 n`` with ``ratio * growth(n)^2 > ln n`` (growth evaluated exactly)."""
    k = 1.0
    while k <= MAX_LOG2_N:
        if ratio * spectral_growth(p, k) ** 2 > k * LN2:
            return k
        k *= 1.25
    return None


def space_norm2(p: OperatorParams, n: int, r_max: float | None = None) -> float:
    """``||phi_n||^2`` by radial quadrature of the sampled trial function.

    The cut-off defaults to ``10 n^2``, short of the length on which the
    discrete spectral sum starts to repeat itself.
    """
    r_max = r_max or 10.0 * n * n
    rg = RadialGrid.gauss_interval(1e-8, r_max, panel=2.0, order=8, log_below=1.0)
    return test_function(p, n, rg=rg).norm2()
