"""Birman-Schwinger counting of negative eigenvalues of the positively projected operator.

The projected operator ``P_E (D - V) P_E`` is discretised on the spectral side:
for positive nodes ``lambda_j`` with weights ``omega_j`` the basis functions
``sqrt(omega_j m_j) Phi_0(lambda_j; .)`` turn the form into the matrix
``H = diag(lambda) - Vt`` with

    Vt_jk = sum_i w_i X_i[:, j]^T V(r_i) X_i[:, k],
    X_i[s, j] = sqrt(omega_j m(lambda_j)) Phi_0(lambda_j; r_i)_s.

The Birman-Schwinger matrix is ``S Vt S`` with ``S = diag((lambda + tau)^-1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergentIntegral,
    NonConvergence,
    RegimeError,
    SizeError,
    UnboundedPotential,
)
from .grids import RadialGrid, SpectralGrid
from .params import HALF_PI, OperatorParams, Regime, classify_regime
from .potentials import PositivePart
from .spectral import eigen_kernel

MAX_MATRIX = 4096
TAU_MIN = 1e-8
STABLE_RUN = 3


# ---------------------------------------------------------------------------
# grids and the spectral-side basis


def counting_spectral_grid(E: float = math.inf, lam_min: float = 1e-4, lam_max: float = 50.0,
                           log_panels: int = 24, panel: float = 0.5, order: int = 4) -> SpectralGrid:
    """Positive spectral nodes on ``[lam_min, min(E, lam_max)]``.

    Geometric panels below 1 and panels of width ``<= panel`` above; ``E``
    is always a panel edge so the cut-off is exact.
    """
    top = min(E, lam_max)
    if top <= lam_min:
        raise ValueError("energy cut-off below the smallest spectral node")
    if top <= 1.0:
        edges = np.geomspace(lam_min, top, max(4, int(log_panels * math.log(top / lam_min) / math.log(1 / lam_min))) + 1)
    else:
        e1 = np.geomspace(lam_min, 1.0, log_panels + 1)
        e2 = np.linspace(1.0, top, max(1, math.ceil((top - 1.0) / panel)) + 1)
        edges = np.concatenate([e1[:-1], e2])
    from .grids import _gauss_panels

    x, w = _gauss_panels(edges, order)
    return SpectralGrid(x, w, lam_min, top, {"positive_only": True, "order": order,
                                             "panels": len(edges) - 1, "E": E})


def counting_radial_grid(potentials, lam_max: float, order: int = 4) -> RadialGrid:
    """Gauss panels covering the union of supports; breakpoints are panel edges.

    The panel width resolves the fastest oscillation ``exp(i lam_max r)``.
    """
    lo, hi = math.inf, 0.0
    pts = []
    for V in potentials:
        if V.is_zero:
            continue
        a, b = V.support()
        lo, hi = min(lo, a), max(hi, b)
        pts += V.breakpoints()
    if hi <= 0:
        return RadialGrid.gauss(np.array([0.5, 1.0]), order)
    h = math.pi / (4 * lam_max)
    edges = []
    if lo <= 0:
        lo = hi * 1e-8
        edges += list(np.geomspace(lo, min(h, hi), 24)[:-1])
        lo = min(h, hi)
    knots = sorted(set([lo, hi] + [p for p in pts if lo < p < hi]))
    for a, b in zip(knots[:-1], knots[1:]):
        n = max(1, math.ceil((b - a) / h))
        edges += list(np.linspace(a, b, n + 1)[:-1])
    edges.append(hi)
    return RadialGrid.gauss(np.asarray(edges), order)


@dataclass
class SpectralBasis:
    """Sampled basis ``X`` (n_r, 2, n_lam) for one operator and one pair of grids."""

    params: OperatorParams
    sg: SpectralGrid
    rg: RadialGrid
    X: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: OperatorParams, sg: SpectralGrid, rg: RadialGrid) -> "SpectralBasis":
        if sg.n > MAX_MATRIX:
            raise SizeError(f"{sg.n} spectral nodes exceed the configured maximum {MAX_MATRIX}")
        if np.any(sg.lam <= 0):
            raise ValueError("counting needs positive spectral nodes only")
        k = eigen_kernel(p, sg.lam, rg.r, weights=sg.w)
        return cls(p, sg, rg, np.ascontiguousarray(k.transpose(1, 2, 0)))

    @property
    def lam(self):
        return self.sg.lam

    def form_matrix(self, V) -> np.ndarray:
        """``Vt`` for a potential sampled on the radial grid (Hermitian, n_lam x n_lam)."""
        n = self.sg.n
        if V.is_zero:
            return np.zeros((n, n), complex)
        vm = V.matrix(self.rg.r) * self.rg.w[:, None, None]
        y = np.einsum("ist,itk->isk", vm, self.X).reshape(-1, n)
        xf = self.X.reshape(-1, n)
        vt = xf.T @ np.ascontiguousarray(y.real)
        if np.any(y.imag):
            vt = vt + 1j * (xf.T @ np.ascontiguousarray(y.imag))
        return (vt + vt.conj().T) / 2


def default_basis(p: OperatorParams, potentials, E: float = math.inf, **grid_kw) -> SpectralBasis:
    sg = counting_spectral_grid(E, **grid_kw)
    rg = counting_radial_grid(potentials, sg.lam_max)
    return SpectralBasis.build(p, sg, rg)


# ---------------------------------------------------------------------------
# Birman-Schwinger matrix and counts


@dataclass(frozen=True)
class BSMatrix:
    matrix: np.ndarray = field(repr=False)
    tau: float
    E: float
    lam: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def count_above_one(self) -> int:
        return int(np.sum(self.eigenvalues() > 1.0))


def _restrict(basis: SpectralBasis, vt: np.ndarray, E: float):
    lam = basis.lam
    if math.isfinite(E):
        keep = lam < E
        return lam[keep], vt[np.ix_(keep, keep)]
    return lam, vt


def bs_from_form(lam, vt, tau: float, E: float = math.inf) -> BSMatrix:
    if not tau > 0:
        raise ValueError("tau must be positive")
    s = 1.0 / np.sqrt(lam + tau)
    return BSMatrix(s[:, None] * vt * s[None, :], float(tau), E, lam)


def assemble_bs(p: OperatorParams, V, tau: float, E: float = math.inf,
                sg: SpectralGrid | None = None, rg: RadialGrid | None = None,
                basis: SpectralBasis | None = None) -> BSMatrix:
    """Birman-Schwinger matrix of ``V`` at spectral shift ``tau`` and cut-off ``E``."""
    if basis is None:
        sg = sg or counting_spectral_grid(E)
        rg = rg or counting_radial_grid([V], sg.lam_max)
        basis = SpectralBasis.build(p, sg, rg)
    lam, vt = _restrict(basis, basis.form_matrix(V), E)
    return bs_from_form(lam, vt, tau, E)


def dense_count(lam, vt, tau: float) -> int:
    """Eigenvalues of ``diag(lam) - Vt`` strictly below ``-tau`` (direct form discretisation)."""
    ev = np.linalg.eigvalsh(np.diag(lam).astype(complex) - vt)
    return int(np.sum(ev < -tau))


def dense_spectrum(lam, vt):
    return np.linalg.eigvalsh(np.diag(lam).astype(complex) - vt)


@dataclass(frozen=True)
class TauTrace:
    taus: tuple
    counts: tuple
    converged: bool


def count_from_form(lam, vt, tau: float | None = None, tau_min: float = TAU_MIN,
                    stable: int = STABLE_RUN, tau_floor: float | None = None):
    """Count with a fixed ``tau``, or take the limit ``tau -> 0`` along ``tau_k = 2^-k``.

    The limit is accepted once ``stable`` consecutive counts agree with all of
    them at ``tau <= tau_floor`` (default: the smallest spectral node, below
    which the grid cannot resolve binding energies).
    """
    if tau is not None:
        return bs_from_form(lam, vt, tau).count_above_one(), TauTrace((tau,), (None,), True)
    if tau_floor is None:
        tau_floor = float(np.min(lam))
    taus, counts = [], []
    k = 0
    while True:
        t = 2.0 ** (-k)
        if t < tau_min:
            raise NonConvergence(f"count did not stabilise before tau = {tau_min:g}: "
                                 f"last counts {counts[-stable:]}")
        c = bs_from_form(lam, vt, t).count_above_one()
        taus.append(t)
        counts.append(c)
        if (len(counts) >= stable and taus[-stable] <= tau_floor
                and len(set(counts[-stable:])) == 1):
            return c, TauTrace(tuple(taus), tuple(counts), True)
        k += 1


def count_negative(p: OperatorParams, V, tau: float | None = None, E: float = math.inf,
                   basis: SpectralBasis | None = None, trace: bool = False):
    """Number of negative eigenvalues of ``P_E (D - V) P_E`` (below ``-tau`` if given)."""
    if V.is_zero:
        return (0, TauTrace((), (), True)) if trace else 0
    if basis is None:
        basis = default_basis(p, [V], E)
    lam, vt = _restrict(basis, basis.form_matrix(V), E)
    c, tr = count_from_form(lam, vt, tau)
    return (c, tr) if trace else c


def first_eigenvalue_coupling(p: OperatorParams, V, E: float = math.inf,
                              basis: SpectralBasis | None = None, tau: float = TAU_MIN) -> float:
    """Smallest ``alpha`` with a negative eigenvalue of the projected ``D - alpha V`` below ``-tau``.

    The Birman-Schwinger eigenvalues are linear in ``alpha``, so this is the
    reciprocal of the largest one for ``V`` itself; ``inf`` when none is positive.
    """
    if V.is_zero:
        return math.inf
    if basis is None:
        basis = default_basis(p, [V], E)
    lam, vt = _restrict(basis, basis.form_matrix(V), E)
    mu = float(bs_from_form(lam, vt, tau).eigenvalues()[-1])
    return math.inf if mu <= 0 else 1.0 / mu


def energy_split_count(p: OperatorParams, V, basis: SpectralBasis | None = None,
                       tau: float | None = None) -> int:
    """Count for ``2 V_+`` with the cut-off ``E = 2 sup ||V_+||``; an upper bound for ``V``."""
    try:
        sup = V.sup_norm_plus()
    except UnboundedPotential:
        raise
    if not math.isfinite(sup):
        raise UnboundedPotential("V_+ is unbounded")
    if sup == 0:
        return 0
    W = PositivePart(V, 2.0)
    E = 2.0 * sup
    if basis is None:
        basis = default_basis(p, [V], E)
    return count_negative(p, W, tau=tau, E=E, basis=basis)


# ---------------------------------------------------------------------------
# bounds


def _cot(theta: float) -> float:
    return 0.0 if theta == HALF_PI else math.cos(theta) / math.sin(theta)


def clr_weight(p: OperatorParams, q: float, r, C_q: float = 1.0):
    """Two-branch weight with crossover at ``r0 = |cot theta|^(1/(2 beta))``."""
    if classify_regime(p) is not Regime.II:
        raise RegimeError("the weighted bound needs a regime-II parameter triple")
    b = p.beta.real
    if not (1.0 < q < 1.0 + 2 * b):
        raise RegimeError(f"q must lie in (1, {1 + 2 * b:g})")
    r = np.asarray(r, dtype=float)
    ct = abs(_cot(p.theta))
    if ct == 0.0:
        return C_q * r ** (q - 1)
    r0 = ct ** (1 / (2 * b))
    inner = ct ** (1 + (q - 1) / (2 * b)) * r ** (-2 * b)
    outer = r ** (q - 1)
    out = np.where(r <= r0, inner, outer)
    return C_q * (out[()] if out.ndim == 0 else out)


def clr_crossover(p: OperatorParams) -> float:
    ct = abs(_cot(p.theta))
    return 0.0 if ct == 0 else ct ** (1 / (2 * p.beta.real))


def _integrate(V, integrand, extra_knots=(), order: int = 16, panels_per_unit: int = 32):
    """Gauss quadrature of ``integrand(r, ||V_+(r)||)`` over the support of ``V``."""
    if V.is_zero:
        return 0.0
    lo, hi = V.support()
    if lo <= 0:
        lo = 1e-12 * hi
    knots = sorted(set([lo, hi] + [k for k in list(V.breakpoints()) + list(extra_knots) if lo < k < hi]))
    edges = []
    for a, b in zip(knots[:-1], knots[1:]):
        n = max(2, math.ceil((b - a) * panels_per_unit))
        edges += list(np.linspace(a, b, n + 1)[:-1])
    edges.append(hi)
    from .grids import _gauss_panels

    r, w = _gauss_panels(np.asarray(edges), order)
    vals = integrand(r, V.norm_plus(r))
    total = float(np.sum(w * vals))
    if not math.isfinite(total):
        raise DivergentIntegral("bound integrand is not integrable on the support")
    return total


def bound_rhs_II(p: OperatorParams, V, q: float, C_q: float = 1.0) -> float:
    """``int ||V_+||^q W_{theta,q} dr``."""
    clr_weight(p, q, 1.0)  # validates regime and q
    return _integrate(V, lambda r, n: n ** q * clr_weight(p, q, r, C_q),
                      extra_knots=[clr_crossover(p)])


def bound_rhs_III(p: OperatorParams, V, K: float = 1.0) -> float:
    """``K int ||V_+|| (ln^2(e^tan(theta) r) + ln^2(e + 2 r sup||V_+||)) dr``."""
    if classify_regime(p) is not Regime.III:
        raise RegimeError("the logarithmic bound needs a regime-III parameter triple")
    if V.is_zero:
        return 0.0
    sup = V.sup_norm_plus()
    t = math.tan(p.theta)
    return K * _integrate(V, lambda r, n: n * ((t + np.log(r)) ** 2 + np.log(math.e + 2 * r * sup) ** 2))


def lt_weight(p: OperatorParams, r):
    """Weight of the Lieb-Thirring-type bound (three branches)."""
    r = np.asarray(r, dtype=float)
    one = np.ones_like(r)
    if p.kappa_zero or p.beta_imag:
        out = one
    elif p.beta_zero:
        if p.theta == HALF_PI:
            out = one
        else:
            out = np.maximum(-(math.tan(p.theta) + np.log(r)), 1.0) ** 2
    else:
        b = p.beta.real
        if b < 0.5 and p.theta == 0.0:
            raise RegimeError("beta in (0, 1/2) with theta = 0 uses the modified bound")
        out = np.maximum(1.0, abs(_cot(p.theta)) * r ** (-2 * b))
    return out[()] if out.ndim == 0 else out


def lt_modified_case(p: OperatorParams) -> bool:
    return p.beta_pos and p.beta.real < 0.5 and p.theta == 0.0


def lt_bound_rhs(p: OperatorParams, V, gamma: float, K: float = 1.0) -> float:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if lt_modified_case(p):
        b = p.beta.real
        if not gamma > 2 * b:
            raise RegimeError(f"the modified bound needs gamma > 2 beta = {2 * b:g}")
        return K * (_integrate(V, lambda r, n: n ** (1 + gamma - 2 * b) * r ** (-2 * b))
                    + _integrate(V, lambda r, n: n ** (1 + gamma)))
    return K * _integrate(V, lambda r, n: n ** (1 + gamma) * lt_weight(p, r))


# ---------------------------------------------------------------------------
# Lieb-Thirring sums by the layer-cake formula


def _locate_jumps(count_at, lo, hi, c_lo, c_hi, rel, out):
    """Bisect ``[lo, hi]`` (geometrically) until every jump of the count is bracketed."""
    if c_lo == c_hi:
        return
    if hi / lo - 1 <= rel:
        out.append((math.sqrt(lo * hi), c_lo - c_hi))
        return
    mid = math.sqrt(lo * hi)
    c_mid = count_at(mid)
    _locate_jumps(count_at, lo, mid, c_lo, c_mid, rel, out)
    _locate_jumps(count_at, mid, hi, c_mid, c_hi, rel, out)


def layer_cake(count_at, gamma: float, tau_grid, rel: float = 1e-5):
    """``int gamma tau^(gamma-1) N(tau) dtau`` for a non-increasing step function ``N``.

    ``N`` is sampled on ``tau_grid`` (increasing) and its jumps are refined by
    bisection, so each level ``e`` in ``(tau_0, tau_max)`` contributes ``e^gamma``
    up to ``rel`` in its position.  Levels below ``tau_0`` are not seen; the
    grid must reach above the largest level.
    """
    taus = np.asarray(tau_grid, float)
    counts = [count_at(t) for t in taus]
    if counts[-1] != 0:
        raise ValueError(f"{counts[-1]} levels lie above the top of the tau grid")
    jumps = []
    for i in range(len(taus) - 1):
        _locate_jumps(count_at, taus[i], taus[i + 1], counts[i], counts[i + 1], rel, jumps)
    total = sum(mult * t ** gamma for t, mult in jumps)
    return total, counts


def lt_sum(p: OperatorParams, V, gamma: float, tau_grid=None, E: float = math.inf,
           basis: SpectralBasis | None = None) -> float:
    """``sum |e|^gamma`` over negative eigenvalues, via Birman-Schwinger counts over ``tau``."""
    if V.is_zero:
        return 0.0
    if basis is None:
        basis = default_basis(p, [V], E)
    lam, vt = _restrict(basis, basis.form_matrix(V), E)
    if tau_grid is None:
        top = max(float(np.linalg.norm(vt, 2)), 1e-12) * 1.01
        tau_grid = np.geomspace(top * 1e-6, top, 48)
    total, _ = layer_cake(lambda t: bs_from_form(lam, vt, t).count_above_one(), gamma, tau_grid)
    return float(total)


# ---------------------------------------------------------------------------
# constant fitting


@dataclass(frozen=True)
class FitResult:
    constant: float
    ratios: tuple
    description: str = ""


def fit_constants(values, integrals, description: str = "") -> FitResult:
    """Smallest ``C`` with ``value_k <= C * integral_k`` over the family.

    ``values`` are counts (or eigenvalue sums), ``integrals`` the bound
    integrals evaluated with unit constant.
    """
    values = np.asarray(values, float)
    integrals = np.asarray(integrals, float)
    if values.shape != integrals.shape:
        raise ValueError("values and integrals must match")
    ratios = []
    for v, i in zip(values, integrals):
        if v <= 0:
            ratios.append(0.0)
        elif i <= 0:
            ratios.append(math.inf)
        else:
            ratios.append(v / i)
    c = max(ratios) if ratios else 0.0
    return FitResult(float(c), tuple(ratios), description)


@dataclass(frozen=True)
class CountReport:
    count: int
    bound_value: float
    regime: str
    params: dict
    margin: float

    def to_dict(self) -> dict:
        return {"count": self.count, "bound_value": self.bound_value, "regime": self.regime,
                "params": self.params, "margin": self.margin}


def count_report(p: OperatorParams, V, q: float | None = None, constant: float | None = None,
                 tau: float | None = None, E: float = math.inf,
                 basis: SpectralBasis | None = None) -> CountReport:
    """Count plus the regime's bound (``nan`` when no constant is supplied or no bound applies)."""
    reg = classify_regime(p)
    count = count_negative(p, V, tau=tau, E=E, basis=basis)
    bound = math.nan
    if constant is not None:
        if reg is Regime.II:
            qq = q if q is not None else 1 + p.beta.real
            bound = bound_rhs_II(p, V, qq, constant)
        elif reg is Regime.III:
            bound = bound_rhs_III(p, V, constant)
    return CountReport(count, bound, reg.value,
                       {"nu": p.nu, "kappa": p.kappa, "theta": p.theta}, bound - count)
