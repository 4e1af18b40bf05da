"""Two-dimensional Coulomb-Dirac operators split into half-line channels.

A spinor ``u = (v, w)`` on the plane is mapped channel by channel to
``kappa -> (v_{kappa-1/2}, i w_{kappa+1/2})`` with the angular Fourier modes
``u_m(r) = sqrt(r / 2 pi) int u(r, phi) e^{-i m phi} dphi``.  Channel ``kappa``
of the operator is the half-line operator with parameters
``(nu, kappa, theta(kappa))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from .errors import (
    ChannelCutTooSmall,
    ConfigError,
    MissingEnvelope,
)
from .grids import RadialGrid, _gauss_panels
from .params import HALF_PI, OperatorParams, Regime, classify_regime, make_params
from .potentials import FunctionPotential, PotentialSpec, herm2_eig
from .spectral import eigen_kernel

N_PHI = 64


# ---------------------------------------------------------------------------
# constants


def kappa_nu(nu: float) -> float:
    """Smallest half-integer ``kappa > 0`` with ``kappa^2 > nu^2 + 1/4``."""
    k = 0.5
    while not k * k > nu * nu + 0.25:
        k += 1.0
    return k


def f_nu(nu: float, b):
    k2 = kappa_nu(nu) ** 2
    return (k2 - 0.25) ** 2 * b * b + 2 * (k2 + 0.25) * nu ** 2 * b + nu ** 4 - 4 * nu ** 2 * k2


def c_nu(nu: float) -> float:
    """Comparison constant ``C^nu`` between high channels with and without Coulomb term."""
    if nu == 0:
        return 1.0
    k2 = kappa_nu(nu) ** 2
    root = math.sqrt(1 + (4 * k2 - nu * nu) * (k2 - 0.25) ** 2 / ((k2 + 0.25) ** 2 * nu * nu))
    return 1 - nu * nu * (k2 + 0.25) / (k2 - 0.25) ** 2 * (root - 1)


def herbst_k() -> float:
    """Sharp constant in ``(-Delta)^{1/2} >= K / |x|`` on the plane."""
    return float(2 * gamma(0.75) ** 2 / gamma(0.25) ** 2)


# ---------------------------------------------------------------------------
# theta maps


def _half_integer(k) -> float:
    k = float(k)
    if abs(k - round(k - 0.5) - 0.5) > 1e-12:
        raise ConfigError(f"channel index {k} is not a half-integer")
    return round(k - 0.5) + 0.5


@dataclass(frozen=True)
class ThetaMap:
    """Boundary angles per channel; channels not listed use ``pi/2``."""

    nu: float
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, th in self.entries.items():
            k = _half_integer(k)
            th = float(th)
            if k * k >= self.nu ** 2 + 0.25 and abs(th - HALF_PI) > 1e-12:
                raise ConfigError(f"channel {k} needs theta = pi/2 (kappa^2 >= nu^2 + 1/4)")
            make_params(self.nu, k, th)
            clean[k] = th
        object.__setattr__(self, "entries", clean)

    @classmethod
    def distinguished(cls, nu: float) -> "ThetaMap":
        return cls(nu, {})

    @classmethod
    def from_dict(cls, data: dict) -> "ThetaMap":
        try:
            nu = float(data["nu"])
            entries = {float(k): float(v) for k, v in data.get("theta", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad theta map: {exc}") from None
        return cls(nu, entries)

    def to_dict(self) -> dict:
        return {"nu": self.nu, "theta": {str(k): v for k, v in sorted(self.entries.items())}}

    def __call__(self, kappa: float) -> float:
        return self.entries.get(_half_integer(kappa), HALF_PI)

    def params(self, kappa: float) -> OperatorParams:
        return make_params(self.nu, _half_integer(kappa), self(kappa))


def channels(kappa_cut: float):
    """Half-integers ``kappa`` with ``|kappa| <= kappa_cut``, ordered by ``|kappa|``."""
    out = []
    k = 0.5
    while k <= kappa_cut + 1e-12:
        out += [k, -k]
        k += 1.0
    return out


# ---------------------------------------------------------------------------
# planar potentials

POTENTIAL2D_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["radial", "terms", "polar"]},
        "profile": {"type": "object"},
        "terms": {"type": "array"},
        "r": {"type": "array", "items": {"type": "number"}},
        "phi": {"type": "array", "items": {"type": "number"}},
        "re": {"type": "array"},
        "im": {"type": "array"},
        "envelope": {"type": "object"},
    },
}


@dataclass(frozen=True)
class Potential2D:
    """Hermitian ``Q(r, phi)`` (vectorised, shape ``(..., 2, 2)``) with a radial support.

    ``envelope`` is an optional scalar radial potential ``R`` with ``Q <= R I``.
    """

    fn: object = field(repr=False)
    support_interval: tuple
    envelope: PotentialSpec | FunctionPotential | None = None
    knots: tuple = ()
    zero: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.zero:
            return
        r, phi = self._sample_points(9, 16)
        q = self(r, phi)
        if not np.allclose(q, np.conj(np.swapaxes(q, -1, -2)), atol=1e-12, rtol=0):
            raise ConfigError("Q must be Hermitian")
        if self.envelope is not None:
            gap = self.envelope_gap(41, 32)
            if gap < -1e-10:
                raise ConfigError(f"envelope does not dominate Q (gap {gap:.3g})")

    def _sample_points(self, nr, nphi):
        lo, hi = self.support_interval
        r = np.linspace(max(lo, 1e-9 * hi), hi, nr)
        phi = 2 * np.pi * np.arange(nphi) / nphi
        return np.meshgrid(r, phi, indexing="ij")

    def __call__(self, r, phi):
        r = np.asarray(r, float)
        phi = np.asarray(phi, float)
        r, phi = np.broadcast_arrays(r, phi)
        out = np.zeros(r.shape + (2, 2), complex)
        if self.zero:
            return out
        lo, hi = self.support_interval
        inside = (r >= lo) & (r <= hi)
        if np.any(inside):
            out[inside] = np.asarray(self.fn(r[inside], phi[inside]), complex)
        return out

    @property
    def is_zero(self) -> bool:
        return self.zero

    def envelope_gap(self, nr=201, nphi=N_PHI) -> float:
        """``min (R - lambda_max(Q))`` over a polar sample grid."""
        r, phi = self._sample_points(nr, nphi)
        top = herm2_eig(self(r, phi))[1]
        return float(np.min(self.envelope.matrix(r[:, 0])[:, 0, 0].real[:, None] - top))

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero_potential(cls) -> "Potential2D":
        return cls(None, (0.0, 0.0), PotentialSpec.zero(), zero=True)

    @classmethod
    def radial(cls, R: PotentialSpec) -> "Potential2D":
        """``Q = R(|x|) I``; its own envelope."""
        if R.is_zero:
            return cls.zero_potential()
        if R.kind != "scalar_radial":
            raise ConfigError("radial planar potentials need a scalar profile")
        return cls(lambda r, phi: R.matrix(r), R.support(), R, tuple(R.breakpoints()),
                   meta={"kind": "radial", "profile": R.to_dict()})

    @classmethod
    def from_terms(cls, terms, envelope=None) -> "Potential2D":
        """Sum of ``f(r) [[a, b e^{-i m phi}], [conj(b) e^{i m phi}, d]]``.

        Each term is a dict with a scalar ``profile`` (potential dict) and
        optional ``a``, ``d`` (real), ``b`` (``[re, im]``) and ``mode`` ``m``.
        """
        parsed = []
        lo, hi, knots = math.inf, 0.0, []
        for t in terms:
            prof = PotentialSpec.from_dict(t["profile"])
            if prof.kind != "scalar_radial":
                raise ConfigError("term profiles must be scalar")
            b = t.get("b", [0.0, 0.0])
            b = complex(b[0], b[1]) if isinstance(b, (list, tuple)) else complex(b)
            parsed.append((prof, float(t.get("a", 0.0)), b, float(t.get("d", 0.0)),
                           int(t.get("mode", 0))))
            if not prof.is_zero:
                a_, b_ = prof.support()
                lo, hi = min(lo, a_), max(hi, b_)
                knots += prof.breakpoints()
        if hi == 0.0:
            return cls.zero_potential()

        def fn(r, phi):
            out = np.zeros(r.shape + (2, 2), complex)
            for prof, a, b, d, m in parsed:
                f = prof.matrix(r)[..., 0, 0]
                e = np.exp(-1j * m * phi)
                out[..., 0, 0] += f * a
                out[..., 1, 1] += f * d
                out[..., 0, 1] += f * b * e
                out[..., 1, 0] += f * np.conj(b) * np.conj(e)
            return out

        env = PotentialSpec.from_dict(envelope) if isinstance(envelope, dict) else envelope
        return cls(fn, (lo, hi), env, tuple(knots),
                   meta={"kind": "terms", "terms": list(terms)})

    @classmethod
    def from_polar_samples(cls, r, phi, values, envelope=None) -> "Potential2D":
        """Samples ``values[i, j] = Q(r_i, phi_j)`` on a polar grid; uniform ``phi`` nodes.

        Linear interpolation in ``r`` and periodic linear interpolation in ``phi``.
        """
        r = np.asarray(r, float)
        phi = np.asarray(phi, float)
        vals = np.asarray(values, complex)
        if vals.shape != (r.size, phi.size, 2, 2):
            raise ConfigError("polar samples need shape (n_r, n_phi, 2, 2)")
        if r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0:
            raise ConfigError("radial nodes must be positive and increasing")
        dphi = 2 * np.pi / phi.size
        if not np.allclose(phi, phi[0] + dphi * np.arange(phi.size), atol=1e-9):
            raise ConfigError("angular nodes must be uniform over a full period")
        if not np.allclose(vals, np.conj(np.swapaxes(vals, -1, -2)), atol=1e-12):
            raise ConfigError("sampled Q must be Hermitian")

        def fn(rr, pp):
            x = (pp - phi[0]) / dphi
            j0 = np.floor(x).astype(int)
            s = x - j0
            j0 %= phi.size
            j1 = (j0 + 1) % phi.size
            i = np.clip(np.searchsorted(r, rr) - 1, 0, r.size - 2)
            t = ((rr - r[i]) / (r[i + 1] - r[i]))[..., None, None]
            s = s[..., None, None]
            lo_ = vals[i, j0] * (1 - s) + vals[i, j1] * s
            hi_ = vals[i + 1, j0] * (1 - s) + vals[i + 1, j1] * s
            return lo_ * (1 - t) + hi_ * t

        env = PotentialSpec.from_dict(envelope) if isinstance(envelope, dict) else envelope
        return cls(fn, (float(r[0]), float(r[-1])), env, tuple(r.tolist()),
                   meta={"kind": "polar"})

    @classmethod
    def from_dict(cls, data: dict) -> "Potential2D":
        kind = data.get("kind")
        env = data.get("envelope")
        if kind == "radial":
            return cls.radial(PotentialSpec.from_dict(data["profile"]))
        if kind == "terms":
            return cls.from_terms(data["terms"], env)
        if kind == "polar":
            vals = np.asarray(data["re"], float) + 1j * np.asarray(data.get("im", 0.0), float)
            return cls.from_polar_samples(data["r"], data["phi"], vals, env)
        raise ConfigError(f"unknown planar potential kind {kind!r}")

    def with_envelope(self, R) -> "Potential2D":
        return Potential2D(self.fn, self.support_interval, R, self.knots, self.zero, self.meta)

    def scaled(self, alpha: float) -> "Potential2D":
        if self.zero:
            return self
        fn = self.fn
        env = None if self.envelope is None else self.envelope.scaled(alpha)
        return Potential2D(lambda r, phi: alpha * fn(r, phi), self.support_interval, env,
                           self.knots, False, self.meta)


def auto_envelope(Q: Potential2D, nr: int = 401, nphi: int = N_PHI) -> PotentialSpec:
    """Tabulated ``R(r) = max(0, max_phi lambda_max Q(r, phi))``, raised slightly to dominate."""
    if Q.is_zero:
        return PotentialSpec.zero()
    lo, hi = Q.support_interval
    r = np.linspace(max(lo, 1e-9 * hi), hi, nr)
    phi = 2 * np.pi * np.arange(4 * nphi) / (4 * nphi)
    top = herm2_eig(Q(r[:, None], phi[None, :]))[1].max(axis=1)
    top = np.maximum(top, 0.0)
    # linear interpolation between nodes may dip below the sampled maximum
    top = np.maximum.reduce([top, np.r_[top[1:], 0.0], np.r_[0.0, top[:-1]]])
    return PotentialSpec("scalar_radial", ({"type": "table", "r": r.tolist(), "values": top.tolist()},))


# ---------------------------------------------------------------------------
# channel reduction


def channel_matrix(Q: Potential2D, r, n_phi: int = N_PHI):
    """Angular average of ``[[Q11, -i Q12 e^{i phi}], [i Q21 e^{-i phi}, Q22]]`` at radii ``r``."""
    r = np.asarray(r, float)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    q = Q(r[..., None], phi)
    e = np.exp(1j * phi)
    out = np.empty(r.shape + (2, 2), complex)
    out[..., 0, 0] = q[..., 0, 0].mean(-1)
    out[..., 1, 1] = q[..., 1, 1].mean(-1)
    out[..., 0, 1] = (-1j * q[..., 0, 1] * e).mean(-1)
    out[..., 1, 0] = (1j * q[..., 1, 0] / e).mean(-1)
    return out


def channel_potential(Q: Potential2D, n_phi: int = N_PHI) -> FunctionPotential:
    """The half-line potential seen by a single angular-momentum channel.

    The trapezoidal rule in ``phi`` is exact for angular modes below ``n_phi``.
    Use ``.to_spec()`` for a tabulated copy.
    """
    if Q.is_zero:
        return FunctionPotential(lambda r: np.zeros(np.shape(r) + (2, 2)), (0.0, 0.0), zero=True)
    return FunctionPotential(lambda r: channel_matrix(Q, r, n_phi), Q.support_interval, Q.knots)


def corollary_integral(V, order: int = 16) -> float:
    """``int <(-1, 1), V(r) (-1, 1)> dr`` for a channel potential."""
    from .counting import _integrate

    if V.is_zero:
        return 0.0
    e = np.array([-1.0, 1.0])
    return _integrate(V, lambda r, _: np.einsum("s,...st,t->...", e, V.matrix(r), e).real)


def trace_square_integral(Q: Potential2D, n_r: int = 400, n_phi: int = N_PHI) -> float:
    """``int tr(Q_+)^2 dx`` over the plane (report-only comparison quantity)."""
    from .potentials import positive_part

    if Q.is_zero:
        return 0.0
    lo, hi = Q.support_interval
    r, wr = _gauss_panels(np.linspace(lo, hi, n_r // 8 + 1), 8)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    qp = positive_part(Q(r[:, None], phi[None, :]))
    tr = np.trace(qp, axis1=-2, axis2=-1).real
    return float(np.sum(wr[:, None] * r[:, None] * tr ** 2) * 2 * np.pi / n_phi)


def polar_grid(r_max: float, n_r: int = 200, n_phi: int = N_PHI, order: int = 8,
               r_min: float = 0.0):
    """Gauss panels in ``r`` times uniform ``phi``; weights carry the area element ``r``."""
    nr_pan = max(1, n_r // order)
    r, wr = _gauss_panels(np.linspace(r_min, r_max, nr_pan + 1), order)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    return r, wr, phi, 2 * np.pi / n_phi


def angular_decomposition(u, r, phi, kappa_max: float):
    """Channel components of a planar spinor sampled as ``u[i, j, s] = u_s(r_i, phi_j)``.

    Returns ``{kappa: array (n_r, 2)}`` for ``|kappa| <= kappa_max``.
    """
    u = np.asarray(u, complex)
    n_phi = phi.size
    # u_m(r) = sqrt(r / 2 pi) int u e^{-i m phi} dphi, by FFT (uniform phi from 0)
    modes = np.fft.fft(u, axis=1) * (2 * np.pi / n_phi) * np.sqrt(r / (2 * np.pi))[:, None, None]

    def mode(m, s):
        return modes[:, m % n_phi, s]

    out = {}
    for k in channels(kappa_max):
        out[k] = np.stack([mode(int(k - 0.5), 0), 1j * mode(int(k + 0.5), 1)], axis=-1)
    return out


def channel_spinor(psi, kappa: float, r, phi):
    """Inverse decomposition of a single channel: planar samples ``(n_r, n_phi, 2)``.

    ``psi`` is ``(n_r, 2)`` sampled at ``r``.
    """
    pref = 1.0 / np.sqrt(2 * np.pi * r)
    v = (pref * psi[:, 0])[:, None] * np.exp(1j * (kappa - 0.5) * phi)[None, :]
    w = (-1j * pref * psi[:, 1])[:, None] * np.exp(1j * (kappa + 0.5) * phi)[None, :]
    return np.stack([v, w], axis=-1)


def decomposition_defect(u_fn, r_max: float, kappa_max: float = 20.5, n_r: int = 400,
                         n_phi: int = 128, n_cart: int = 400) -> float:
    """Relative gap between ``sum_kappa ||(A u)_kappa||^2`` and ``||u||^2``.

    ``u_fn(x, y) -> (..., 2)``.  The channel side uses a polar grid; the
    planar norm uses an independent Cartesian midpoint rule.
    """
    r, wr, phi, _ = polar_grid(r_max, n_r, n_phi)
    x = r[:, None] * np.cos(phi)[None, :]
    y = r[:, None] * np.sin(phi)[None, :]
    comp = angular_decomposition(u_fn(x, y), r, phi, kappa_max)
    chan = sum(float(np.sum(wr[:, None] * np.abs(c) ** 2)) for c in comp.values())
    h = 2 * r_max / n_cart
    g = -r_max + h * (np.arange(n_cart) + 0.5)
    X, Y = np.meshgrid(g, g, indexing="ij")
    vals = u_fn(X, Y)
    inside = (X ** 2 + Y ** 2 <= r_max ** 2)[..., None]
    planar = float(np.sum(np.abs(vals * inside) ** 2) * h * h)
    return abs(chan - planar) / planar


# -- the full planar form on a Cartesian grid -------------------------------


def planar_form(nu: float, Q: Potential2D, u, L: float):
    """``<u, (-i sigma.grad - nu/|x| - Q) u>`` for samples ``u`` on the periodic box ``[-L, L)^2``.

    Derivatives are spectral (FFT); ``u`` must vanish near the box edge and
    near the origin.
    """
    n = u.shape[0]
    h = 2 * L / n
    g = -L + h * np.arange(n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    k = 2 * np.pi * np.fft.fftfreq(n, d=h)
    KX, KY = np.meshgrid(k, k, indexing="ij")

    def d(f, K):
        return np.fft.ifft2(1j * K * np.fft.fft2(f))

    v, w = u[..., 0], u[..., 1]
    # -i sigma.grad = -i [[0, dx - i dy], [dx + i dy, 0]]
    dv = -1j * (d(w, KX) - 1j * d(w, KY))
    dw = -1j * (d(v, KX) + 1j * d(v, KY))
    R = np.hypot(X, Y)
    safe = np.where(R > 0, R, 1.0)
    coul = np.where(R > 0, nu / safe, 0.0)
    q = Q(R, np.arctan2(Y, X))
    qu = np.einsum("...st,...t->...s", q, u)
    form = np.conj(v) * dv + np.conj(w) * dw - coul * (np.abs(v) ** 2 + np.abs(w) ** 2)
    form = form - np.einsum("...s,...s->...", np.conj(u), qu)
    return complex(np.sum(form) * h * h)


def channel_reduction_defect(nu: float, kappa: float, Q: Potential2D, psi_fn,
                             L: float = 8.0, n: int = 256) -> tuple:
    """Planar form of the single-channel spinor versus the half-line form of its radial part.

    Returns ``(planar, half_line, relative gap)``.
    """
    h = 2 * L / n
    g = -L + h * np.arange(n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    R = np.hypot(X, Y)
    Phi = np.arctan2(Y, X)
    safe = np.where(R > 0, R, 1.0)
    psi = psi_fn(safe)
    pref = np.where(R > 0, 1.0 / np.sqrt(2 * np.pi * safe), 0.0)
    v = pref * psi[..., 0] * np.exp(1j * (kappa - 0.5) * Phi)
    w = -1j * pref * psi[..., 1] * np.exp(1j * (kappa + 0.5) * Phi)
    planar = planar_form(nu, Q, np.stack([v, w], axis=-1), L)
    line = half_line_form(nu, kappa, channel_potential(Q), psi_fn, L)
    return planar, line, abs(planar - line) / abs(line)


def half_line_form(nu: float, kappa: float, V, psi_fn, r_max: float, n: int = 8000):
    """``<psi, (d^{nu,kappa} - V) psi>`` for ``psi`` vanishing near both ends (no boundary term)."""
    r, w = _gauss_panels(np.linspace(1e-9, r_max, n // 8 + 1), 8)
    f = psi_fn(r)
    h = 1e-5 * np.maximum(r, 1.0)
    df = (psi_fn(r + h) - psi_fn(r - h)) / (2 * h[:, None])
    d0 = -nu / r * f[:, 0] - df[:, 1] - kappa / r * f[:, 1]
    d1 = df[:, 0] - kappa / r * f[:, 0] - nu / r * f[:, 1]
    vpsi = np.einsum("ist,it->is", V.matrix(r), f)
    val = np.conj(f[:, 0]) * (d0 - vpsi[:, 0]) + np.conj(f[:, 1]) * (d1 - vpsi[:, 1])
    return complex(np.sum(w * val))


# -- Kato-type channel inequality --------------------------------------------


@dataclass(frozen=True)
class KatoCheck:
    kappa: float
    min_eigenvalue: float
    gram_defect: float
    packets: int


def kato_check(kappa: float, K: float | None = None, span=(0.5, 2.0), packets: int = 8,
               r_max: float = 300.0) -> KatoCheck:
    """Rayleigh-Ritz test of ``|D^{0,kappa}_{pi/2}| >= K / r``.

    Trial space: images of smooth packets ``cos^4`` in ``ln |lambda|`` on both
    sides of the spectrum.  Returns the smallest eigenvalue of
    ``T^{-1/2} (T - K W) T^{-1/2}``, with ``T`` the kinetic and ``W`` the
    ``1/r`` Gram matrices; it is scale free and non-negative for the exact operator.
    ``gram_defect`` compares the radial and spectral Gram matrices.
    """
    from scipy.linalg import eigh

    K = herbst_k() if K is None else K
    p = make_params(0.0, kappa, HALF_PI)
    a, b = math.log(span[0]), math.log(span[1])
    centres = np.linspace(a, b, packets)
    h = centres[1] - centres[0] if packets > 1 else 0.5
    lo, hi = math.exp(a - 2 * h), math.exp(b + 2 * h)
    # uniform lambda nodes: the rule repeats itself on r ~ 2 pi / dlam = 2 r_max
    n = int(math.ceil((hi - lo) * r_max / math.pi)) + 1
    lam1 = np.linspace(lo, hi, n)
    w1 = np.full(n, lam1[1] - lam1[0])
    lam = np.concatenate([-lam1[::-1], lam1])
    w = np.concatenate([w1[::-1], w1])
    t = np.log(np.abs(lam))
    H = np.array([np.where(np.abs(t - c) < 2 * h, np.cos(np.pi * (t - c) / (4 * h)) ** 4, 0.0)
                  for c in centres])
    H = np.concatenate([H * (lam > 0), H * (lam < 0)])
    rg = RadialGrid.gauss_interval(1e-8, r_max, panel=min(0.5, 1.0 / hi), order=8, log_below=0.5)
    X = eigen_kernel(p, lam, rg.r, weights=w)
    F = np.einsum("aj,jis->ais", H * np.sqrt(w), X)
    G = (H * w) @ H.T
    T = (H * w * np.abs(lam)) @ H.T
    W = np.einsum("ais,bis,i->ab", F, F, rg.w / rg.r)
    Gr = np.einsum("ais,bis,i->ab", F, F, rg.w)
    mu = eigh(T - K * W, T, eigvals_only=True)
    return KatoCheck(float(kappa), float(mu.min()), float(np.abs(Gr - G).max() / np.abs(G).max()),
                     H.shape[0])


# ---------------------------------------------------------------------------
# critical couplings and the verdict engine


def critical_coupling(p: OperatorParams, V, basis=None) -> float:
    """Smallest ``alpha`` at which ``P (D - alpha V) P`` acquires a negative eigenvalue.

    Birman-Schwinger at zero energy on the spectral-side discretisation:
    ``1 / max eig(Lambda^-1/2 Vt Lambda^-1/2)``; ``inf`` if that is not positive.
    """
    from .counting import default_basis

    if V.is_zero:
        return math.inf
    basis = basis or default_basis(p, [V])
    vt = basis.form_matrix(V)
    s = 1.0 / np.sqrt(basis.lam)
    top = float(np.linalg.eigvalsh(s[:, None] * vt * s[None, :])[-1])
    return 1.0 / top if top > 0 else math.inf


def _abs_channel_count(kappa: float, W, lam_min=1e-3, lam_max=20.0, panels=80, order=4):
    """Negative eigenvalues of ``|D^{0,kappa}_{pi/2}| - W I`` (both spectral signs)."""
    from .counting import counting_radial_grid

    p = make_params(0.0, kappa, HALF_PI)
    edges = np.geomspace(lam_min, lam_max, panels + 1)
    x, wx = _gauss_panels(edges, order)
    lam = np.concatenate([-x[::-1], x])
    w = np.concatenate([wx[::-1], wx])
    rg = counting_radial_grid([W], lam_max)
    X = eigen_kernel(p, lam, rg.r, weights=w).transpose(1, 2, 0).reshape(-1, lam.size)
    vm = (W.matrix(rg.r) * rg.w[:, None, None]).real
    y = np.einsum("ist,itk->isk", vm, X.reshape(rg.n, 2, -1)).reshape(-1, lam.size)
    vt = X.T @ y
    ev = np.linalg.eigvalsh(np.diag(np.abs(lam)) - (vt + vt.T) / 2)
    return int(np.sum(ev < -lam_min))


def half_laplacian_count(W, kappa_max: float = 30.5) -> int:
    """Negative eigenvalues of ``(-Delta)^{1/2} - W(|x|)`` on the plane (``W`` scalar radial).

    Each scalar angular mode appears in exactly two spinor channels, so the
    channel counts are summed and halved.
    """
    total = 0
    k = 0.5
    while k <= kappa_max:
        c = _abs_channel_count(k, W) + _abs_channel_count(-k, W)
        total += c
        if c == 0:
            break
        k += 1.0
    return total // 2


def fit_clr_constant(profiles) -> float:
    """Largest ``N / int W^2 dx`` over a family of radial profiles (a lower estimate)."""
    from .counting import _integrate

    best = 0.0
    for W in profiles:
        n = half_laplacian_count(W)
        l2 = 2 * math.pi * _integrate(W, lambda r, v: v * v * r)
        if l2 > 0:
            best = max(best, n / l2)
    return best


def clr_calibration_family():
    return [PotentialSpec.bump(c, w, h) for c, w, h in
            [(1.0, 0.8, 6.0), (2.0, 1.5, 3.0), (1.5, 1.0, 5.0), (3.0, 2.0, 2.0), (2.0, 1.0, 4.0)]]


# frozen output of fit_clr_constant(clr_calibration_family())
C_CLR_FITTED = 0.0899137055226212


@dataclass(frozen=True)
class EnvelopeSplit:
    """``R = R1 + R2`` with ``R1 = min(R, M / r)`` and ``R2 = (R - M / r)_+``."""

    R: object
    M: float

    def r1(self, r):
        r = np.asarray(r, float)
        val = self.R.matrix(r)[..., 0, 0].real
        return np.minimum(val, self.M / r)

    def r2(self, r):
        r = np.asarray(r, float)
        return self.R.matrix(r)[..., 0, 0].real - self.r1(r)

    def sup_r_r1(self) -> float:
        r = self.R.sample_radii()
        return float(np.max(r * self.r1(r)))

    def r2_square_integral(self) -> float:
        from .counting import _integrate

        return _integrate(self.R, lambda r, v: self.r2(r) ** 2 * r, extra_knots=self._knots())

    def _knots(self):
        r = self.R.sample_radii()
        val = self.R.matrix(r)[..., 0, 0].real
        s = np.sign(val - self.M / r)
        return list(r[1:][np.diff(s) != 0])


NEGATIVE_SPECTRUM = "NEGATIVE_SPECTRUM"
STABLE_BELOW_ALPHA_C = "NO_NEGATIVE_SPECTRUM_BELOW_ALPHA_C"
NO_NEGATIVE_SPECTRUM = "NO_NEGATIVE_SPECTRUM"
INCONCLUSIVE = "Inconclusive"


@dataclass
class Report2D:
    verdict: str
    alpha_c: float
    channels: list
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "alpha_c": self.alpha_c, "channels": self.channels,
                "details": self.details}


def _high_channel_alphas(nu: float, R, C_clr: float, K: float):
    """``alpha_0`` (bounded part against the Herbst bound) and ``alpha_1`` (CLR budget),
    maximising ``min(alpha_0, alpha_1)`` over the split level ``M``."""
    cn = c_nu(nu)
    r = R.sample_radii()
    top = float(np.max(r * R.matrix(r)[..., 0, 0].real))
    if top <= 0:
        return math.inf, math.inf, 0.0
    best = (-1.0, 0.0, 0.0, 0.0)
    for M in top * np.geomspace(1e-3, 1.0, 31):
        sp = EnvelopeSplit(R, M)
        a0 = cn * K / (2 * sp.sup_r_r1())
        l2 = sp.r2_square_integral()
        a1 = math.inf if l2 <= 0 else 1.0 / math.sqrt(16 * math.pi * cn ** -2 * C_clr * l2)
        if min(a0, a1) > best[0]:
            best = (min(a0, a1), a0, a1, float(M))
    return best[1], best[2], best[3]


def analyze_2d(nu: float, tmap: ThetaMap, Q: Potential2D, kappa_cut: float | None = None,
               alphas=(1.0, 0.1), C_clr: float | None = None, auto_envelope_fit: bool = True,
               check_half: bool = True) -> Report2D:
    """Negative-spectrum verdict for the planar operator with potential ``alpha Q``.

    If some channel lies in regime I the virtual-level test runs on the channel
    potential for each ``alpha``.  Otherwise every channel up to ``kappa_cut``
    gets a numerical critical coupling for ``R I`` and the channels beyond are
    covered by the ``C^nu`` + Herbst + CLR budget; ``alpha_c`` is the minimum.
    """
    from .virtual import Verdict, detect_virtual_level, virtual_criterion

    kn = kappa_nu(nu)
    kappa_cut = kn + 2 if kappa_cut is None else float(kappa_cut)
    if kappa_cut < kn:
        raise ChannelCutTooSmall(f"kappa_cut = {kappa_cut} is below kappa_nu = {kn}")
    if abs(tmap.nu - nu) > 1e-15:
        raise ConfigError("theta map was built for a different nu")
    chans = channels(kappa_cut)
    rows = []
    for k in chans:
        p = tmap.params(k)
        rows.append({"kappa": k, "theta": p.theta, "beta": [p.beta.real, p.beta.imag],
                     "regime": classify_regime(p).value, "high": abs(k) >= kn})
    if Q.is_zero:
        return Report2D(NO_NEGATIVE_SPECTRUM, math.inf, rows)

    regime_one = [row for row in rows if row["regime"] == Regime.I.value]
    if regime_one:
        V = channel_potential(Q)
        found = False
        for row in regime_one:
            p = tmap.params(row["kappa"])
            crit = virtual_criterion(p, V)
            row["criterion"] = crit.to_dict()
            if not crit.verdict:
                continue
            results = {}
            for a in alphas:
                rep = detect_virtual_level(p, V.scaled(a))
                results[str(a)] = {"verdict": rep.verdict.value, "first_log2_n": rep.first_log2_n}
            row["virtual_level"] = results
            if all(v["verdict"] == Verdict.NEGATIVE_SPECTRUM.value for v in results.values()):
                found = True
        return Report2D(NEGATIVE_SPECTRUM if found else INCONCLUSIVE, 0.0 if found else math.nan,
                        rows, {"part": 1})

    R = Q.envelope
    if R is None:
        if not auto_envelope_fit:
            raise MissingEnvelope("part 2 needs a radial envelope R with Q <= R I")
        R = auto_envelope(Q)
    if R.is_zero:
        return Report2D(NO_NEGATIVE_SPECTRUM, math.inf, rows, {"part": 2})
    from .counting import count_negative, default_basis

    low = math.inf
    bases = {}
    for row in rows:
        p = tmap.params(row["kappa"])
        bases[row["kappa"]] = default_basis(p, [R])
        a = critical_coupling(p, R, bases[row["kappa"]])
        row["alpha_kappa"] = a
        if not row["high"]:
            low = min(low, a)
    K = herbst_k()
    C = C_CLR_FITTED if C_clr is None else C_clr
    if C is None:
        C = fit_clr_constant(clr_calibration_family())
    a0, a1, M = _high_channel_alphas(nu, R, C, K)
    alpha_c = min(low, a0, a1)
    details = {"part": 2, "alpha_low": low, "alpha_0": a0, "alpha_1": a1, "split_level": M,
               "C_nu": c_nu(nu), "K": K, "C_CLR": C, "kappa_nu": kn,
               "trace_square_integral": trace_square_integral(Q)}
    if check_half and math.isfinite(alpha_c):
        for row in rows:
            p = tmap.params(row["kappa"])
            row["count_at_half_alpha_c"] = count_negative(p, R.scaled(alpha_c / 2),
                                                          basis=bases[row["kappa"]])
    return Report2D(STABLE_BELOW_ALPHA_C, alpha_c, rows, details)
