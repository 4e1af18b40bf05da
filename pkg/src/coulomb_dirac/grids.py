"""Radial and spectral quadrature grids and sampled spinor fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedGrid


def _gauss_panels(edges, order):
    """Composite Gauss-Legendre nodes/weights on consecutive ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo = np.asarray(edges[:-1], float)[:, None]
    hi = np.asarray(edges[1:], float)[:, None]
    half = (hi - lo) / 2
    nodes = (lo + hi) / 2 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


@dataclass(frozen=True)
class RadialGrid:
    """Positive, strictly increasing abscissae with quadrature weights.

    ``scale`` records how the nodes were laid out ("log", "uniform" or
    "gauss").  ``sum(w * f(r))`` approximates the integral of ``f`` over
    ``[r_min, r_max]``.
    """

    r: np.ndarray
    w: np.ndarray
    scale: str = "log"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = np.asarray(self.r, float)
        w = np.asarray(self.w, float)
        if r.ndim != 1 or r.shape != w.shape or r.size < 2:
            raise ValueError("RadialGrid needs matching 1-d node and weight arrays")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radial nodes must be positive and strictly increasing")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.r.size

    @classmethod
    def log_uniform(cls, r_min=1e-6, r_max=1e3, n=4096):
        """Nodes uniform in ``ln r``; trapezoidal weights in ``ln r`` (second order)."""
        t = np.linspace(np.log(r_min), np.log(r_max), n)
        r = np.exp(t)
        dt = t[1] - t[0]
        w = r * dt
        w[0] *= 0.5
        w[-1] *= 0.5
        return cls(r, w, "log", {"r_min": r_min, "r_max": r_max, "n": n})

    @classmethod
    def uniform(cls, r_min, r_max, n):
        """Equispaced nodes with trapezoidal weights."""
        r = np.linspace(r_min, r_max, n)
        h = r[1] - r[0]
        w = np.full(n, h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return cls(r, w, "uniform", {"r_min": r_min, "r_max": r_max, "n": n})

    @classmethod
    def gauss(cls, edges, order=8):
        """Composite Gauss-Legendre rule on the panels delimited by ``edges``."""
        r, w = _gauss_panels(edges, order)
        return cls(r, w, "gauss", {"panels": len(edges) - 1, "order": order,
                                   "r_min": float(edges[0]), "r_max": float(edges[-1])})

    @classmethod
    def gauss_interval(cls, r_min, r_max, panel=0.25, order=8, log_below=None):
        """Gauss panels of width <= ``panel``; optional geometric panels below ``log_below``."""
        edges = []
        start = r_min
        if log_below is not None and log_below > r_min:
            k = max(1, int(np.ceil(np.log(log_below / r_min) / np.log(2.0))))
            edges.extend(np.geomspace(r_min, log_below, k + 1)[:-1])
            start = log_below
        m = max(1, int(np.ceil((r_max - start) / panel)))
        edges.extend(np.linspace(start, r_max, m + 1))
        return cls.gauss(np.asarray(edges), order)


@dataclass(frozen=True)
class SpectralGrid:
    """Nonzero spectral nodes symmetric about 0 with |lambda| in [lam_min, lam_max]."""

    lam: np.ndarray
    w: np.ndarray
    lam_min: float
    lam_max: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, float)
        w = np.asarray(self.w, float)
        if lam.shape != w.shape or lam.ndim != 1:
            raise ValueError("SpectralGrid needs matching 1-d arrays")
        if self.lam_min <= 0:
            raise DomainError("lam_min must be positive")
        if np.any(lam == 0):
            raise DomainError("spectral nodes must be non-zero")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.lam.size

    @classmethod
    def symmetric(cls, lam_min=1e-6, lam_max=50.0, panels=2048, order=2, log_panels=None,
                  positive_only=False):
        """Gauss-Legendre panels on ``[lam_min, lam_max]`` mirrored to negative lambda.

        ``log_panels`` geometric panels cover ``[lam_min, 1]`` (when
        ``lam_max > 1``); the remaining panels are uniform up to ``lam_max``.
        """
        if log_panels is None:
            log_panels = max(8, panels // 8)
        if lam_max > 1.0 and lam_min < 1.0:
            e1 = np.geomspace(lam_min, 1.0, log_panels + 1)
            e2 = np.linspace(1.0, lam_max, max(1, panels - log_panels) + 1)
            edges = np.concatenate([e1[:-1], e2])
        else:
            edges = np.geomspace(lam_min, lam_max, panels + 1)
        x, w = _gauss_panels(edges, order)
        if positive_only:
            lam, wt = x, w
        else:
            lam = np.concatenate([-x[::-1], x])
            wt = np.concatenate([w[::-1], w])
        return cls(lam, wt, lam_min, lam_max,
                   {"panels": panels, "order": order, "log_panels": log_panels,
                    "positive_only": positive_only})

    @classmethod
    def interval(cls, lo, hi, panels=64, order=8, log=True):
        """Gauss panels on a single positive interval ``[lo, hi]``."""
        edges = np.geomspace(lo, hi, panels + 1) if log else np.linspace(lo, hi, panels + 1)
        x, w = _gauss_panels(edges, order)
        return cls(x, w, lo, hi, {"panels": panels, "order": order, "positive_only": True})


@dataclass(frozen=True)
class SpinorField:
    """A C^2-valued function sampled on a radial grid; ``values`` has shape (n, 2)."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n, 2):
            raise ValueError(f"values must have shape ({self.grid.n}, 2)")
        object.__setattr__(self, "values", v)

    @property
    def r(self):
        return self.grid.r

    def norm2(self) -> float:
        return float(np.sum(self.grid.w * np.sum(np.abs(self.values) ** 2, axis=1)))

    def inner(self, other: "SpinorField") -> complex:
        """``<self, other>``, conjugate-linear in ``self``."""
        return complex(np.sum(self.grid.w * np.sum(np.conj(self.values) * other.values, axis=1)))

    @classmethod
    def from_function(cls, grid: RadialGrid, fn):
        return cls(grid, np.asarray(fn(grid.r), dtype=complex).reshape(grid.n, 2))

    def check_support(self, r_a: float, r_b: float, tol: float = 1e-12):
        """Raise :class:`UnsupportedGrid` unless the field vanishes outside [r_a, r_b]."""
        outside = (self.grid.r < r_a) | (self.grid.r > r_b)
        scale = max(np.abs(self.values).max(), 1e-300)
        if np.any(np.abs(self.values[outside]) > tol * scale):
            raise UnsupportedGrid("field is not supported inside the requested interval")
        if r_a < self.grid.r[0] or r_b > self.grid.r[-1]:
            raise UnsupportedGrid("support interval exceeds the radial grid")
