"""Declarative Hermitian 2x2 radial potentials and their pointwise spectral calculus."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnboundedPotential

PIECE_TYPES = ("bump", "power", "table")
KINDS = ("scalar_radial", "matrix_radial")

POTENTIAL_SCHEMA = {
    "type": "object",
    "required": ["kind", "pieces"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "scale": {"type": "number"},
        "pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type"],
                "properties": {
                    "type": {"enum": list(PIECE_TYPES)},
                    "center": {"type": "number"},
                    "width": {"type": "number", "exclusiveMinimum": 0},
                    "height": {"type": "number"},
                    "exponent": {"type": "number"},
                    "r_min": {"type": "number", "exclusiveMinimum": 0},
                    "r_max": {"type": "number", "exclusiveMinimum": 0},
                    "r": {"type": "array", "items": {"type": "number"}},
                    "values": {"type": "array"},
                    "values_imag": {"type": "array"},
                    "matrix": {"type": "array"},
                    "matrix_imag": {"type": "array"},
                },
            },
        },
    },
}


# ---------------------------------------------------------------------------
# closed-form spectral calculus for Hermitian 2x2 matrices


def herm2_eig(m):
    """Eigenvalues ``(lo, hi)`` and spectral projections ``(P_lo, P_hi)`` of Hermitian 2x2 arrays."""
    m = np.asarray(m, dtype=complex)
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = m[..., 0, 1]
    mean = (a + d) / 2
    delta = np.hypot((a - d) / 2, np.abs(b))
    eye = np.broadcast_to(np.eye(2), m.shape)
    # splittings at rounding level are treated as degenerate (no overflow in the division)
    tiny = np.maximum(1e-15 * np.maximum(np.abs(mean), delta), np.finfo(float).tiny)
    split = delta > tiny
    safe = np.where(split, delta, 1.0)[..., None, None]
    herm = (m + np.conj(np.swapaxes(m, -1, -2))) / 2
    shifted = (herm - mean[..., None, None] * eye) / safe
    degenerate = ~split[..., None, None]
    p_hi = np.where(degenerate, eye, (eye + shifted) / 2)
    p_lo = np.where(degenerate, 0 * eye, (eye - shifted) / 2)
    return mean - delta, mean + delta, p_lo, p_hi


def herm2_apply(m, fn):
    """``fn(M)`` in the spectral sense, pointwise."""
    lo, hi, p_lo, p_hi = herm2_eig(m)
    return fn(lo)[..., None, None] * p_lo + fn(hi)[..., None, None] * p_hi


def positive_part(m):
    return herm2_apply(m, lambda x: np.maximum(x, 0.0))


def abs_value(m):
    return herm2_apply(m, np.abs)


def sqrt_abs(m):
    return herm2_apply(m, lambda x: np.sqrt(np.abs(x)))


def sign_part(m):
    return herm2_apply(m, np.sign)


def norm_plus(m):
    """Operator norm of the positive part: ``max(eig_max, 0)``."""
    return np.maximum(herm2_eig(m)[1], 0.0)


def op_norm(m):
    lo, hi, _, _ = herm2_eig(m)
    return np.maximum(np.abs(lo), np.abs(hi))


# ---------------------------------------------------------------------------


def _std_bump(s):
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _as_matrix(re, im=None):
    m = np.asarray(re, dtype=float).astype(complex)
    if im is not None:
        m = m + 1j * np.asarray(im, dtype=float)
    return m


@dataclass(frozen=True)
class PotentialSpec:
    """Radial potential ``V(r) = scale * sum_pieces profile(r) * M_piece``.

    Piece types:

    * ``bump``: smooth compact bump ``height * exp(1 - 1/(1-s^2))``, ``s = (r-center)/width``
      (peak value ``height``, support ``center +- width``);
    * ``power``: ``height * r**exponent`` on ``[r_min, r_max]``, zero elsewhere;
    * ``table``: linear interpolation of sampled values, zero outside the table.

    For ``matrix_radial`` potentials each piece may carry a Hermitian 2x2
    ``matrix`` (with optional ``matrix_imag``); ``table`` pieces may instead
    give 2x2 ``values`` per node.  Scalar potentials act as multiples of the
    identity.
    """

    kind: str
    pieces: tuple
    scale: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        pieces = tuple(dict(pc) for pc in self.pieces)
        for pc in pieces:
            t = pc.get("type")
            if t not in PIECE_TYPES:
                raise ConfigError(f"unknown piece type {t!r}")
            if t == "bump" and not (pc.get("width", 0) > 0):
                raise ConfigError("bump pieces need a positive width")
            if t == "power":
                lo, hi = pc.get("r_min"), pc.get("r_max")
                if lo is None or hi is None or not (0 < lo < hi < math.inf):
                    raise ConfigError("power pieces need cutoffs 0 < r_min < r_max < inf")
            if t == "table":
                r = np.asarray(pc.get("r", []), float)
                if r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0:
                    raise ConfigError("table pieces need increasing positive nodes")
            mat = self._piece_matrix(pc)
            if mat is not None and not np.allclose(mat, np.conj(mat.T), atol=1e-14):
                raise ConfigError("piece matrix must be Hermitian")
        object.__setattr__(self, "pieces", pieces)

    # -- construction helpers ----------------------------------------------
    @classmethod
    def bump(cls, center, width, height=1.0, matrix=None):
        pc = {"type": "bump", "center": center, "width": width, "height": height}
        kind = "scalar_radial"
        if matrix is not None:
            m = np.asarray(matrix, dtype=complex)
            pc["matrix"] = m.real.tolist()
            if np.any(m.imag != 0):
                pc["matrix_imag"] = m.imag.tolist()
            kind = "matrix_radial"
        return cls(kind, (pc,))

    @classmethod
    def zero(cls):
        return cls("scalar_radial", ())

    @classmethod
    def from_dict(cls, data: dict) -> "PotentialSpec":
        try:
            return cls(data["kind"], tuple(data["pieces"]), float(data.get("scale", 1.0)))
        except KeyError as exc:
            raise ConfigError(f"potential is missing field {exc}") from None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale, "pieces": [dict(p) for p in self.pieces]}

    def scaled(self, alpha: float) -> "PotentialSpec":
        return PotentialSpec(self.kind, self.pieces, self.scale * float(alpha), self.meta)

    def __add__(self, other: "PotentialSpec") -> "PotentialSpec":
        kind = "matrix_radial" if "matrix_radial" in (self.kind, other.kind) else "scalar_radial"
        pieces = [self._with_scale(p, self.scale) for p in self.pieces]
        pieces += [self._with_scale(p, other.scale) for p in other.pieces]
        return PotentialSpec(kind, tuple(pieces))

    @staticmethod
    def _with_scale(pc, s):
        pc = dict(pc)
        if pc["type"] == "table":
            pc["values"] = (np.asarray(pc["values"], float) * s).tolist()
            if "values_imag" in pc:
                pc["values_imag"] = (np.asarray(pc["values_imag"], float) * s).tolist()
        else:
            pc["height"] = pc.get("height", 1.0) * s
        return pc

    # -- evaluation --------------------------------------------------------
    @staticmethod
    def _piece_matrix(pc):
        if "matrix" in pc:
            return _as_matrix(pc["matrix"], pc.get("matrix_imag"))
        return None

    @property
    def is_zero(self) -> bool:
        return self.scale == 0 or len(self.pieces) == 0

    def support(self) -> tuple[float, float]:
        """Smallest interval outside which ``V`` vanishes."""
        lo, hi = math.inf, 0.0
        for pc in self.pieces:
            t = pc["type"]
            if t == "bump":
                a, b = pc["center"] - pc["width"], pc["center"] + pc["width"]
            elif t == "power":
                a, b = pc["r_min"], pc["r_max"]
            else:
                a, b = pc["r"][0], pc["r"][-1]
            lo, hi = min(lo, max(a, 0.0)), max(hi, b)
        if lo == math.inf:
            return (0.0, 0.0)
        return lo, hi

    def breakpoints(self) -> list[float]:
        """Points where ``V`` may be non-smooth (cutoffs and table nodes)."""
        pts = []
        for pc in self.pieces:
            t = pc["type"]
            if t == "bump":
                pts += [max(pc["center"] - pc["width"], 0.0), pc["center"] + pc["width"]]
            elif t == "power":
                pts += [pc["r_min"], pc["r_max"]]
            else:
                pts += list(pc["r"])
        return sorted(set(p for p in pts if p > 0))

    def matrix(self, r):
        """``V(r)`` as an array of shape ``r.shape + (2, 2)``."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape + (2, 2), dtype=complex)
        eye = np.eye(2)
        for pc in self.pieces:
            t = pc["type"]
            mat = self._piece_matrix(pc)
            mat = eye if mat is None else mat
            if t == "bump":
                prof = pc.get("height", 1.0) * _std_bump((r - pc["center"]) / pc["width"])
                out += prof[..., None, None] * mat
            elif t == "power":
                inside = (r >= pc["r_min"]) & (r <= pc["r_max"])
                prof = np.where(inside, pc.get("height", 1.0) * np.where(inside, r, 1.0) ** pc["exponent"], 0.0)
                out += prof[..., None, None] * mat
            else:
                nodes = np.asarray(pc["r"], float)
                vals = _as_matrix(pc["values"], pc.get("values_imag"))
                inside = (r >= nodes[0]) & (r <= nodes[-1])
                if vals.ndim == 1:
                    prof = np.interp(r, nodes, vals.real) + 1j * np.interp(r, nodes, vals.imag)
                    prof = np.where(inside, prof, 0.0)
                    out += prof[..., None, None] * mat
                else:
                    for i in range(2):
                        for j in range(2):
                            v = vals[:, i, j]
                            e = np.interp(r, nodes, v.real) + 1j * np.interp(r, nodes, v.imag)
                            out[..., i, j] += np.where(inside, e, 0.0)
        return self.scale * out

    def positive_part(self, r):
        return positive_part(self.matrix(r))

    def abs_value(self, r):
        return abs_value(self.matrix(r))

    def norm_plus(self, r):
        """``||V_+(r)||`` (operator norm of the positive part)."""
        return norm_plus(self.matrix(r))

    def op_norm(self, r):
        return op_norm(self.matrix(r))

    def sample_radii(self, n_per_piece: int = 2001):
        lo, hi = self.support()
        if hi <= lo:
            return np.array([1.0])
        pts = self.breakpoints()
        r = np.concatenate([np.linspace(lo, hi, n_per_piece), pts])
        return np.unique(r[r > 0])

    def sup_norm_plus(self) -> float:
        """``sup_r ||V_+(r)||`` estimated on a dense sample; raises if unbounded."""
        if self.is_zero:
            return 0.0
        for pc in self.pieces:
            if pc["type"] == "power" and pc["exponent"] < 0 and pc["r_min"] <= 0:
                raise UnboundedPotential("power piece is unbounded near r = 0")
        val = float(np.max(self.norm_plus(self.sample_radii())))
        if not math.isfinite(val):
            raise UnboundedPotential("V_+ is not bounded on its support")
        return val

    def is_nonnegative(self, tol: float = 1e-14) -> bool:
        lo = herm2_eig(self.matrix(self.sample_radii()))[0]
        return bool(np.all(lo >= -tol))


@dataclass(frozen=True)
class PositivePart:
    """``factor * V_+`` of a base potential, with the same evaluation interface."""

    base: PotentialSpec
    factor: float = 1.0

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero or self.factor == 0

    def support(self):
        return self.base.support()

    def breakpoints(self):
        return self.base.breakpoints()

    def sample_radii(self, n_per_piece: int = 2001):
        return self.base.sample_radii(n_per_piece)

    def matrix(self, r):
        return self.factor * self.base.positive_part(r)

    def scaled(self, alpha: float) -> "PositivePart":
        if alpha < 0:
            raise ValueError("PositivePart can only be scaled by alpha >= 0")
        return PositivePart(self.base, self.factor * alpha)

    def positive_part(self, r):
        return self.matrix(r)

    def norm_plus(self, r):
        return norm_plus(self.matrix(r))

    def sup_norm_plus(self) -> float:
        return self.factor * self.base.sup_norm_plus()


@dataclass(frozen=True)
class FunctionPotential:
    """Hermitian potential given by a vectorised callable ``r -> (..., 2, 2)`` on a known support."""

    fn: object = field(repr=False)
    support_interval: tuple
    knots: tuple = ()
    scale: float = 1.0
    zero: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def is_zero(self) -> bool:
        return self.zero or self.scale == 0

    def support(self):
        return tuple(self.support_interval)

    def breakpoints(self):
        lo, hi = self.support_interval
        return sorted(set([k for k in self.knots if k > 0] + ([lo] if lo > 0 else []) + [hi]))

    def matrix(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.support_interval
        out = np.zeros(r.shape + (2, 2), complex)
        inside = (r >= lo) & (r <= hi)
        if np.any(inside):
            out[inside] = np.asarray(self.fn(r[inside]), complex)
        return self.scale * out

    def scaled(self, alpha: float) -> "FunctionPotential":
        return FunctionPotential(self.fn, self.support_interval, self.knots,
                                 self.scale * float(alpha), self.zero, self.meta)

    def positive_part(self, r):
        return positive_part(self.matrix(r))

    def abs_value(self, r):
        return abs_value(self.matrix(r))

    def norm_plus(self, r):
        return norm_plus(self.matrix(r))

    def op_norm(self, r):
        return op_norm(self.matrix(r))

    def sample_radii(self, n_per_piece: int = 2001):
        lo, hi = self.support_interval
        if hi <= lo:
            return np.array([1.0])
        r = np.concatenate([np.linspace(lo, hi, n_per_piece), list(self.knots)])
        return np.unique(r[(r > 0) & (r >= lo) & (r <= hi)])

    def sup_norm_plus(self) -> float:
        if self.is_zero:
            return 0.0
        val = float(np.max(self.norm_plus(self.sample_radii())))
        if not math.isfinite(val):
            raise UnboundedPotential("V_+ is not bounded on its support")
        return val

    def is_nonnegative(self, tol: float = 1e-14) -> bool:
        lo = herm2_eig(self.matrix(self.sample_radii()))[0]
        return bool(np.all(lo >= -tol))

    def to_spec(self, n: int = 401) -> PotentialSpec:
        """Tabulated copy (linear interpolation between ``n`` nodes)."""
        if self.is_zero:
            return PotentialSpec.zero()
        lo, hi = self.support_interval
        r = np.linspace(max(lo, hi * 1e-9), hi, n)
        m = self.matrix(r)
        pc = {"type": "table", "r": r.tolist(), "values": m.real.tolist()}
        if np.any(m.imag):
            pc["values_imag"] = m.imag.tolist()
        return PotentialSpec("matrix_radial", (pc,))
