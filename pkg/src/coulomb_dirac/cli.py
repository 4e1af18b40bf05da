"""Command-line front end.

Every subcommand builds a run configuration (a plain dict validated against
``RUN_CONFIG_SCHEMA``), hands it to :func:`run` and prints the resulting
envelope as JSON, or a CSV table for the tabular commands.  Floats are
written with 17 significant digits so identical configurations give
byte-identical output.

Exit codes: 0 success, 2 configuration or parameter error, 3 numerical
non-convergence, 1 failed acceptance suite.
"""

from __future__ import annotations

import os
import sys

THREADS_ENV = "COULOMB_DIRAC_THREADS"
if os.environ.get(THREADS_ENV):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ[THREADS_ENV])

import argparse  # noqa: E402
import csv  # noqa: E402
import io  # noqa: E402
import json  # noqa: E402
import math  # noqa: E402
from dataclasses import dataclass, field  # noqa: E402
from enum import Enum  # noqa: E402

import jsonschema  # noqa: E402
import numpy as np  # noqa: E402

from . import __version__  # noqa: E402
from .errors import ConfigError, CoulombDiracError, NonConvergence, UnknownSeries  # noqa: E402

COMMANDS = ("classify", "eval-solution", "wronskian-table", "green", "transform", "density",
            "verify-unitarity", "count-negative", "lt-sum", "fit-constants", "virtual-level",
            "twod-analyze", "specialfn-eval", "repro")

_NUM = {"type": "number"}
_OPT_NUM = {"type": ["number", "null"]}

GRID_SCHEMAS = {
    "counting": {"lam_min": _NUM, "lam_max": _NUM, "log_panels": {"type": "integer", "minimum": 1},
                 "panel": _NUM, "order": {"type": "integer", "minimum": 1}},
    "transform": {"lam_min": _NUM, "lam_max": _NUM, "panels": {"type": "integer", "minimum": 1},
                  "order": {"type": "integer", "minimum": 1}, "r_panel": _NUM},
    "virtual": {"n_max": {"type": "integer", "minimum": 2}, "extend_to_log2": _OPT_NUM},
    "density": {"lam_min": _NUM, "lam_max": _NUM, "n": {"type": "integer", "minimum": 2}},
}
_GRID_KIND = {"count-negative": "counting", "lt-sum": "counting", "fit-constants": "counting",
              "transform": "transform", "virtual-level": "virtual", "density": "density"}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"nu": _NUM, "kappa": _NUM, "theta": _NUM},
        },
        "theta_map": {"type": ["string", "object", "null"]},
        "grid": {"type": "object"},
        "potential": {"type": ["string", "object"]},
        "family": {"type": ["string", "object"]},
        "input": {"type": ["string", "object"]},
        "options": {"type": "object"},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": ["string", "null"]},
                "format": {"enum": ["json", "csv"]},
                "plot": {"type": ["string", "null"]},
                "plot_path": {"type": ["string", "null"]},
            },
        },
        "seed": {"type": "integer"},
    },
}

TRANSFORM_INPUT_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["bump", "samples"]},
        "r_a": _NUM, "r_b": _NUM, "phi": _NUM, "slope": _NUM,
        "r": {"type": "array", "items": _NUM, "minItems": 3},
        "re": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
        "im": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
    },
}

FAMILY_SCHEMA = {
    "type": "object",
    "required": ["nu", "kappa", "theta"],
    "properties": {
        "nu": _NUM, "kappa": _NUM, "theta": _NUM, "q": _NUM, "gamma": _NUM,
        "calibration": {"type": "array", "items": {"type": "object"}},
        "holdout": {"type": "array", "items": {"type": "object"}},
        "random": {"type": "object", "properties": {"count": {"type": "integer", "minimum": 1}}},
    },
}


# ---------------------------------------------------------------------------
# serialisation


def _plain(obj):
    """Convert results into JSON-ready Python objects (complex as ``{re, im}``)."""
    if isinstance(obj, Enum):
        return _plain(obj.value)
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def format_float(x: float) -> str:
    """17 significant digits; non-finite values become ``null`` (strict JSON)."""
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float at 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v, level) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return format_float(o)
        return json.dumps(o)

    return enc(_plain(obj), 0)


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.17g}{'+' if v.imag >= 0 else '-'}{abs(v.imag):.17g}j"
    return v


def to_csv(columns: dict) -> str:
    """CSV text from ``{header: column}``; all columns must have the same length."""
    names = list(columns)
    lengths = {len(columns[n]) for n in names}
    if len(lengths) > 1:
        raise ValueError("columns differ in length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*(columns[n] for n in names)):
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


@dataclass
class ResultEnvelope:
    command: dict
    payload: dict
    grid: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    table: dict | None = None  # columns for CSV output
    version: str = __version__
    ok: bool = True

    def to_dict(self) -> dict:
        return {"command": self.command, "version": self.version, "grid": self.grid,
                "diagnostics": self.diagnostics, "payload": self.payload}


SERIES_COLUMNS = {
    "m_lambda": ("lambda", "m_lambda"),
    "q_n": ("log2_n", "ln_n", "v_form", "q_n"),
    "count_vs_bound": ("set", "value", "bound", "margin"),
}


COMMAND_SERIES = {"transform": ("m_lambda",), "density": ("m_lambda",), "virtual-level": ("q_n",),
                  "fit-constants": ("count_vs_bound",)}


def emit_plotdata(result: ResultEnvelope, what: str, path: str | None = None) -> str:
    """Write one named plot series of ``result`` as CSV; returns the CSV text."""
    if what not in result.series:
        known = ", ".join(sorted(result.series)) or "none"
        raise UnknownSeries(f"series {what!r} is not in this result (available: {known})")
    text = to_csv(result.series[what])
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# configuration


def _schema_errors(instance, schema, where: str):
    v = jsonschema.Draft202012Validator(schema)
    msgs = []
    for err in sorted(v.iter_errors(instance), key=lambda e: list(e.absolute_path)):
        loc = ".".join([where] + [str(p) for p in err.absolute_path])
        msgs.append(f"{loc}: {err.message}")
    return msgs


def validate_config(config: dict) -> None:
    msgs = _schema_errors(config, RUN_CONFIG_SCHEMA, "config")
    if not msgs:
        kind = _GRID_KIND.get(config["command"])
        grid = config.get("grid", {})
        if grid and kind is None:
            msgs.append(f"config.grid: command {config['command']!r} takes no grid settings")
        elif kind is not None:
            schema = {"type": "object", "additionalProperties": False, "properties": GRID_SCHEMAS[kind]}
            msgs += _schema_errors(grid, schema, "config.grid")
    if msgs:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(msgs))


def _load_json(source, what: str):
    if isinstance(source, dict):
        return source
    try:
        with open(source, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{what}: cannot read {source!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: {source!r} is not valid JSON: {exc}") from None


def _load_potential(source):
    from .potentials import POTENTIAL_SCHEMA, PotentialSpec

    data = _load_json(source, "potential")
    msgs = _schema_errors(data, POTENTIAL_SCHEMA, "potential")
    if msgs:
        raise ConfigError("invalid potential:\n  " + "\n  ".join(msgs))
    return PotentialSpec.from_dict(data)


def _params(config: dict):
    from .params import make_params

    blk = config.get("params")
    if not blk or any(k not in blk for k in ("nu", "kappa", "theta")):
        raise ConfigError("config.params: nu, kappa and theta are required")
    return make_params(blk["nu"], blk["kappa"], blk["theta"])


def _opt(config: dict, key: str, default=None):
    return config.get("options", {}).get(key, default)


# ---------------------------------------------------------------------------
# commands


def _spinor(v):
    v = np.asarray(v).reshape(-1, 2)[0]
    return [complex(v[0]), complex(v[1])]


def cmd_classify(config):
    from .params import classify_regime, compute_beta, in_admissible_set, make_params, table_cell

    blk = config.get("params", {})
    try:
        nu, kap, th = float(blk["nu"]), float(blk["kappa"]), float(blk["theta"])
    except KeyError as exc:
        raise ConfigError(f"config.params.{exc.args[0]}: required") from None
    beta = compute_beta(nu, kap)
    in_m = in_admissible_set(nu, kap, th)
    payload = {"beta": beta.real if beta.imag == 0 else beta, "beta_imaginary": beta.imag != 0,
               "in_M": in_m, "regime": None, "table_cell": None}
    if in_m:
        p = make_params(nu, kap, th)
        payload.update(regime=classify_regime(p).value, table_cell=table_cell(p), branch=p.branch)
    return ResultEnvelope({}, payload, diagnostics={"exact": True})


def cmd_eval_solution(config):
    from .solutions import ode_residual, phi_infinity, phi_m, phi_u, phi_zero

    p = _params(config)
    fam = _opt(config, "solution", "M")
    lam = complex(_opt(config, "lambda_re", 1.0), _opt(config, "lambda_im", 0.0))
    r = float(_opt(config, "r", 1.0))
    if r <= 0:
        raise ConfigError("config.options.r: must be positive")
    fns = {
        "M": lambda rr: phi_m(p, lam * np.asarray(rr)),
        "U": lambda rr: phi_u(p, lam * np.asarray(rr)),
        "inf": lambda rr: phi_infinity(p, lam, np.asarray(rr)),
        "zero": lambda rr: phi_zero(p, lam, np.asarray(rr)),
    }
    if fam not in fns:
        raise ConfigError(f"config.options.solution: unknown family {fam!r}")
    fn = fns[fam]
    value = _spinor(fn(np.array([r])))
    res = float(ode_residual(p, lam, fn, np.array([r]))[0])
    return ResultEnvelope({}, {"family": fam, "lambda": lam, "r": r, "value": value},
                          diagnostics={"ode_residual": res, "fd_step_rel": 1e-4})


def cmd_wronskian_table(config):
    from .solutions import WRONSKIAN_RADII, wronskian_sweep

    sweep = _opt(config, "sweep", "default")
    if sweep != "default":
        raise ConfigError(f"config.options.sweep: unknown sweep {sweep!r}")
    rows = wronskian_sweep()
    table = {
        "nu": [r.nu for r in rows], "kappa": [r.kappa for r in rows],
        "W_MU_computed": [r.computed for r in rows], "W_MU_formula": [r.formula for r in rows],
        "abs_err": [r.abs_err for r in rows], "branch": [r.branch for r in rows],
        "r_spread": [r.rel_spread for r in rows],
    }
    payload = {"rows": [r.__dict__ for r in rows], "max_abs_err": max(r.abs_err for r in rows)}
    return ResultEnvelope({}, payload, grid={"radii": list(WRONSKIAN_RADII)},
                          diagnostics={"max_r_spread": max(r.rel_spread for r in rows)}, table=table)


def cmd_green(config):
    from .solutions import wronskian_good
    from .spectral import green_kernel

    p = _params(config)
    lam = complex(_opt(config, "lambda_re", 1.0), _opt(config, "lambda_im", 1.0))
    x, y = float(_opt(config, "x", 1.0)), float(_opt(config, "y", 1.0))
    if x <= 0 or y <= 0:
        raise ConfigError("config.options.x/y: must be positive")
    G = np.asarray(green_kernel(p, lam, x, y)).reshape(2, 2)
    Gt = np.asarray(green_kernel(p, lam, y, x)).reshape(2, 2)
    diag = {"symmetry_defect": float(np.max(np.abs(G - Gt.T)))}
    if not p.kappa_zero:
        diag["wronskian_good"] = complex(wronskian_good(p, lam))
    return ResultEnvelope({}, {"lambda": lam, "x": x, "y": y, "G": G.tolist()}, diagnostics=diag)


def _transform_field(spec: dict):
    from .grids import RadialGrid
    from .spectral import BumpSpinor

    msgs = _schema_errors(spec, TRANSFORM_INPUT_SCHEMA, "input")
    if msgs:
        raise ConfigError("invalid transform input:\n  " + "\n  ".join(msgs))
    if spec["kind"] == "bump":
        fn = BumpSpinor(float(spec.get("r_a", 0.5)), float(spec.get("r_b", 3.0)),
                        float(spec.get("phi", 0.0)), float(spec.get("slope", 0.0)))
        return fn, (fn.r_a, fn.r_b), None
    r = np.asarray(spec["r"], float)
    vals = np.asarray(spec["re"], float)
    if "im" in spec:
        vals = vals + 1j * np.asarray(spec["im"], float)
    if vals.shape != (r.size, 2):
        raise ConfigError("input.re: needs one [f1, f2] pair per radial node")
    w = np.empty_like(r)
    d = np.diff(r)
    w[0], w[-1] = d[0] / 2, d[-1] / 2
    w[1:-1] = (d[:-1] + d[1:]) / 2
    return None, (float(r[0]), float(r[-1])), (RadialGrid(r, w, "uniform"), vals)


def cmd_transform(config):
    from .grids import RadialGrid, SpectralGrid
    from .spectral import SpectralTransform, transform_defects

    p = _params(config)
    g = {"lam_min": 1e-4, "lam_max": 12.5, "panels": 512, "order": 2, **config.get("grid", {})}
    fn, span, sampled = _transform_field(_load_json(config.get("input", {"kind": "bump"}), "input"))
    sg = SpectralGrid.symmetric(g["lam_min"], g["lam_max"], panels=g["panels"], order=g["order"])
    if sampled is None:
        panel = g.get("r_panel", math.pi / (4 * g["lam_max"]))
        rg = RadialGrid.gauss_interval(span[0], span[1], panel=panel, order=g["order"])
        values = fn(rg.r)
    else:
        rg, values = sampled
    T = SpectralTransform.build(p, rg, sg)
    gl = T.forward(values)
    n2 = T.radial_norm2(values)
    diag = {"parseval_defect": abs(T.spectral_norm2(gl) / n2 - 1.0),
            "roundtrip_err": math.sqrt(T.radial_norm2(T.inverse(gl) - values) / n2)}
    if fn is not None:
        diag.update(transform_defects(T, fn))
    table = {"lambda": sg.lam, "m_lambda": T.density, "g_re": gl.real, "g_im": gl.imag}
    grid = {"n_lambda": sg.n, "n_r": rg.n, "lam_min": sg.lam_min, "lam_max": sg.lam_max,
            "r_min": float(rg.r[0]), "r_max": float(rg.r[-1])}
    return ResultEnvelope({}, {"norm2": n2, "spectral_norm2": T.spectral_norm2(gl)}, grid, diag,
                          series={"m_lambda": {"lambda": sg.lam, "m_lambda": T.density}}, table=table)


def cmd_density(config):
    from .spectral import no_zero_margin, spectral_density

    p = _params(config)
    g = {"lam_min": 1e-4, "lam_max": 1e4, "n": 1000, **config.get("grid", {})}
    lam = np.geomspace(g["lam_min"], g["lam_max"], g["n"])
    lam = np.concatenate([-lam[::-1], lam])
    m = spectral_density(p, lam)
    diag = {"min_m": float(m.min()), "min_no_zero_margin": float(np.min(no_zero_margin(p, lam)))}
    series = {"m_lambda": {"lambda": lam, "m_lambda": m}}
    return ResultEnvelope({}, {"positive": bool(np.all(m > 0))}, {"n_lambda": lam.size, **g}, diag,
                          series=series, table=series["m_lambda"])


def cmd_verify_unitarity(config):
    from .spectral import UNITARITY_LADDER, unitarity_study

    p = _params(config)
    ladder = UNITARITY_LADDER[:2] if _opt(config, "quick", False) else UNITARITY_LADDER
    res = unitarity_study(p, ladder=ladder)
    payload = {k: res[k] for k in ("parseval_defect", "diag_defect", "roundtrip_err")}
    return ResultEnvelope({}, payload, grid={"ladder": [list(x) for x in ladder]},
                          diagnostics={"levels": res["levels"], "monotone": res["monotone"]})


def _counting_basis(config, p, potentials, E):
    from .counting import default_basis

    g = config.get("grid", {})
    basis = default_basis(p, potentials, E, **g)
    grid = {"n_lambda": basis.sg.n, "n_r": basis.rg.n, "lam_min": basis.sg.lam_min,
            "lam_max": basis.sg.lam_max, "r_min": float(basis.rg.r[0]), "r_max": float(basis.rg.r[-1])}
    return basis, grid


def _energy(config):
    E = _opt(config, "energy_cutoff")
    return math.inf if E is None else float(E)


def cmd_count_negative(config):
    from .counting import (
        CountReport, _restrict, bound_rhs_II, bound_rhs_III, count_negative, dense_count,
    )
    from .params import Regime, classify_regime

    p = _params(config)
    V = _load_potential(config["potential"]) if "potential" in config else None
    if V is None:
        raise ConfigError("config.potential: required")
    tau, E = _opt(config, "tau"), _energy(config)
    basis, grid = _counting_basis(config, p, [V], E)
    count, trace = count_negative(p, V, tau=tau, E=E, basis=basis, trace=True)
    reg = classify_regime(p)
    C, q = _opt(config, "constant"), _opt(config, "q")
    bound = math.nan
    if C is not None and reg is Regime.II:
        bound = bound_rhs_II(p, V, q if q is not None else 1 + p.beta.real, C)
    elif C is not None and reg is Regime.III:
        bound = bound_rhs_III(p, V, C)
    report = CountReport(count, bound, reg.value, {"nu": p.nu, "kappa": p.kappa, "theta": p.theta},
                         bound - count)
    diag = {"tau_trace": {"taus": trace.taus, "counts": trace.counts}, "converged": trace.converged}
    if trace.taus and not V.is_zero:
        lam, vt = _restrict(basis, basis.form_matrix(V), E)
        diag["dense_count_at_last_tau"] = dense_count(lam, vt, trace.taus[-1])
    return ResultEnvelope({}, report.to_dict(), {**grid, "E": E}, diag)


def cmd_lt_sum(config):
    from .counting import lt_bound_rhs, lt_sum

    p = _params(config)
    if "potential" not in config:
        raise ConfigError("config.potential: required")
    V = _load_potential(config["potential"])
    gamma = float(_opt(config, "gamma", 1.0))
    E = _energy(config)
    basis, grid = _counting_basis(config, p, [V], E)
    s = lt_sum(p, V, gamma, E=E, basis=basis)
    integral = lt_bound_rhs(p, V, gamma)
    K = _opt(config, "constant")
    payload = {"gamma": gamma, "lt_sum": s, "bound_integral": integral,
               "bound": math.nan if K is None else K * integral}
    return ResultEnvelope({}, payload, {**grid, "E": E},
                          {"layer_cake_rel_jump_tolerance": 1e-5, "tau_points": 48})


def _family(config, seed):
    from .potentials import PotentialSpec

    data = _load_json(config["family"], "family")
    msgs = _schema_errors(data, FAMILY_SCHEMA, "family")
    if msgs:
        raise ConfigError("invalid family:\n  " + "\n  ".join(msgs))
    if "calibration" in data:
        cal = [_load_potential(d) for d in data["calibration"]]
        hold = [_load_potential(d) for d in data.get("holdout", [])]
    else:
        n = int(data.get("random", {}).get("count", 10))
        rng = np.random.default_rng(seed)

        def draw():
            return [PotentialSpec.bump(rng.uniform(1, 4), rng.uniform(0.3, 1.5), rng.uniform(0.5, 12))
                    for _ in range(n)]

        cal, hold = draw(), draw()
    return data, cal, hold


def cmd_fit_constants(config):
    from .acceptance import _family_stats
    from .counting import fit_constants, lt_modified_case
    from .params import Regime, classify_regime, make_params

    kind = _opt(config, "regime")
    if kind not in ("II", "III", "LTa", "LTb"):
        raise ConfigError("config.options.regime: one of II, III, LTa, LTb")
    if "family" not in config:
        raise ConfigError("config.family: required")
    data, cal, hold = _family(config, config.get("seed", 0))
    p = make_params(data["nu"], data["kappa"], data["theta"])
    reg = classify_regime(p)
    need = {"II": reg is Regime.II, "III": reg is Regime.III,
            "LTa": not lt_modified_case(p), "LTb": lt_modified_case(p)}[kind]
    if not need:
        raise ConfigError(f"family parameters ({p.nu}, {p.kappa}, {p.theta}) do not fit bound {kind}")
    basis, grid = _counting_basis(config, p, cal + hold, math.inf)
    sc = _family_stats(kind, p, cal, basis)
    fit = fit_constants(sc[:, 0], sc[:, 1], kind)
    C = fit.constant

    def margins(stats):
        bound = C * stats[:, 1]
        if kind.startswith("LT"):
            return (bound - stats[:, 0]) / np.maximum(bound, 1e-300)
        return bound - stats[:, 0]

    payload = {"regime": kind, "constant": C, "ratios": list(fit.ratios),
               "calibration_min_margin": float(np.min(margins(sc)))}
    rows, tags = sc, ["calibration"] * len(cal)
    if hold:
        sh = _family_stats(kind, p, hold, basis)
        payload["holdout_min_margin"] = float(np.min(margins(sh)))
        payload["holdout_values"] = sh[:, 0]
        rows, tags = np.vstack([sc, sh]), tags + ["holdout"] * len(hold)
    series = {"count_vs_bound": {"set": tags, "value": rows[:, 0], "bound": C * rows[:, 1],
                                 "margin": margins(rows)}}
    return ResultEnvelope({}, payload, grid, {"calibration_size": len(cal), "holdout_size": len(hold)},
                          series=series)


def cmd_virtual_level(config):
    from .virtual import LN2, MAX_LOG2_N, detect_virtual_level, kinetic_energy, trial_spectral_grid

    p = _params(config)
    if "potential" not in config:
        raise ConfigError("config.potential: required")
    V = _load_potential(config["potential"]).scaled(float(_opt(config, "alpha", 1.0)))
    g = {"n_max": 1024, "extend_to_log2": MAX_LOG2_N, **config.get("grid", {})}
    rep = detect_virtual_level(p, V, n_max=g["n_max"], extend_to_log2=g["extend_to_log2"])
    kin = max(abs(kinetic_energy(trial_spectral_grid(p, row["log2_n"]), row["log2_n"])
                  / (row["log2_n"] * LN2) - 1) for row in rep.table)
    cols = {c: [row[c] for row in rep.table] for c in SERIES_COLUMNS["q_n"]}
    return ResultEnvelope({}, rep.to_dict(), g, {"kinetic_identity_rel_err": kin,
                                                 "ladder_length": len(rep.table)},
                          series={"q_n": cols})


def cmd_twod_analyze(config):
    from . import twodim as td

    nu = config.get("params", {}).get("nu")
    tsrc = config.get("theta_map")
    if tsrc is not None:
        tdata = dict(_load_json(tsrc, "theta_map"))
        if nu is not None:
            tdata.setdefault("nu", nu)
        tmap = td.ThetaMap.from_dict(tdata)
        if nu is not None and tmap.nu != float(nu):
            raise ConfigError("theta_map.nu: differs from --nu")
    elif nu is not None:
        tmap = td.ThetaMap.distinguished(float(nu))
    else:
        raise ConfigError("config.params.nu: required without a theta map")
    if "potential" not in config:
        raise ConfigError("config.potential: required")
    data = _load_json(config["potential"], "potential")
    msgs = _schema_errors(data, td.POTENTIAL2D_SCHEMA, "potential")
    if msgs:
        raise ConfigError("invalid planar potential:\n  " + "\n  ".join(msgs))
    Q = td.Potential2D.from_dict(data)
    alphas = tuple(_opt(config, "alphas", (1.0, 0.1)))
    rep = td.analyze_2d(tmap.nu, tmap, Q, kappa_cut=_opt(config, "kappa_cut"), alphas=alphas,
                        C_clr=_opt(config, "clr_constant"))
    grid = {"kappa_cut": _opt(config, "kappa_cut") or td.kappa_nu(tmap.nu) + 2, "n_phi": td.N_PHI}
    return ResultEnvelope({}, rep.to_dict(), grid, {"herbst_k": td.herbst_k(), "c_nu": td.c_nu(tmap.nu)})


def cmd_specialfn_eval(config):
    from .specialfn import kummer_m, kummer_m_regimes, kummer_u, kummer_u_regimes

    fn = _opt(config, "fn", "M")
    a = complex(_opt(config, "a_re", 0.0), _opt(config, "a_im", 0.0))
    b = complex(_opt(config, "b_re", 1.0), _opt(config, "b_im", 0.0))
    z = complex(_opt(config, "z_re", 0.0), _opt(config, "z_im", 1.0))
    if fn not in ("M", "U"):
        raise ConfigError("config.options.fn: M or U")
    val = complex(np.asarray((kummer_m if fn == "M" else kummer_u)(a, b, z)).ravel()[0])
    regimes = (kummer_m_regimes if fn == "M" else kummer_u_regimes)(a, b, np.array([z]))
    spread = {k: complex(v[0]) for k, v in regimes.items() if np.isfinite(v[0])}
    return ResultEnvelope({}, {"fn": fn, "a": a, "b": b, "z": z, "value": val},
                          diagnostics={"regimes": spread})


def cmd_repro(config):
    from . import acceptance

    suite = _opt(config, "suite", "acceptance")
    if suite != "acceptance":
        raise ConfigError(f"config.options.suite: unknown suite {suite!r}")
    only = _opt(config, "only")
    results = acceptance.run(only, echo=lambda line: print(line, file=sys.stderr, flush=True))
    payload = {"passed": all(r.passed for r in results),
               "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                             "details": r.details} for r in results]}
    env = ResultEnvelope({}, payload, diagnostics={"seconds": {r.number: r.seconds for r in results}})
    env.ok = payload["passed"]
    return env


_DISPATCH = {
    "classify": cmd_classify, "eval-solution": cmd_eval_solution,
    "wronskian-table": cmd_wronskian_table, "green": cmd_green, "transform": cmd_transform,
    "density": cmd_density, "verify-unitarity": cmd_verify_unitarity,
    "count-negative": cmd_count_negative, "lt-sum": cmd_lt_sum, "fit-constants": cmd_fit_constants,
    "virtual-level": cmd_virtual_level, "twod-analyze": cmd_twod_analyze,
    "specialfn-eval": cmd_specialfn_eval, "repro": cmd_repro,
}


def run(config: dict) -> ResultEnvelope:
    """Validate ``config`` and execute it."""
    validate_config(config)
    if "seed" in config:
        np.random.seed(config["seed"])
    env = _DISPATCH[config["command"]](config)
    env.command = {k: config[k] for k in ("command", "params", "theta_map", "grid", "potential",
                                          "family", "input", "options", "seed") if k in config}
    return env


# ---------------------------------------------------------------------------
# argument parsing


def _add_params(sp, theta=True):
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    if theta:
        sp.add_argument("--theta", type=float, required=True)


def _add_counting_grid(sp):
    sp.add_argument("--lam-min", type=float)
    sp.add_argument("--lam-max", type=float)
    sp.add_argument("--log-panels", type=int)
    sp.add_argument("--panel", type=float)
    sp.add_argument("--order", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="output format")
    common.add_argument("--plot", help="also emit this plot series (m_lambda, q_n, count_vs_bound)")
    common.add_argument("--plot-out", help="path for the plot series CSV")
    common.add_argument("--seed", type=int)
    ap = argparse.ArgumentParser(prog="coulomb-dirac", description=__doc__.split("\n\n")[0],
                                 parents=[common])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="run a JSON configuration file instead of a subcommand")
    subs = ap.add_subparsers(dest="command", metavar="COMMAND")

    class _Sub:
        def add_parser(self, name, **kw):
            return subs.add_parser(name, parents=[common], **kw)

    sub = _Sub()

    sp = sub.add_parser("classify", help="beta, regime and table cell of a parameter triple")
    _add_params(sp)

    sp = sub.add_parser("eval-solution", help="evaluate one of the eigensolutions")
    sp.add_argument("--family", dest="solution", choices=["M", "U", "inf", "zero"], required=True)
    _add_params(sp)
    sp.add_argument("--lambda-re", type=float, default=1.0)
    sp.add_argument("--lambda-im", type=float, default=0.0)
    sp.add_argument("--r", type=float, required=True)

    sp = sub.add_parser("wronskian-table", help="Wronskian of the Kummer solutions against the closed form")
    sp.add_argument("--sweep", default="default", choices=["default"])

    sp = sub.add_parser("green", help="Green function at one point")
    _add_params(sp)
    sp.add_argument("--lambda-re", type=float, required=True)
    sp.add_argument("--lambda-im", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)

    sp = sub.add_parser("transform", help="spectral transform of a spinor field (CSV)")
    _add_params(sp)
    sp.add_argument("--potential-free", action="store_true", default=True,
                    help="transform of the unperturbed operator (the only mode)")
    sp.add_argument("--input", help="field description JSON (default: a smooth bump)")
    sp.add_argument("--lam-min", type=float)
    sp.add_argument("--lam-max", type=float)
    sp.add_argument("--panels", type=int)
    sp.add_argument("--order", type=int)

    sp = sub.add_parser("density", help="spectral density sweep")
    _add_params(sp)
    sp.add_argument("--lam-min", type=float)
    sp.add_argument("--lam-max", type=float)
    sp.add_argument("--n", type=int)

    sp = sub.add_parser("verify-unitarity", help="Parseval, round-trip and diagonalisation defects")
    _add_params(sp)
    sp.add_argument("--quick", action="store_true", help="first two refinement levels only")

    sp = sub.add_parser("count-negative", help="negative eigenvalues of the projected operator")
    _add_params(sp)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--energy-cutoff", type=float)
    sp.add_argument("--constant", type=float, help="bound constant; adds the regime's bound")
    sp.add_argument("--q", type=float, help="exponent of the weighted bound")
    _add_counting_grid(sp)

    sp = sub.add_parser("lt-sum", help="sum of |eigenvalue|^gamma")
    _add_params(sp)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--energy-cutoff", type=float)
    sp.add_argument("--constant", type=float)
    _add_counting_grid(sp)

    sp = sub.add_parser("fit-constants", help="fit a bound constant on a potential family")
    sp.add_argument("--regime", choices=["II", "III", "LTa", "LTb"], required=True)
    sp.add_argument("--family", required=True)
    _add_counting_grid(sp)

    sp = sub.add_parser("virtual-level", help="trial-function scan for a virtual level at zero")
    _add_params(sp)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--n-max", type=int, default=1024)
    sp.add_argument("--extend-to-log2", type=float)

    sp = sub.add_parser("twod-analyze", help="channel-by-channel analysis of the planar operator")
    sp.add_argument("--nu", type=float)
    sp.add_argument("--theta-map")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--kappa-cut", type=float)
    sp.add_argument("--alphas", type=float, nargs="+")
    sp.add_argument("--clr-constant", type=float)

    sp = sub.add_parser("specialfn-eval", help="evaluate a Kummer or gamma function (diagnostic)")
    sp.add_argument("--fn", choices=["M", "U"], required=True)
    for name in ("a", "b", "z"):
        sp.add_argument(f"--{name}-re", type=float, default=0.0)
        sp.add_argument(f"--{name}-im", type=float, default=0.0)

    sp = sub.add_parser("repro", help="run the acceptance suite")
    sp.add_argument("--suite", default="acceptance", choices=["acceptance"])
    sp.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    return ap


_PARAM_KEYS = ("nu", "kappa", "theta")
_GRID_KEYS = ("lam_min", "lam_max", "log_panels", "panel", "order", "panels", "n", "n_max",
              "extend_to_log2")
_GLOBAL_KEYS = ("config", "out", "format", "plot", "plot_out", "seed", "command")


def config_from_args(ns: argparse.Namespace) -> dict:
    args = {k: v for k, v in vars(ns).items() if v is not None and k not in _GLOBAL_KEYS}
    cfg = {"command": ns.command}
    params = {k: args.pop(k) for k in _PARAM_KEYS if k in args}
    if params:
        cfg["params"] = params
    grid = {k: args.pop(k) for k in _GRID_KEYS if k in args}
    if grid:
        cfg["grid"] = grid
    for key in ("potential", "family", "input", "theta_map"):
        if key in args:
            cfg[key] = args.pop(key)
    args.pop("potential_free", None)
    if args:
        cfg["options"] = args
    if getattr(ns, "seed", None) is not None:
        cfg["seed"] = ns.seed
    return cfg


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if getattr(ns, "config", None):
            config = _load_json(ns.config, "config")
            if not isinstance(config, dict):
                raise ConfigError("config: top level must be an object")
        elif ns.command:
            config = config_from_args(ns)
        else:
            parser.print_usage(sys.stderr)
            return 2
        out = dict(config.get("output", {}))
        for key, attr in (("path", "out"), ("format", "format"), ("plot", "plot"), ("plot_path", "plot_out")):
            val = getattr(ns, attr, None)
            if val is not None:
                out[key] = val
        plot = out.get("plot")
        if plot and plot not in COMMAND_SERIES.get(config.get("command"), ()):
            known = ", ".join(COMMAND_SERIES.get(config.get("command"), ())) or "none"
            raise UnknownSeries(f"command {config.get('command')!r} has no series {plot!r} (available: {known})")
        env = run(config)
        fmt = out.get("format") or ("csv" if config["command"] in ("wronskian-table", "transform") else "json")
        if fmt == "csv":
            if env.table is None:
                raise ConfigError(f"command {config['command']!r} has no CSV form")
            _write(to_csv(env.table), out.get("path"))
            if config["command"] == "transform" and out.get("path"):
                print(dumps(env), file=sys.stderr)
        else:
            _write(dumps(env) + "\n", out.get("path"))
        if out.get("plot"):
            text = emit_plotdata(env, out["plot"], out.get("plot_path"))
            if not out.get("plot_path"):
                sys.stdout.write(text)
        return 0 if env.ok else 1
    except NonConvergence as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    except (CoulombDiracError, jsonschema.ValidationError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
