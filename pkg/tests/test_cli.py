import json
import os
import subprocess
import sys

import pytest

from coulomb_dirac import cli
from coulomb_dirac.errors import NonConvergence, UnknownSeries

POT = {"kind": "scalar_radial", "pieces": [{"type": "bump", "center": 2.0, "width": 1.0, "height": 6.0}]}


@pytest.fixture
def pot(tmp_path):
    path = tmp_path / "pot.json"
    path.write_text(json.dumps(POT))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--nu", "0.4", "--kappa", "0.5", "--theta", "0")
    d = json.loads(out)
    assert code == 0
    assert d["payload"] == {"beta": 0.29999999999999993, "beta_imaginary": False, "in_M": True,
                            "regime": "I", "table_cell": "Ib", "branch": "real"}
    assert d["version"] and d["command"]["command"] == "classify"


def test_classify_outside_admissible_set(capsys):
    code, out, _ = run(capsys, "classify", "--nu", "0.2", "--kappa", "1.5", "--theta", "0.7")
    d = json.loads(out)["payload"]
    assert code == 0 and d["in_M"] is False and d["regime"] is None


def test_complex_beta_serialised(capsys):
    _, out, _ = run(capsys, "classify", "--nu", "0.5", "--kappa", "0.3", "--theta", "0")
    assert json.loads(out)["payload"]["beta"] == {"re": 0.0, "im": 0.4}


def test_floats_have_17_digits():
    assert cli.dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
    assert cli.dumps([float("nan"), 1.0, 2]) == "[null, 1.0, 2]"


def test_wronskian_table_csv(capsys):
    code, out, _ = run(capsys, "wronskian-table", "--sweep", "default")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("nu,kappa,W_MU_computed,W_MU_formula,abs_err")
    assert len(lines) == 13
    assert max(float(row.split(",")[4]) for row in lines[1:]) < 1e-12


def test_eval_solution_residual(capsys):
    code, out, _ = run(capsys, "eval-solution", "--family", "inf", "--nu", "0.4", "--kappa", "0.5",
                       "--theta", "1.0", "--lambda-re", "1", "--lambda-im", "0.5", "--r", "2")
    d = json.loads(out)
    assert code == 0 and d["payload"]["family"] == "inf"
    assert d["diagnostics"]["ode_residual"] < 1e-8


def test_green_symmetry(capsys):
    _, out, _ = run(capsys, "green", "--nu", "0.7", "--kappa", "0.5", "--theta", "0.3",
                    "--lambda-re", "0.5", "--lambda-im", "1", "--x", "1", "--y", "2")
    assert json.loads(out)["diagnostics"]["symmetry_defect"] < 1e-12


def test_config_file_is_byte_identical(tmp_path, capsys, pot):
    cfg = {"command": "count-negative", "params": {"nu": 0.4, "kappa": 0.5, "theta": 1.0},
           "potential": pot, "options": {"constant": 0.5}, "seed": 3,
           "grid": {"log_panels": 12, "panel": 1.0}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = [run(capsys, "--config", str(path))[1] for _ in range(2)]
    assert outs[0] == outs[1]
    d = json.loads(outs[0])
    assert d["payload"]["count"] >= 1 and d["diagnostics"]["converged"]
    assert d["grid"]["n_lambda"] > 0 and d["command"]["seed"] == 3


def test_schema_errors_name_the_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"command": "classify", "params": {"nu": "x"}, "bogus": 1}))
    code, _, err = run(capsys, "--config", str(path))
    assert code == 2
    assert "config.params.nu" in err and "'bogus' was unexpected" in err


def test_bad_potential(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"kind": "scalar_radial", "pieces": [{"type": "bump", "width": -1}]}))
    code, _, err = run(capsys, "count-negative", "--nu", "0.4", "--kappa", "0.5", "--theta", "1",
                       "--potential", str(path))
    assert code == 2 and "potential.pieces.0.width" in err


def test_not_self_adjoint_is_config_error(capsys, pot):
    code, _, err = run(capsys, "count-negative", "--nu", "0.2", "--kappa", "1.5", "--theta", "0.7",
                       "--potential", pot)
    assert code == 2 and "NotSelfAdjoint" in err


def test_non_convergence_exit_code(capsys, monkeypatch):
    def boom(config):
        raise NonConvergence("no limit")

    monkeypatch.setitem(cli._DISPATCH, "classify", boom)
    code, _, err = run(capsys, "classify", "--nu", "0.4", "--kappa", "0.5", "--theta", "0")
    assert code == 3 and "no limit" in err


def test_plot_series(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, _ = run(capsys, "density", "--nu", "0.4", "--kappa", "0.5", "--theta", "0.7", "--n", "4",
                     "--plot", "m_lambda", "--plot-out", str(out))
    rows = out.read_text().splitlines()
    assert code == 0 and rows[0] == "lambda,m_lambda" and len(rows) == 9


def test_unknown_series(capsys):
    code, out, err = run(capsys, "density", "--nu", "0.4", "--kappa", "0.5", "--theta", "0.7",
                         "--n", "4", "--plot", "q_n")
    assert code == 2 and out == "" and "UnknownSeries" in err
    env = cli.ResultEnvelope({}, {}, series={"m_lambda": {"lambda": [1.0], "m_lambda": [2.0]}})
    with pytest.raises(UnknownSeries):
        cli.emit_plotdata(env, "count_vs_bound")
    assert cli.emit_plotdata(env, "m_lambda") == "lambda,m_lambda\n1,2\n"


def test_virtual_level_series(tmp_path, capsys, pot):
    out = tmp_path / "q.csv"
    code, stdout, _ = run(capsys, "virtual-level", "--nu", "0.3", "--kappa", "0", "--theta", "0.7",
                          "--potential", pot, "--alpha", "0.1", "--plot", "q_n", "--plot-out", str(out))
    d = json.loads(stdout)
    assert code == 0 and d["payload"]["verdict"] == "NEGATIVE_SPECTRUM"
    assert out.read_text().startswith("log2_n,ln_n,v_form,q_n")


def test_fit_constants_random_family(tmp_path, capsys):
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"nu": 0.4, "kappa": 0.5, "theta": 1.0, "random": {"count": 3}}))
    out = tmp_path / "c.csv"
    code, stdout, _ = run(capsys, "--seed", "5", "fit-constants", "--regime", "II", "--family", str(fam),
                          "--log-panels", "12", "--panel", "1.0", "--plot", "count_vs_bound",
                          "--plot-out", str(out))
    d = json.loads(stdout)["payload"]
    assert code == 0 and d["constant"] > 0 and d["calibration_min_margin"] == 0.0
    rows = out.read_text().splitlines()
    assert rows[0] == "set,value,bound,margin" and len(rows) == 7


def test_fit_constants_wrong_regime(tmp_path, capsys):
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"nu": 0.4, "kappa": 0.5, "theta": 1.0, "random": {"count": 2}}))
    code, _, err = run(capsys, "fit-constants", "--regime", "III", "--family", str(fam))
    assert code == 2 and "do not fit bound III" in err


def test_twod_analyze(tmp_path, capsys):
    q = tmp_path / "q.json"
    q.write_text(json.dumps({"kind": "radial", "profile": POT}))
    tm = tmp_path / "tm.json"
    tm.write_text(json.dumps({"theta": {"0.5": 1.0}}))
    code, out, _ = run(capsys, "twod-analyze", "--nu", "0.5", "--theta-map", str(tm), "--potential", str(q))
    d = json.loads(out)
    assert code == 0 and d["payload"]["verdict"] == "NEGATIVE_SPECTRUM"


def test_transform_csv(tmp_path, capsys):
    g = tmp_path / "g.csv"
    code, _, err = run(capsys, "transform", "--nu", "0.4", "--kappa", "0.5", "--theta", "0.7",
                       "--potential-free", "--panels", "128", "--out", str(g))
    assert code == 0
    assert g.read_text().splitlines()[0] == "lambda,m_lambda,g_re,g_im"
    assert json.loads(err)["diagnostics"]["parseval_defect"] < 0.05


def test_transform_samples_input(tmp_path, capsys):
    import numpy as np

    r = np.linspace(0.5, 3.0, 400)
    s = np.exp(-1 / (1 - ((2 * r - 3.5) / 2.5) ** 2 + 1e-300))
    s[[0, -1]] = 0
    spec = {"kind": "samples", "r": r.tolist(), "re": np.stack([s, 0.5 * s], -1).tolist()}
    inp = tmp_path / "f.json"
    inp.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "--format", "json", "transform", "--nu", "0.4", "--kappa", "0.5",
                       "--theta", "0.7", "--input", str(inp), "--panels", "256")
    d = json.loads(out)
    assert code == 0 and d["diagnostics"]["parseval_defect"] < 0.05


def test_repro_subset(capsys):
    code, out, err = run(capsys, "repro", "--suite", "acceptance", "--only", "1", "3")
    assert code == 0 and json.loads(out)["payload"]["passed"] is True
    assert "[PASS]  1" in err and "[PASS]  3" in err


def test_module_entry_point_and_thread_variable():
    env = dict(os.environ, COULOMB_DIRAC_THREADS="1")
    proc = subprocess.run([sys.executable, "-m", "coulomb_dirac", "classify", "--nu", "0.4", "--kappa",
                           "0.5", "--theta", "1"], capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["payload"]["regime"] == "II"
    code = "import os, coulomb_dirac.cli; print(os.environ['OMP_NUM_THREADS'])"
    env.pop("OMP_NUM_THREADS", None)
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    assert proc.stdout.strip() == "1"


def test_no_command(capsys):
    assert cli.main([]) == 2
