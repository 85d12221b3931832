import csv
import io
import json
import subprocess
import sys

from bcheun.cli import main

BASE = ["--gamma", "0.5", "--delta", "0.3", "--epsilon", "1", "--alpha", "1.2", "--q", "0.7"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_csv_columns(capsys):
    code, out, _ = run(capsys, "eval", *BASE, "--method", "gamma_delta", "--z", "0.2,0.05", "--z", "0.25")
    assert code == 0
    r = rows(out)
    assert list(r[0]) == ["z_re", "z_im", "u_re", "u_im", "residual", "terms_used", "converged"]
    assert len(r) == 2 and all(x["converged"] == "1" for x in r)
    assert float(r[0]["residual"]) <= 1e-8


def test_eval_outside_region(capsys):
    code, out, err = run(capsys, "eval", *BASE, "--method", "beta_single", "--z", "0.7")
    assert code == 1 and out == ""
    assert "outside validity region" in err and len(err.strip().splitlines()) == 1
    code, out, _ = run(capsys, "eval", *BASE, "--method", "beta_single", "--z", "0.7", "--allow-outside")
    assert code in (0, 2) and len(rows(out)) == 1


def test_eval_quadrature_constant_column(capsys):
    code, out, _ = run(capsys, "eval", "--gamma", "0.5", "--delta", "0.3", "--epsilon", "1",
                       "--alpha", "0", "--q", "0", "--method", "quadrature", "--c1", "2", "--c2", "0",
                       "--grid", "0.2:0.8:4@0.3")
    assert code == 0
    r = rows(out)
    assert len(r) == 4 and {x["u_re"] for x in r} == {"2.0"} and {x["u_im"] for x in r} == {"0.0"}


def test_eval_compare(capsys):
    code, out, err = run(capsys, "eval", *BASE, "--method", "gamma_eps", "--z", "0.2", "--z", "0.1,0.1",
                         "--compare", "origin_series")
    assert code == 0
    r = rows(out)
    assert "diff" in r[0] and max(float(x["diff"]) for x in r) <= 1e-7
    assert "max_diff" in err


def test_eval_nonconverged_exit_2(capsys):
    code, out, _ = run(capsys, "eval", *BASE, "--method", "gamma_delta", "--z", "0.25", "--order", "2")
    assert code == 2 and rows(out)[0]["converged"] == "0"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", *BASE, "--method", "beta_double", "--z", "0.6", "--output", "json")
    d = json.loads(out)
    assert code == 0 and d["method"] == "beta_double" and len(d["rows"]) == 1


def test_eval_params_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"gamma": [0.5, 0], "delta": [0.3, 0], "epsilon": [1, 0],
                             "alpha": [1.2, 0], "q": [0.7, 0]}))
    a = run(capsys, "eval", "--params", str(f), "--method", "origin_series", "--z", "0.3")
    b = run(capsys, "eval", *BASE, "--method", "origin_series", "--z", "0.3")
    assert a[0] == 0 and a[1] == b[1]


def test_bad_parameters_exit_1(capsys):
    code, _, err = run(capsys, "eval", "--gamma", "x,y", "--method", "origin_series", "--z", "0.3")
    assert code == 1 and err.startswith("error:")
    code, _, err = run(capsys, "eval", *BASE, "--method", "closed_form_eps0", "--z", "0.3")
    assert code == 1


def test_deterministic_output(capsys):
    argv = ["eval", *BASE, "--method", "beta_single", "--grid", "0.2:0.3:3@0", "--meta"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a[1] == b[1] and a[1]


def test_converge_beta_single(capsys):
    code, out, _ = run(capsys, "converge", *BASE, "--method", "beta_single", "--z", "0.2334")
    r = rows(out)
    assert code == 0 and [int(x["N"]) for x in r] == [5, 10, 20, 40]
    res = [float(x["max_residual"]) for x in r]
    assert res[-1] <= 1e-4 * res[0]


def test_converge_alpha_zero_exit_1(capsys):
    code, _, _ = run(capsys, "converge", "--gamma", "0.5", "--delta", "0.3", "--epsilon", "1",
                     "--alpha", "0", "--q", "1", "--method", "beta_single", "--z", "0.3")
    assert code == 1


def test_converge_terminating_params_flat(capsys):
    code, out, _ = run(capsys, "terminate", "--gamma", "0.5", "--epsilon", "1", "--N", "1")
    p = json.loads(out)["params"]
    z = 0.4 * complex(*p["q"]) / complex(*p["alpha"])
    argv = ["converge", *(f"--{k}={p[k][0]},{p[k][1]}" for k in ("gamma", "delta", "epsilon", "alpha", "q")),
            "--method", "beta_single", "--orders", "1,2,4", f"--z={z.real},{z.imag}", "--allow-outside"]
    code, out, _ = run(capsys, *argv)
    res = [float(x["max_residual"]) for x in rows(out)]
    assert code == 0 and max(res) <= 1e-10


def test_recurrence_check(capsys):
    code, out, _ = run(capsys, "recurrence-check", *BASE, "--kind", "v12")
    assert code == 0 and "S" in out
    # the printed leading slot of the five-term band disagrees with the engine
    code, out, _ = run(capsys, "recurrence-check", *BASE, "--kind", "w23")
    assert code == 2


def test_terminate(capsys):
    code, out, _ = run(capsys, "terminate", "--gamma", "0.5", "--epsilon", "1", "--N", "1",
                       "--seed-q", "1", "--seed-delta", "1")
    d = json.loads(out)
    assert code == 0 and d["status"] == "terminating" and max(d["tail_norms"][:2]) <= 1e-12


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bcheun", "eval", *BASE, "--method", "origin_series",
                           "--z", "0.3"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("z_re,")


def test_usage_error_exit_1(capsys):
    code, _, err = run(capsys, "eval", "--no-such-flag")
    assert code == 1 and "error" in err
