import subprocess
import sys

import numpy as np
import pytest

from resonant_disk import __version__
from resonant_disk.cli import build_parser, main, resolve
from resonant_disk.errors import ConfigurationError
from resonant_disk.grid import make_grid, read_field_csv, write_field_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fields(stdout):
    return dict(line.split(": ", 1) for line in stdout.splitlines() if ": " in line)


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_eigen(capsys, tmp_path):
    code, out, _ = run(capsys, "eigen", "--n", "512", "--out", str(tmp_path))
    info = fields(out)
    assert code == 0
    assert float(info["relative_error"]) <= 1e-3
    assert float(info["lambda1"]) == pytest.approx(5.783185962946785, rel=1e-3)
    r, phi = read_field_csv(tmp_path / "phi1.csv")
    assert r.size == 514 and phi[-1] == 0 and np.all(phi[:-1] > 0)


def test_eigen_coarse_grid_is_falsified(capsys, tmp_path):
    code, out, _ = run(capsys, "eigen", "--n", "8", "--out", str(tmp_path))
    assert code == 4
    assert float(fields(out)["relative_error"]) > 1e-3


def test_comparison(capsys, tmp_path):
    code, out, _ = run(capsys, "comparison", "--out", str(tmp_path), "--seed", "0")
    info = fields(out)
    assert code == 0
    assert info["morse_index"] == "1" and info["degree"] == "-1"
    assert info["nonzero_roots"] == "0"
    assert int(info["converged_to_zero"]) + int(info["not_converged"]) == 20
    rows = (tmp_path / "probe.csv").read_text().splitlines()
    assert len(rows) == 21


def test_comparison_coarse_saturated_root_is_falsified(capsys, tmp_path):
    code, out, _ = run(capsys, "comparison", "--n", "64", "--seed", "68", "--starts", "5",
                       "--out", str(tmp_path))
    info = fields(out)
    assert code == 4
    assert info["nonzero_roots"] == "1" and info["saturated_roots"] == "1"


def test_continue(capsys, tmp_path):
    code, out, _ = run(capsys, "continue", "--amplitude", "8", "--out", str(tmp_path))
    info = fields(out)
    assert code == 0
    assert info["verdict"] == "reached_t1" and info["solution"] == "nontrivial"
    assert float(info["residual_norm"]) <= 1e-10
    assert float(info["identity_residual"]) <= 1e-8
    assert (tmp_path / "trace.csv").exists() and (tmp_path / "solution.csv").exists()


def test_continue_trivial_solution(capsys, tmp_path):
    # f = -1 is solved by u = 0 at every t
    code, out, _ = run(capsys, "continue", "--forcing", "polynomial", "--coefficients", "-1",
                       "--n", "64", "--out", str(tmp_path))
    assert code == 0
    assert fields(out)["solution"] == "trivial"


def test_continue_refuses_nonpositive_mass(capsys, tmp_path):
    code, _, err = run(capsys, "continue", "--amplitude", "-1", "--out", str(tmp_path))
    assert code == 2
    assert "necessary condition" in err


def test_continue_step_collapse(capsys, tmp_path):
    with pytest.warns(UserWarning):
        code, out, _ = run(capsys, "continue", "--amplitude", "40", "--n", "128",
                           "--out", str(tmp_path))
    assert code == 6
    assert fields(out)["verdict"] == "step_collapse"


def test_continue_blow_up(capsys, tmp_path):
    code, out, _ = run(capsys, "continue", "--amplitude", "8", "--blowup-cap", "1",
                       "--n", "128", "--out", str(tmp_path))
    assert code == 5
    assert fields(out)["verdict"] == "blow_up"


def test_continue_from_file(capsys, tmp_path):
    g = make_grid(64)
    path = tmp_path / "f.csv"
    write_field_csv(path, g, -(1 - g.r.astype(float) ** 2))
    code, out, _ = run(capsys, "continue", "--n", "64", "--forcing", "from-file",
                       "--forcing-file", str(path), "--target-mass", "5", "--out", str(tmp_path))
    assert code == 0
    assert float(fields(out)["forcing_mass"]) == pytest.approx(5.0, rel=1e-12)


def test_scan(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--masses", "1,4,8,12", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "scan.csv").read_text().splitlines()
    assert lines[0] == "mass,verdict,sup_norm,exp_mass,peak_radius,steps"
    assert all(",reached_t1," in l for l in lines[1:])


def test_scan_failure_exit(capsys, tmp_path):
    # a tiny blow-up cap makes sub-threshold rows fail
    code, _, _ = run(capsys, "scan", "--masses", "4,8", "--blowup-cap", "0.5", "--n", "64",
                     "--out", str(tmp_path))
    assert code == 7


def test_scan_above_threshold_not_required(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--masses", "8,40", "--n", "128", "--out", str(tmp_path))
    assert code == 0
    assert "outside guarantee" in out


@pytest.mark.parametrize("argv", [
    ["eigen", "--n", "4"],
    ["comparison", "--epsilon-g", "30"],
    ["comparison", "--epsilon-g", "-1"],
    ["continue", "--forcing", "sawtooth"],
    ["continue", "--min-step", "0.5"],
    ["scan", "--masses", "8,4"],
    ["scan", "--masses", "abc"],
    ["eigen", "--n", "ten"],
])
def test_configuration_errors(capsys, tmp_path, argv):
    code, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2
    assert "error" in err


def test_all_problems_reported_together(tmp_path):
    args = build_parser().parse_args(["continue", "--n", "3", "--min-step", "0.9",
                                      "--forcing", "nope"])
    with pytest.raises(ConfigurationError) as info:
        resolve(args)
    assert len(info.value.problems) >= 3


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 64\namplitude = 2\nout = %s\n" % (tmp_path / "a"))
    code, out, _ = run(capsys, "continue", "--config", str(cfg))
    assert code == 0
    assert float(fields(out)["forcing_mass"]) == pytest.approx(2.0, rel=1e-12)
    code, out, _ = run(capsys, "continue", "--config", str(cfg), "--amplitude", "3")
    assert float(fields(out)["forcing_mass"]) == pytest.approx(3.0, rel=1e-12)


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[run]\nn = 64\nbogus = 1\n")
    code, _, err = run(capsys, "eigen", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 2 and "bogus" in err


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "resonant_disk", "eigen", "--n", "64",
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0
    assert "lambda1:" in res.stdout
