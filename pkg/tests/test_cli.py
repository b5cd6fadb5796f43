import csv
import json
import subprocess
import sys

import pytest

from hermite_schrodinger import __version__
from hermite_schrodinger.cli import COMMANDS, OUT_ENV, main


def run(tmp_path, *argv):
    code = main(list(argv) + ["--out-dir", str(tmp_path)])
    return code


def load(tmp_path, tag):
    return json.loads((tmp_path / f"{tag}.json").read_text())


def test_all_subcommands_registered():
    assert set(COMMANDS) == {"propagate", "verify-transfer", "strichartz", "oscillatory",
                             "maximal", "local-l1", "divergence", "theorem3-bump",
                             "theorem3-logtail"}


def test_propagate_eigenflow(tmp_path):
    assert run(tmp_path, "propagate", "--n-max", "4", "--times", "0.1", "1.2", "--check") == 0
    out = load(tmp_path, "propagate")
    assert out["version"] == __version__
    assert out["config"]["n_max"] == 4 and out["config"]["command"] == "propagate"
    assert out["results"]["max_eigen_error"] < 1e-6
    assert out["passed"] is True


def test_propagate_norm_conservation(tmp_path):
    assert run(tmp_path, "propagate", "--initial", "random", "--method", "spectral",
               "--times", "0.2", "3.0", "--check", "--csv") == 0
    rows = list(csv.reader(open(tmp_path / "propagate_norms.csv")))
    assert rows[0] == ["t", "l2_norm"] and len(rows) == 3


def test_strichartz_gaussian(tmp_path):
    assert run(tmp_path, "strichartz", "--p", "6", "--q", "6", "--initial", "gaussian",
               "--check") == 0
    res = load(tmp_path, "strichartz")["results"]
    assert res["rel_err"] < 0.01
    assert {"lhs", "rhs", "rel_err"} <= set(res)


def test_strichartz_inadmissible_exits_2(tmp_path, capsys):
    assert run(tmp_path, "strichartz", "--p", "4", "--q", "4") == 2
    err = capsys.readouterr().err
    assert "1/p + 2/q = 1/2" in err and "--p 4" in err
    assert not (tmp_path / "strichartz.json").exists()


def test_oscillatory_sweep_csv(tmp_path):
    assert run(tmp_path, "oscillatory", "--sweep", "default", "--check", "--csv") == 0
    out = load(tmp_path, "oscillatory")
    assert out["results"]["max_ratio"] <= out["results"]["ceiling"]
    rows = list(csv.reader(open(tmp_path / "oscillatory_ratios.csv")))
    assert rows[0] == ["a", "b", "ratio"]
    assert len(rows) == 1 + 14 * 14
    assert all(r[2] == "%.17g" % float(r[2]) for r in rows[1:])


def test_threshold_failure_exits_4_only_with_check(tmp_path):
    assert run(tmp_path, "oscillatory", "--ceiling", "1.0", "--check") == 4
    assert load(tmp_path, "oscillatory")["passed"] is False
    assert run(tmp_path, "oscillatory", "--ceiling", "1.0") == 0


def test_numerical_error_exits_3(tmp_path, capsys):
    code = run(tmp_path, "propagate", "--n-max", "0", "--n-points", "64", "--times", "0.3")
    assert code == 3
    assert "resolved" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["propagate", "--n-points", "8"],
    ["propagate", "--half-extent", "-1"],
    ["divergence", "--depth", "9"],
    ["divergence", "--s", "0.3"],
    ["local-l1", "--n-x", "4"],
    ["local-l1", "--interval", "-30", "1"],
    ["theorem3-bump", "--x0", "1", "16"],
    ["theorem3-logtail", "--v0", "0.05"],
    ["oscillatory", "--sweep", "custom", "--k-min", "3", "--k-max", "1"],
])
def test_invalid_configuration_exits_2(tmp_path, capsys, argv):
    assert run(tmp_path, *argv) == 2
    assert "error:" in capsys.readouterr().err


def test_maximal_gaussian(tmp_path):
    assert run(tmp_path, "maximal", "--initial", "gaussian", "--n-t", "16", "--check") == 0
    assert load(tmp_path, "maximal")["results"]["gaussian_error"] < 1e-6


def test_local_l1_small_run(tmp_path):
    assert run(tmp_path, "local-l1", "--n-funcs", "3", "--n-t", "16", "--n-x", "33",
               "--check", "--csv") == 0
    rows = list(csv.reader(open(tmp_path / "local-l1_ratios.csv")))
    assert rows[0] == ["function", "ratio", "ratio_refined"] and len(rows) == 4


def test_theorem3_logtail_small_run(tmp_path):
    assert run(tmp_path, "theorem3-logtail", "--v0", "1e-3", "1e-5", "--check") == 0
    res = load(tmp_path, "theorem3-logtail")["results"]
    assert res["band_width"] <= 3.0


def test_json_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["verify-transfer", "--n-funcs", "2", "--seed", "7", "--check"]
    assert main(argv + ["--out-dir", str(a)]) == 0
    assert main(argv + ["--out-dir", str(b)]) == 0
    assert (a / "verify-transfer.json").read_bytes() == (b / "verify-transfer.json").read_bytes()


def test_seed_changes_random_results(tmp_path):
    for seed in ("1", "2"):
        main(["propagate", "--initial", "random", "--times", "0.3", "--seed", seed,
              "--tag", f"s{seed}", "--out-dir", str(tmp_path)])
    assert load(tmp_path, "s1")["config"]["seed"] == 1
    assert load(tmp_path, "s1")["results"] != load(tmp_path, "s2")["results"]


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    assert main(["propagate", "--n-max", "1", "--times", "0.3", "--tag", "envrun"]) == 0
    assert (tmp_path / "envrun.json").exists()


def test_module_entry_point_version():
    out = subprocess.run([sys.executable, "-m", "hermite_schrodinger", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == __version__
