import subprocess
import sys

import pytest

from caacs.bench.cli import main
from caacs.io import read_gtsplib, write_geo_csv, GeoPoint


def _usage(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


def test_generate_then_solve_then_oracle(tmp_path, capsys):
    out = tmp_path / "g.gtsp"
    assert main(["generate", "--nodes", "10", "--clusters", "3", "--seed", "4", "--out", str(out)]) == 0
    inst = read_gtsplib(out)
    assert (inst.n_nodes, inst.n_clusters) == (10, 3)

    hist = tmp_path / "h.csv"
    assert main(["solve", str(out), "--variant", "acs", "--ants", "5", "--max-iter", "20",
                 "--stagnation", "0", "--out", str(hist)]) == 0
    text = capsys.readouterr().out
    assert "iterations 20" in text
    assert hist.read_text().splitlines()[0] == "iteration,best_cost,best_carbon"
    assert len(hist.read_text().splitlines()) == 21

    assert main(["oracle", str(out)]) == 0
    assert "objective cost" in capsys.readouterr().out
    assert main(["oracle", str(out), "--objective", "carbon"]) == 0


def test_solve_geo_csv(tmp_path, capsys):
    pts = [GeoPoint(38.9, -77.4, "IAD", "o"), GeoPoint(40.7, -74.2, "EWR", "m"),
           GeoPoint(51.5, -0.5, "LHR", "m"), GeoPoint(25.3, 55.4, "DXB", "d")]
    path = tmp_path / "airports.csv"
    write_geo_csv(pts, path)
    assert main(["solve", str(path), "--ants", "4", "--max-iter", "5"]) == 0
    out = capsys.readouterr().out
    assert "IAD" in out and "DXB" in out
    assert main(["solve", str(path), "--k", "2", "--ants", "4", "--max-iter", "5"]) == 0


def test_experiment_command(tmp_path, capsys):
    plan = tmp_path / "p.cfg"
    plan.write_text("[plan]\nexperiment = a_sweep\ntrials = 2\nnodes = 15\na_values = 0, 50\n"
                    "output = r.csv\n[solver]\nmax_iterations = 10\nn_ants = 5\n")
    assert main(["experiment", str(plan)]) == 0
    assert (tmp_path / "r.csv").exists()
    assert main(["experiment", str(plan), "--out", str(tmp_path / "o.csv"), "--workers", "1"]) == 0
    assert (tmp_path / "o.csv").read_text().startswith("# experiment=a_sweep")


@pytest.mark.parametrize("argv", [
    [], ["solve"], ["bogus"], ["solve", "x.gtsp", "--variant", "nope"], ["generate", "--nodes", "5"],
    ["oracle", "x", "--objective", "time"], ["solve", "x", "--ants", "many"],
])
def test_usage_errors_exit_1(argv):
    assert _usage(argv) == 1


def test_data_errors_exit_2(tmp_path, fixtures, capsys):
    assert main(["solve", str(tmp_path / "missing.gtsp")]) == 2
    assert main(["solve", str(fixtures / "bad_orphan.gtsp")]) == 2
    assert main(["solve", str(fixtures / "3eucl6.gtsp"), "--a", "0.5"]) == 2
    assert main(["generate", "--nodes", "3", "--clusters", "5", "--seed", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["oracle", str(fixtures / "3burma14.gtsp"), "--budget", "10"]) == 2
    bad = tmp_path / "p.cfg"
    bad.write_text("[plan]\nexperiment = nope\n")
    assert main(["experiment", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_module_entry_point(fixtures):
    res = subprocess.run([sys.executable, "-m", "caacs", "oracle", str(fixtures / "3eucl6.gtsp")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "cost     15" in res.stdout
