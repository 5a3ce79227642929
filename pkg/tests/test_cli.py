import json
import os

import pytest

from rescurve.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, run
from rescurve.curveset import TabulatedCurve


@pytest.fixture(scope="module")
def db_path(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("cli") / "db.json")
    assert run(["build", "--out", path]) == EXIT_OK
    return path


def test_usage_errors(capsys):
    assert run([]) == EXIT_USAGE
    assert run(["eval"]) == EXIT_USAGE
    assert run(["no-such-command"]) == EXIT_USAGE
    assert "rescurve:" in capsys.readouterr().err


def test_build_prints_totals(db_path, capsys):
    run(["build", "--out", db_path])
    out = capsys.readouterr().out
    assert "oil:" in out and "wind:" in out
    assert os.path.exists(db_path)


def test_eval_at_quantity(db_path, capsys):
    code = run(
        ["eval", "--db", db_path, "--resource", "hydro", "--at-quantity", "12000"]
    )
    assert code == EXIT_OK
    value = float(capsys.readouterr().out.strip())
    assert value == pytest.approx(68.0, rel=0.10)


def test_eval_at_cost(db_path, capsys):
    code = run(["eval", "--db", db_path, "--resource", "oil", "--at-cost", "3.0"])
    assert code == EXIT_OK
    value = float(capsys.readouterr().out.strip())
    assert value > 0.0


def test_eval_beyond_potential_is_a_numeric_error(db_path, capsys):
    code = run(
        ["--json", "eval", "--db", db_path, "--resource", "hydro",
         "--at-quantity", "1e12"]
    )
    assert code == EXIT_NUMERIC
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "numeric"


def test_missing_database_is_a_data_error(tmp_path, capsys):
    code = run(
        ["eval", "--db", str(tmp_path / "nope.json"), "--resource", "oil",
         "--at-cost", "3"]
    )
    assert code == EXIT_DATA


def test_fit_command(tmp_path, capsys):
    points = tmp_path / "points.csv"
    points.write_text("C,N\n7.2\n")
    assert run(["fit", "--kind", "hierarchical", "--points", str(points)]) == EXIT_DATA
    points.write_text(
        "C,N\n6.0,100.0\n8.0,300.0\n12.0,600.0\n20.0,850.0\n"
    )
    code = run(
        ["fit", "--kind", "hierarchical", "--points", str(points), "--augment"]
    )
    assert code == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["converged"]
    assert result["A"] >= 850.0


def test_sample_is_seed_deterministic(db_path, capsys):
    args = ["sample", "--db", db_path, "--resource", "wind", "--n", "5",
            "--seed", "11"]
    assert run(args) == EXIT_OK
    first = capsys.readouterr().out
    assert run(args) == EXIT_OK
    assert capsys.readouterr().out == first
    assert run(args[:-1] + ["12"]) == EXIT_OK
    assert capsys.readouterr().out != first
    assert len(first.strip().splitlines()) == 5


def test_sample_writes_curve_files(db_path, tmp_path, capsys):
    out = tmp_path / "draws"
    code = run(
        ["sample", "--db", db_path, "--resource", "solar", "--n", "3",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    files = sorted(os.listdir(out))
    assert len(files) == 3
    TabulatedCurve.from_csv(out / files[0])  # parses back


def test_deplete_trajectory(db_path, tmp_path, capsys):
    traj = tmp_path / "traj.csv"
    traj.write_text("dQ\n1000\n2000\n3000\n")
    code = run(
        ["deplete", "--db", db_path, "--resource", "oil", "--traj", str(traj)]
    )
    assert code == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("step,Q,marginal_cost,average_cost")
    marginals = [float(line.split(",")[2]) for line in lines[1:]]
    assert marginals == sorted(marginals)
    traj.write_text("dQ\n1e15\n")
    code = run(
        ["deplete", "--db", db_path, "--resource", "oil", "--traj", str(traj)]
    )
    assert code == EXIT_NUMERIC


def test_aggregate_regroups_regions(db_path, tmp_path, capsys):
    groups = tmp_path / "groups.csv"
    groups.write_text(
        "region,country\nAmericas,USA\nAmericas,Canada\nAmericas,Brazil\n"
        "Americas,Rest America\n"
    )
    code = run(
        ["aggregate", "--db", db_path, "--resource", "oil",
         "--regions", str(groups)]
    )
    assert code == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["Americas"] > 0.0


def test_export_round_trips_through_csv(db_path, tmp_path, capsys):
    out = tmp_path / "curves"
    code = run(["export", "--db", db_path, "--out", str(out), "--grid", "40"])
    assert code == EXIT_OK
    files = os.listdir(out)
    assert any(f.startswith("wind__Global__mode") for f in files)
    curve = TabulatedCurve.from_csv(out / "wind__Global__mode.csv")
    assert curve.costs.size == 40
    assert curve.quantity_unit == "PJ/y"
