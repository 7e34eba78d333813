import json
import subprocess
import sys

import pytest

from bootperc.cli import main
from bootperc.config import ConfigError, config_from_dict, config_from_mapping, load_config
from bootperc.graph import read_edgelist, sample_gnp

MINIMAL = """
[graph]
n = 1000
p = 0.002
[init]
a0 = 50
[ensemble]
runs = 4
"""


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_analytic_g(capsys):
    assert main(["analytic", "g", "--c", "1"]) == 0
    assert capsys.readouterr().out.strip().startswith("0.735758")


def test_run_with_nothing_active(capsys):
    assert main(["run", "--n", "3", "--p", "1", "--a0", "0", "--seed", "7"]) == 0
    out = _json(capsys)
    assert out["A_star"] == 0 and out["T"] == 0 and out["edges"] == 3


def test_run_writes_trajectory(tmp_path, capsys):
    traj = tmp_path / "t.csv"
    assert main(["run", "--n", "200", "--c", "3", "--theta", "0.4", "--seed", "1",
                 "--traj", str(traj)]) == 0
    out = _json(capsys)
    rows = traj.read_text().splitlines()
    assert rows[0] == "t,A_t" and len(rows) == out["T"] + 2
    assert rows[-1] == f"{out['T']},{out['A_star']}"


def test_run_matches_ensemble_member_zero(capsys):
    assert main(["run", "--n", "500", "--p", "0.006", "--theta", "0.3", "--seed", "11"]) == 0
    single = _json(capsys)
    assert main(["ensemble", "--n", "500", "--p", "0.006", "--theta", "0.3", "--runs", "1",
                 "--base-seed", "11"]) == 0
    ens = _json(capsys)
    assert ens["points"][0]["mean_Astar_frac"] == single["A_star_frac"]


def test_missing_config_exits_2(capsys):
    assert main(["ensemble", "--config", "missing.toml"]) == 2
    assert "missing.toml" in capsys.readouterr().err


def test_unknown_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_exits_2(capsys):
    assert main(["gen", "--n", "5", "--p", "0.5", "--seed", "1", "--bogus"]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bootperc", "analytic", "g", "--c", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("0.73575888")


def test_minimal_config_defaults(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL)
    cfg = load_config(path)
    assert cfg.rule.variant == "majority" and not cfg.rule.strict_majority
    assert cfg.eps == 0.1 and cfg.almost_percolation_fraction == 0.99
    assert cfg.base_seed == 0 and cfg.a0 == 50


def test_q_and_a0_conflict(tmp_path, capsys):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL.replace("a0 = 50", "a0 = 50\nq = 0.3"))
    with pytest.raises(ConfigError, match="mutually exclusive"):
        load_config(path)
    assert main(["ensemble", "--config", str(path)]) == 2
    assert "init.q" in capsys.readouterr().err


def test_c_becomes_p():
    doc = {"graph": {"n": 2000, "c": 4}, "init": {"theta": 0.2}, "ensemble": {"runs": 1}}
    cfg = config_from_mapping(doc)
    assert cfg.p == 4 / 2000
    assert cfg.p * cfg.n == pytest.approx(4.0, rel=1e-15)


@pytest.mark.parametrize("doc,key", [
    ({"graph": {"p": 0.1}, "init": {"a0": 1}, "ensemble": {"runs": 1}}, "graph.n"),
    ({"graph": {"n": 10, "p": "x"}, "init": {"a0": 1}, "ensemble": {"runs": 1}}, "graph.p"),
    ({"graph": {"n": 10, "p": 0.1}, "init": {"a0": 1}, "ensemble": {}}, "ensemble.runs"),
    ({"graph": {"n": 10, "p": 0.1, "colour": 1}, "init": {"a0": 1}, "ensemble": {"runs": 1}},
     "graph.colour"),
    ({"graph": {"n": 10, "p": 0.1}, "init": {"a0": 1}, "rule": {"variant": "proportional"},
      "ensemble": {"runs": 1}}, "rule.alpha"),
])
def test_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        config_from_mapping(doc)


def test_flags_override_config(tmp_path, capsys):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL)
    assert main(["ensemble", "--config", str(path), "--runs", "2", "--q", "0.1"]) == 0
    cfg = _json(capsys)["config"]
    assert cfg["runs"] == 2 and cfg["q"] == 0.1 and cfg["a0"] is None and cfg["n"] == 1000


def test_json_round_trip_reproduces_hash(tmp_path, capsys):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL + '[rule]\nvariant = "proportional"\nalpha = 0.4\nstrict = true\n'
                    + "[sweep]\nparam = \"q\"\nvalues = [0.1, 0.2]\n")
    out = tmp_path / "res"
    assert main(["sweep", "--config", str(path), "--out", str(out)]) == 0
    doc = json.loads((tmp_path / "res.json").read_text())
    cfg = config_from_dict(doc["config"])
    assert cfg.config_hash() == doc["config_hash"]
    assert doc["seed_scheme"] and doc["base_seed"] == 0
    assert doc["crossing_status"] in ("inside grid", "outside grid")
    capsys.readouterr()


def test_ensemble_csv_header(tmp_path, capsys):
    out = tmp_path / "e"
    assert main(["ensemble", "--n", "300", "--p", "0.01", "--a0", "30", "--runs", "3",
                 "--out", str(out)]) == 0
    raw = (tmp_path / "e.csv").read_bytes()
    assert raw.startswith(b"param_value,runs,mean_Astar_frac,std,q05,q50,q95,frac_full_perc,"
                          b"frac_almost_perc,frac_spread_gt_eps,mean_T\r\n")
    assert raw.count(b"\r\n") == 2


def test_sweep_requires_sweep_section(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL)
    assert main(["sweep", "--config", str(path)]) == 2


def test_sweep_range_grid(tmp_path, capsys):
    path = tmp_path / "cfg.toml"
    path.write_text(MINIMAL.replace("a0 = 50\n", "")
                    + "[sweep]\nparam = \"theta\"\nstart = 0.1\nstop = 0.3\nstep = 0.1\n")
    assert main(["sweep", "--config", str(path)]) == 0
    doc = _json(capsys)
    assert [pt["param_value"] for pt in doc["points"]] == [0.1, 0.2, 0.3]


def test_gen_writes_edge_list(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["gen", "--n", "80", "--p", "0.1", "--seed", "3", "--out", str(out)]) == 0
    assert _json(capsys)["edges"] == read_edgelist(out).edge_count
    assert read_edgelist(out).same_structure(sample_gnp(80, 0.1, 3))


def test_gen_to_stdout(capsys):
    assert main(["gen", "--n", "4", "--p", "1", "--seed", "0"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "4 6"


def test_oracle_check(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["oracle-check", "--max-n", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and len(doc["equivalence"]) == 3
    assert main(["oracle-check", "--max-n", "9"]) == 2
    capsys.readouterr()


def test_analytic_subcommands(tmp_path, capsys):
    assert main(["analytic", "pi-exact", "--n", "4", "--t", "1", "--p", "0.5"]) == 0
    assert capsys.readouterr().out.strip() == "0.375"
    assert main(["analytic", "pi-poisson", "--n", "1000", "--t", "300", "--p", "0.002"]) == 0
    assert 0 < float(capsys.readouterr().out) < 1
    assert main(["analytic", "f", "--n", "1000", "--c", "2", "--theta", "0.3", "--x", "0"]) == 0
    assert float(capsys.readouterr().out) == 0.3
    assert main(["analytic", "x0", "--n", "10000", "--c", "2", "--theta", "0.3"]) == 0
    r = _json(capsys)
    assert r["sign_change"] and 0.3 < r["x0"] < 1
    assert main(["analytic", "classify", "--n", "100000", "--p", "1e-7", "--a0", "1000"]) == 0
    assert _json(capsys)["tag"] == "SPARSE_SUBCRITICAL"
    assert main(["analytic", "bounds", "--n", "10000", "--p", "0.02", "--a0", "5500",
                 "--t", "5500"]) == 0
    assert _json(capsys)["delta_upper_bound"] == 1.0
    grid = tmp_path / "f.csv"
    assert main(["analytic", "f", "--n", "1000", "--c", "2", "--theta", "0.3",
                 "--grid-step", "0.01", "--csv", str(grid)]) == 0
    lines = grid.read_text().splitlines()
    assert lines[0] == "x,value" and len(lines) == 102


def test_analytic_errors(capsys):
    assert main(["analytic", "pi-exact", "--n", "4", "--t", "9", "--p", "0.5"]) == 2
    assert main(["analytic", "g"]) == 2
    assert main(["analytic", "x0", "--n", "100", "--c", "2", "--theta", "0.3",
                 "--grid-step", "0.5"]) == 2
    capsys.readouterr()


def test_numerical_failure_exit_code(monkeypatch, capsys):
    import bootperc.analytics as an
    monkeypatch.setattr(an, "f_c_theta", lambda x, prm, limit=False: -1.0)
    assert main(["analytic", "x0", "--n", "100", "--c", "2", "--theta", "0.3"]) == 3
    capsys.readouterr()
