import csv
import json

import numpy as np
import pytest

from risconn.cli import main
from risconn.config import config_from_dict, config_to_dict, dumps_result, load_config
from risconn.ga import GaConfig
from risconn.placement import AdamConfig
from risconn.scenario import generate_scenario
from risconn.solver import SWEEP_COLUMNS, SolveConfig, solve

FAST_ARGS = {"ga": {"generations": 15}, "adam": {"iterations": 10}}


def run(*args):
    assert main([str(a) for a in args]) == 0


def test_config_roundtrip_and_defaults():
    cfg, radio = config_from_dict({})
    assert cfg == SolveConfig() and radio is None
    cfg = SolveConfig(um=3, ga=GaConfig(generations=7), adam=AdamConfig(step=0.01), normalize_reliability=True)
    back, _ = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert back == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        config_from_dict({"umm": 2})
    with pytest.raises(ValueError):
        config_from_dict({"ga": {"popsize": 2}})


def test_toml_and_json_configs_agree(tmp_path):
    (tmp_path / "c.toml").write_text(
        'um = 1\nnormalize_reliability = true\n[ga]\ngenerations = 12\n[radio]\nris_sinr_threshold_db = 25.0\n')
    (tmp_path / "c.json").write_text(json.dumps(
        {"um": 1, "normalize_reliability": True, "ga": {"generations": 12}, "radio": {"ris_sinr_threshold_db": 25.0}}))
    a, ra = load_config(tmp_path / "c.toml")
    b, rb = load_config(tmp_path / "c.json")
    assert a == b and ra == rb
    assert a.ga.generations == 12 and ra.ris_sinr_threshold_db == 25.0 and ra.d2d_snr_threshold_db == 83.0


def test_result_json_is_deterministic_and_rounds_db():
    scn = generate_scenario(8, 2, 20.0, 3)
    cfg, _ = config_from_dict(FAST_ARGS)
    a, b = solve(scn, cfg), solve(scn, cfg)
    assert dumps_result(a) == dumps_result(b)
    data = json.loads(dumps_result(a))
    assert "wall_time" not in data
    assert "wall_time" in json.loads(dumps_result(a, include_timing=True))
    for link in data["links"]:
        for key in ("exact_sinr_db", "approx_sinr_db"):
            v = link[key]
            assert v is None or float(f"{v:.6g}") == v


def test_cli_scenario_and_solve(tmp_path):
    s1, s2 = tmp_path / "s1.json", tmp_path / "s2.json"
    run("scenario", "gen", "--ues", 8, "--riss", 2, "--area", 20, "--seed", 5, "-o", s1)
    run("scenario", "gen", "--ues", 8, "--riss", 2, "--area", 20, "--seed", 5, "-o", s2)
    assert s1.read_bytes() == s2.read_bytes()
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(FAST_ARGS))
    r1, r2, traj = tmp_path / "r1.json", tmp_path / "r2.json", tmp_path / "t.csv"
    run("solve", "--scenario", s1, "--config", cfg, "--scheme", "proposed", "-o", r1, "--trajectory", traj)
    run("solve", "--scenario", s1, "--config", cfg, "--scheme", "proposed", "-o", r2)
    assert r1.read_bytes() == r2.read_bytes()
    res = json.loads(r1.read_text())
    assert res["lambda2_final"] >= res["lambda2_initial"]
    assert res["scheme"] == "proposed" and res["scenario_seed"] == 5
    header = traj.read_text().splitlines()[0]
    assert header == "iter,lambda2,feasible,pos_m0_x,pos_m0_y,pos_m1_x,pos_m1_y"


def test_cli_sweep(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(FAST_ARGS))
    out = tmp_path / "sweep.csv"
    run("sweep", "--param", "ues", "--values", "5,6", "--seeds", 2, "--schemes", "ris-free,single-beam",
        "--riss", 1, "--area", 15, "--config", cfg, "-o", out)
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == 2 * 2 * 3
    assert sum(r["seed"] == "mean" for r in rows) == 4


def test_cli_beamplot(tmp_path):
    out = tmp_path / "p.csv"
    run("beamplot", "--elements", 10, "--spacing-frac", 0.5, "--aoa-deg", 10, "--targets-deg=-30,40", "-o", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["angle_deg", "pdaf"]
    assert len(rows) == 1802
    assert rows[1][0] == "-90.0" and rows[-1][0] == "90.0"
    vals = np.array([float(r[1]) for r in rows[1:]])
    assert vals.max() <= 100 + 1e-9


def test_cli_rates_and_fixture(tmp_path):
    fx, out = tmp_path / "fx.json", tmp_path / "rates.csv"
    run("fixture", "-o", fx)
    run("rates", "--fixture", fx, "--n-values", "8,16", "--um", 1, "-o", out)
    rows = list(csv.DictReader(out.open()))
    assert [r["elements"] for r in rows] == ["8", "16"]
    assert all(float(r["relative_gap"]) >= 0 for r in rows)


def test_cli_graph_export_and_info(tmp_path):
    s, g, info = tmp_path / "s.json", tmp_path / "g.json", tmp_path / "i.json"
    run("scenario", "gen", "--ues", 6, "--riss", 0, "--area", 10, "--seed", 1, "-o", s)
    run("graph", "export", "--scenario", s, "-o", g)
    data = json.loads(g.read_text())
    assert data["vertices"] == 6
    assert all(e["kind"] == "d2d" for e in data["edges"])
    run("graph", "info", "--graph", g, "-o", info)
    out = json.loads(info.read_text())
    assert len(out["fiedler_vector"]) == 6 and len(out["reliability"]) == 6
    assert (out["lambda2"] > 0) == out["connected"]


def test_cli_reports_bad_input(tmp_path, capsys):
    assert main(["solve", "--scenario", str(tmp_path / "missing.json")]) == 2
