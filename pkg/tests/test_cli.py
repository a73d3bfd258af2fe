import csv
import json

import pytest
from click.testing import CliRunner

from bjfront.cli import ScenarioConfig, load_config, main
from bjfront.scenarios import w_states


def _write(tmp_path, text):
    p = tmp_path / "cfg.toml"
    p.write_text(text)
    return p


def test_run_w_artifacts(tmp_path):
    out = tmp_path / "w"
    cfg = _write(tmp_path, f'scenario = "W"\noutput_dir = "{out}"\n')
    r = CliRunner().invoke(main, ["run", "--config", str(cfg)])
    assert r.exit_code == 0, r.output
    for name in ("fronts.csv", "events.jsonl", "census.json", "profile.csv", "metadata.json"):
        assert (out / name).exists()
    rows = list(csv.DictReader(open(out / "fronts.csv", newline="")))
    assert [r["group"] for r in rows[:6]] == ["A"] * 6
    assert rows[0]["polyline"].startswith("0 -20;")
    lines = (out / "events.jsonl").read_text().splitlines()
    first = json.loads(lines[0])
    assert first["taxonomy"] == "13" and len(first["incoming"]) == 2
    census = json.loads((out / "census.json").read_text())
    assert [c["n"] for c in census["counts"]] == sorted(c["n"] for c in census["counts"])
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["paper_faithful"] is False
    assert len(meta["config_hash"]) == 64
    assert meta["calibrated"]["K"] > 0


def test_rerun_is_byte_identical(tmp_path, monkeypatch):
    cfg = _write(tmp_path, 'scenario = "W"\nt_end = 450.0\noutput_dir = "unused"\n')
    outs = []
    for name in ("a", "b"):
        monkeypatch.setenv("BJFRONT_OUTPUT_DIR", str(tmp_path / name))
        r = CliRunner().invoke(main, ["run", "--config", str(cfg)])
        assert r.exit_code == 0, r.output
        outs.append(tmp_path / name)
    for f in ("fronts.csv", "events.jsonl", "census.json", "metadata.json"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    assert not (tmp_path / "unused").exists()


def test_bad_config_reports_structured_error(tmp_path):
    cfg = _write(tmp_path, 'scenario = "bogus"\n')
    r = CliRunner().invoke(main, ["run", "--config", str(cfg)])
    assert r.exit_code == 2
    err = json.loads(r.output.strip().splitlines()[-1])
    assert err["error"] == "ConfigError"
    cfg = _write(tmp_path, 'scenario = "W"\ncolour = 3\n')
    assert CliRunner().invoke(main, ["run", "--config", str(cfg)]).exit_code == 2


def test_paper_faithful_datum_leaves_solver_range(tmp_path):
    cfg = _write(tmp_path, f'scenario = "tildeU"\nt_end = 1.0\noutput_dir = "{tmp_path}"\n')
    r = CliRunner().invoke(main, ["run", "--config", str(cfg)])
    assert r.exit_code == 2
    assert json.loads(r.output.strip().splitlines()[-1])["error"] == "StateOutOfRange"


def test_config_parsing(tmp_path):
    cfg = load_config(_write(tmp_path, 'scenario = "perturbed(4)"\nepsilon = 0.4\n[overrides]\nzeta_c = 0.0\n'))
    assert cfg.scenario == "perturbed" and cfg.seed == 4
    assert cfg.effective_overrides() == {"zeta_c": 0.0}
    assert not cfg.paper_faithful
    assert ScenarioConfig(scenario="tildeU").validate().paper_faithful
    with pytest.raises(Exception):
        ScenarioConfig(scenario="perturbed").validate()


def test_verify_only(tmp_path):
    r = CliRunner().invoke(main, ["verify", "--only", "eigen", "--only", "lemma32"])
    assert r.exit_code == 0, r.output
    assert "PASS" in r.output and "2-2 interactions" in r.output
    r = CliRunner().invoke(main, ["verify", "--only", "nope"])
    assert r.exit_code == 2
    r = CliRunner().invoke(main, ["verify", "--list"])
    assert "interaction12" in r.output.split()


def test_verify_fails_on_corrupted_threshold():
    from bjfront.acceptance import _lipschitz_run

    r = CliRunner().invoke(main, ["verify", "--only", "ledger", "--mu-nu", "1"])
    _lipschitz_run.cache_clear()
    assert r.exit_code == 1
    assert any(line.startswith("FAIL") and "NP total" in line for line in r.output.splitlines())


def test_export_profile(tmp_path):
    r = CliRunner().invoke(main, ["export-profile", "--scenario", "W", "--n", "5",
                                  "--output-dir", str(tmp_path)])
    assert r.exit_code == 0, r.output
    rows = list(csv.reader(open(tmp_path / "profile.csv", newline="")))
    assert rows[0] == ["x", "u", "v", "w"] and len(rows) == 6
    assert [float(v) for v in rows[3][1:]] == pytest.approx(list(w_states()[1]), rel=1e-15)  # x = 0
    r = CliRunner().invoke(main, ["export-profile", "--scenario", "lipschitz_V", "--epsilon", "0.4",
                                  "--n", "101", "--output-dir", str(tmp_path / "v")])
    assert r.exit_code == 0, r.output
