import json

import numpy as np
import pytest
from click.testing import CliRunner

from reebgss.cli import (
    RunRecord,
    ScenarioError,
    StageError,
    export_figure_data,
    main,
    parse_scenario,
    run,
    validate_artifact,
)

BASE = """schema_version = 1
n = 1
regime = "thm1"
stages = ["build", "certify"]
seed = 11
"""


def write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_build_certify_scenario(tmp_path):
    rec = run(write(tmp_path, BASE), tmp_path / "out")
    assert [s["name"] for s in rec.stages] == ["build", "certify"]
    assert rec.ok and rec.seed == 11
    cert = json.loads((tmp_path / "out" / "certificate.json").read_text())
    assert cert["bound"] == 2 and cert["brute_force"] == 2
    validate_artifact(cert, "certificate")
    validate_artifact(json.loads((tmp_path / "out" / "run.json").read_text()), "run_record")
    chain = json.loads((tmp_path / "out" / "chain.json").read_text())
    assert chain["counted_handles"] == ["h0", "h1"]


def test_thm2_scenario(tmp_path):
    rec = run(write(tmp_path, BASE.replace('"thm1"', '"thm2"').replace("\nn = 1", "\nn = 2")),
              tmp_path / "o")
    assert rec.ok
    assert json.loads((tmp_path / "o" / "certificate.json").read_text())["bound"] == 2


@pytest.mark.parametrize(
    "text,where",
    [
        (BASE + "[integrator]\nrtol = -1e-9\n", ":7:1:"),
        (BASE.replace("\nn = 1", "\nn = 0"), ":2:1:"),
        (BASE.replace('"thm1"', '"thm3"'), ":3:1:"),
        (BASE + "[perturbation]\nkam_deltas = [1e-3, 1e-4]\n", ":7:1:"),
        (BASE + "bogus = = 1\n", ":6:9:"),
        ("n = 1\n", ":1:1:"),
        (BASE.replace("schema_version = 1", "schema_version = 2"), ":1:1:"),
    ],
)
def test_scenario_errors_have_positions(text, where):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text, "s.toml")
    assert f"s.toml{where}" in str(exc.value)


def test_reproducible_artifacts(tmp_path):
    text = BASE.replace('["build", "certify"]', '["build", "flow", "certify", "kam"]')
    sc = write(tmp_path, text)
    r1 = run(sc, tmp_path / "a")
    r2 = run(sc, tmp_path / "b")
    assert r1.scenario_hash == r2.scenario_hash
    for name in r1.artifacts:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    r3 = run(sc, tmp_path / "c", seed=12)
    assert (tmp_path / "a" / "kam.json").read_bytes() != (tmp_path / "c" / "kam.json").read_bytes()
    kam = json.loads((tmp_path / "a" / "kam.json").read_text())
    assert kam["norms_decreasing"] and kam["nondegeneracy"]["passed"]
    assert all(c["residual"] < 1e-10 for c in kam["circles"])
    assert r3.seed == 12


def test_stage_failure_keeps_earlier_artifacts(tmp_path):
    text = BASE.replace('["build", "certify"]', '["build", "kam"]') + "[kam]\ntargets = [0.5]\n"
    with pytest.raises(StageError, match="not Diophantine"):
        run(write(tmp_path, text), tmp_path / "o")
    rec = RunRecord.from_dict(json.loads((tmp_path / "o" / "run.json").read_text()))
    assert rec.status("build") == "ok" and rec.status("kam") == "failed"
    assert (tmp_path / "o" / "chain.json").exists()


def test_lockfile(tmp_path):
    out = tmp_path / "o"
    out.mkdir()
    (out / ".lock").write_text("1")
    with pytest.raises(StageError, match="locked"):
        run(write(tmp_path, BASE), out)


def test_export(tmp_path):
    out = tmp_path / "o"
    run(write(tmp_path, BASE), out)
    names = export_figure_data(out, "f1f2")
    data = np.loadtxt(out / names[0], delimiter=",", skiprows=1)
    assert data.shape == (1001, 3)
    assert np.allclose(data[:, 2][data[:, 0] >= 0.5], 1.0)
    blocks = (out / export_figure_data(out, "blocks-thm2")[0]).read_text().splitlines()
    assert blocks[0] == "index,block,handle,counted,zero_link_with" and len(blocks) == 6
    with pytest.raises(StageError, match="morse"):
        export_figure_data(out, "morse-levels")
    with pytest.raises(KeyError):
        export_figure_data(out, "fig99")


def test_cli_verbs(tmp_path):
    runner = CliRunner()
    sc = write(tmp_path, BASE)
    out = tmp_path / "o"
    res = runner.invoke(main, ["certify", "--scenario", str(sc), "--out", str(out), "--transcript"])
    assert res.exit_code == 0, res.output
    assert "at least 2 boundary components" in res.output
    assert (out / "transcript.txt").exists()
    res = runner.invoke(main, ["build", "--scenario", str(sc), "--out", str(out), "--seed", "11"])
    assert res.exit_code == 0
    rec = json.loads((out / "run.json").read_text())
    assert [s["name"] for s in rec["stages"]] == ["build", "certify"]
    res = runner.invoke(main, ["export", "blocks", "--out", str(out)])
    assert res.exit_code == 0 and "fig_blocks_thm1.csv" in res.output
    res = runner.invoke(main, ["export", "nope", "--out", str(out)])
    assert res.exit_code == 2 and "unknown figure id" in res.output
    bad = write(tmp_path, BASE + "[chart]\nT = 1.0\n", "bad.toml")
    res = runner.invoke(main, ["build", "--scenario", str(bad), "--out", str(out)])
    assert res.exit_code == 1 and "bad.toml:7:1" in res.output
    res = runner.invoke(main, ["build", "--seed", "-1"])
    assert res.exit_code == 2


def test_morse_scenario_reports_multipliers(tmp_path):
    rec = run(write(tmp_path, BASE.replace('["build", "certify"]', '["morse"]')), tmp_path / "m")
    assert rec.ok
    rep = json.loads((tmp_path / "m" / "morse.json").read_text())
    assert np.allclose(rep["saddle"]["multipliers"], np.exp([-2 * np.pi, 2 * np.pi]), rtol=1e-4)
    names = export_figure_data(tmp_path / "m", "morse-levels")
    assert (tmp_path / "m" / names[0]).read_text().startswith("level,curve,r,theta")
