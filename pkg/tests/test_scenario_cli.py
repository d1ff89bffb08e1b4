import json
from fractions import Fraction

import pytest

from homgrowth import cli
from homgrowth.moebius import INF, GroupElement, arc
from homgrowth.scenario import ScenarioError, load, loads

from conftest import SCENARIOS

BASIC = """\
name: tiny
generators:
  r: "3 -4 4 3"
U: full
V: [["-1", "1"]]
base_points: ["0", "inf"]
caps:
  max_radius: 5
"""


def test_load_shipped_scenarios():
    sc = load(SCENARIOS / "rotation.yaml")
    assert sc.spec.S.element("r") == GroupElement(3, -4, 4, 3)
    assert sc.spec.V == arc(-1, 1)
    assert sc.base_points[0] == 0
    fs = load(SCENARIOS / "free_semigroup.yaml")
    assert fs.base_points[-1] is INF
    assert fs.caps.max_radius == 12
    for name in ("sanov", "parabolic", "pingpong_tampered"):
        load(SCENARIOS / f"{name}.yaml")


def test_defaults():
    sc = loads(BASIC)
    assert sc.caps.max_radius == 5 and sc.caps.Ncap == 20
    assert sc.base_points == [Fraction(0), INF] or tuple(sc.base_points) == (Fraction(0), INF)


@pytest.mark.parametrize("text, line, needle", [
    (BASIC.replace('"3 -4 4 3"', '"1 2 2 4"'), 3, "det"),
    (BASIC.replace('"3 -4 4 3"', '"1 x 0 1"'), 3, ""),
    (BASIC.replace('base_points: ["0", "inf"]', 'base_points: ["0", "7"]').replace("U: full", 'U: [["-2", "5"]]'), 6, "not in U"),
    (BASIC.replace('V: [["-1", "1"]]', 'V: [["-1", "3"]]').replace("U: full", 'U: [["-2", "3"]]'), 5, "closure"),
    (BASIC + "bogus: 1\n", 9, "bogus"),
    (BASIC.replace("max_radius: 5", "max_radius: -1"), 8, ""),
])
def test_errors_carry_positions(text, line, needle):
    with pytest.raises(ScenarioError) as info:
        loads(text, "bad.yaml")
    err = info.value
    assert err.line == line, str(err)
    assert err.column is not None
    assert str(err).startswith(f"bad.yaml:{line}:")
    assert needle.lower() in str(err).lower()


def test_malformed_yaml():
    with pytest.raises(ScenarioError) as info:
        loads("name: [unclosed\n", "x.yaml")
    assert info.value.line is not None


# --- CLI ---------------------------------------------------------------------


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_growth_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    code = run("growth", "--scenario", SCENARIOS / "rotation.yaml", "--out", out, "--max-radius", 16)
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["germ_ball_size"] == 33 and summary["germ"] == "POLYNOMIAL"
    names = sorted(p.name for p in out.iterdir())
    assert names == sorted(["germ_ball_p0.csv", "orbit_ball_p0.csv", "germ_growth_p0.csv",
                            "orbit_growth_p0.csv", "germ_spheres_p0.json",
                            "germ_verdict_p0.json", "orbit_verdict_p0.json"])
    rows = (out / "germ_growth_p0.csv").read_text().splitlines()
    assert rows[0] == "radius,count" and rows[-1] == "16,33"
    verdict = json.loads((out / "germ_verdict_p0.json").read_text())
    assert verdict["radius"] == 16 and verdict["kind"] == "POLYNOMIAL"


def test_growth_json_format_and_env_default(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    code = run("growth", "--scenario", SCENARIOS / "parabolic.yaml", "--max-radius", 6,
               "--format", "json")
    assert code == 0
    orbit = json.loads((tmp_path / "env" / "orbit_ball_p0.json").read_text())
    assert len(orbit) == 1
    germ = json.loads((tmp_path / "env" / "germ_ball_p0.json").read_text())
    assert len(germ) == 13


def test_invalid_scenario_writes_nothing(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("growth", "--scenario", SCENARIOS / "outside.yaml", "--out", out) == 2
    assert not out.exists() or not any(out.iterdir())
    err = capsys.readouterr().err
    assert "outside.yaml:6:" in err


def test_missing_scenario_and_bad_index(tmp_path):
    assert run("growth", "--out", tmp_path) == 2
    assert run("growth", "--scenario", tmp_path / "nope.yaml", "--out", tmp_path) == 2
    assert run("growth", "--scenario", SCENARIOS / "rotation.yaml", "--out", tmp_path,
               "--point-index", 9) == 2
    assert run("growth", "--scenario", SCENARIOS / "rotation.yaml", "--threads", 0) == 2


def test_cap_exhausted_exit_code(tmp_path):
    text = (SCENARIOS / "sanov.yaml").read_text()
    path = tmp_path / "capped.yaml"
    path.write_text(text.replace("max_nodes: 2000000", "max_nodes: 100"))
    assert run("growth", "--scenario", path, "--out", tmp_path / "o") == 3
    assert not (tmp_path / "o").exists() or not any((tmp_path / "o").iterdir())


def test_recurrence_and_reverify(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("recurrence", "--scenario", SCENARIOS / "rotation.yaml", "--out", out) == 0
    cert = out / "recurrence_certificate.json"
    assert json.loads(cert.read_text())["kind"] == "recurrence"
    capsys.readouterr()
    assert run("reverify", cert) == 0
    assert capsys.readouterr().out.strip() == "true"

    data = json.loads(cert.read_text())
    data["pieces"] = data["pieces"][:1]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run("reverify", bad) == 4
    assert capsys.readouterr().out.strip() == "false"
    bad.write_text("{not json")
    assert run("reverify", bad) == 2


def test_claim_b_via_cli(tmp_path):
    out = tmp_path / "o"
    code = run("recurrence", "--scenario", SCENARIOS / "rotation.yaml", "--out", out,
               "--claim-b-exclude", 3)
    assert code == 0
    data = json.loads((out / "claim_b_certificate.json").read_text())
    assert data["kind"] == "claim-B"
    assert run("reverify", out / "claim_b_certificate.json") == 0


def test_parabolic_recurrence_inconclusive(tmp_path):
    out = tmp_path / "o"
    assert run("recurrence", "--scenario", SCENARIOS / "parabolic.yaml", "--out", out) == 3
    assert not (out / "recurrence_certificate.json").exists()


def test_pingpong_commands(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("pingpong", "verify", "--scenario", SCENARIOS / "free_semigroup.yaml") == 0
    capsys.readouterr()
    assert run("pingpong", "verify", "--scenario", SCENARIOS / "pingpong_tampered.yaml") == 4
    report = json.loads(capsys.readouterr().out)
    assert report["verified"] is False and report["pair"] == [0, 1]
    assert run("pingpong", "search", "--scenario", SCENARIOS / "free_semigroup.yaml",
               "--out", out) == 0
    cert = out / "pingpong_certificate.json"
    assert run("reverify", cert) == 0
    assert run("pingpong", "verify", "--certificate", cert) == 0


def test_coverage_command(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("coverage", "--scenario", SCENARIOS / "free_semigroup.yaml", "--out", out) == 0
    data = json.loads((out / "pair_coverage.json").read_text())
    assert data["covered"] is True and data["witness"][0]["pair"] == [0, 1]
    assert run("coverage", "--scenario", SCENARIOS / "rotation.yaml", "--out", out) == 2


def test_compare_commands(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("compare", "quasi-lattices", "--scenario", SCENARIOS / "rotation.yaml",
               "--out", out, "--max-radius", 12) == 0
    rep = json.loads((out / "compare_quasi-lattices.json").read_text())
    assert rep["verified"] and rep["K_C"] <= 3
    assert run("compare", "generating-systems", "--scenario", SCENARIOS / "sanov.yaml",
               "--out", out, "--max-radius", 4) == 0
    rep = json.loads((out / "compare_generating-systems.json").read_text())
    assert rep["common_elements"] > 1

    u, v = tmp_path / "u.csv", tmp_path / "v.csv"
    u.write_text("radius,count\n" + "".join(f"{r},{2 * r + 1}\n" for r in range(11)))
    v.write_text("radius,count\n" + "".join(f"{r},{r + 1}\n" for r in range(101)))
    assert run("compare", "domination", "--u", u, "--v", v, "--out", out,
               "--constants", 2, 1, 0, 0) == 0
    assert json.loads((out / "domination.json").read_text())["dominated"] is True
    assert run("compare", "domination", "--u", u, "--v", v, "--out", out,
               "--constants", 1, 1, 0, 0) == 3
    w = tmp_path / "w.csv"
    w.write_text("radius,count\n" + "".join(f"{r},{2 * 3 ** r - 1}\n" for r in range(11)))
    assert run("compare", "domination", "--u", w, "--v", v, "--out", out) == 3
    assert run("compare", "domination", "--out", out) == 2


def test_atomic_writes_leave_no_temp_files(tmp_path):
    out = tmp_path / "o"
    cli.write_outputs(out, {"a.txt": "1\n", "b.txt": "2\n"})
    assert sorted(p.name for p in out.iterdir()) == ["a.txt", "b.txt"]
    cli.write_outputs(out, {"a.txt": "3\n"})
    assert (out / "a.txt").read_text() == "3\n"
    assert sorted(p.name for p in out.iterdir()) == ["a.txt", "b.txt"]
