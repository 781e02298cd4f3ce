import csv
import json
import xml.etree.ElementTree as ET
from dataclasses import asdict

import numpy as np
import pytest

from nilgeom.cli import ExperimentConfig, Report, build_parser, main, plot_profile
from nilgeom.errors import EmptyProfile
from nilgeom.measures import DecayProfile, load_measure


def test_check_group_heisenberg_exits_zero(capsys):
    assert main(["check-group", "--group", "heisenberg"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] associativity" in out


def test_corrupted_group_file_exits_one_naming_file(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text('{"name": "x", "layers": [2,')
    assert main(["check-group", "--group", str(bad)]) == 1
    err = capsys.readouterr().err
    assert str(bad) in err


def test_missing_group_file_exits_one(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["check-group", "--group", str(missing)]) == 1
    assert str(missing) in capsys.readouterr().err


def test_quantitative_failure_exits_two(capsys):
    # a flat blow-up profile on the self-similar set cannot meet the decay
    # verdict, so the command must report and exit 2, not raise
    code = main(
        [
            "blowup",
            "--fixture",
            "four-corner-cantor",
            "--param",
            "r0=0.5",
            "--param",
            "n_scales=5",
            "--param",
            "grid=128",
        ]
    )
    assert code == 2
    assert "[FAIL]" in capsys.readouterr().out


def test_unknown_fixture_exits_one(capsys):
    assert main(["density", "--fixture", "no-such-fixture"]) == 1
    assert "no-such-fixture" in capsys.readouterr().err


def test_suite_list_prints_all_criteria(capsys):
    assert main(["suite", "--list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 12
    assert lines[0].split()[0] == "1"
    assert "suite determinism" in lines[-1]


def test_config_round_trip():
    cfg = ExperimentConfig(
        command="density",
        group="heisenberg",
        norm="koranyi",
        fixture="lifted-curve",
        fixture_params={"n": 500},
        params={"r0": 0.2, "seeded": True},
        seed=11,
        out="/tmp/x",
    )
    again = ExperimentConfig.from_dict(json.loads(json.dumps(asdict(cfg))))
    assert again == cfg


def test_report_json_deterministic_modulo_timing(tmp_path):
    out = tmp_path / "rep"
    args = ["check-group", "--seed", "3", "--out", str(out)]
    assert main(args) == 0
    first = json.loads((out / "check-group.json").read_text())
    assert main(args) == 0
    second = json.loads((out / "check-group.json").read_text())
    t1, t2 = first.pop("timing"), second.pop("timing")
    assert "written" in t1 and "elapsed_seconds" in t1
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_verdicts_recomputable_from_report(tmp_path):
    out = tmp_path / "rep"
    assert main(["area-check", "--fixture", "horizontal-segment", "--out", str(out)]) == 0
    rep = json.loads((out / "area-check.json").read_text())
    ops = {
        "<=": lambda v, t: v <= t,
        ">=": lambda v, t: v >= t,
        "in": lambda v, t: t[0] <= v <= t[1],
        "==": lambda v, t: v == t,
    }
    assert rep["verdicts"]
    for v in rep["verdicts"]:
        assert v["pass"] == ops[v["op"]](v["value"], v["threshold"])
    assert rep["passed"] == all(v["pass"] for v in rep["verdicts"])
    assert rep["version"]


def test_gen_fixture_writes_loadable_measure(tmp_path):
    out = tmp_path / "fx"
    code = main(
        [
            "gen-fixture",
            "--fixture",
            "four-corner-cantor",
            "--fixture-param",
            "gen=4",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    mu = load_measure(out / "four-corner-cantor.json")
    assert len(mu) == 256
    assert mu.meta["purely_unrectifiable"] is True


def test_density_csv_has_header_row(tmp_path):
    out = tmp_path / "d"
    code = main(
        [
            "density",
            "--fixture",
            "horizontal-segment",
            "--param",
            "points=8",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    with open(out / "density.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["point_index", "window_sup"]
    assert len(rows) == 9
    # decimal points, not locale commas
    assert "." in rows[1][1]


def test_equiv_suite_cantor_verdict(tmp_path):
    out = tmp_path / "eq"
    code = main(
        [
            "equiv-suite",
            "--fixture",
            "four-corner-cantor",
            "--param",
            "points=2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rep = json.loads((out / "equiv-suite.json").read_text())
    assert rep["results"]["verdict"] == "unrectifiable-consistent"
    assert rep["results"]["n_decayed"] == 0


def test_lipschitz_cover_tilted_graph(capsys):
    assert main(["lipschitz-cover", "--fixture", "tilted-graph"]) == 0
    assert "lipschitz_constant" in capsys.readouterr().out


def test_plot_profile_svg_parses(tmp_path):
    prof = DecayProfile(
        np.array([0.4, 0.2, 0.1]), excess=np.array([0.3, 0.1, 0.02])
    )
    path = tmp_path / "decay.svg"
    plot_profile(prof, path)
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


def test_plot_profile_single_scale(tmp_path):
    prof = DecayProfile(np.array([0.5]), density=np.array([0.97]))
    path = tmp_path / "one.svg"
    plot_profile(prof, path)
    assert ET.parse(path).getroot().tag.endswith("svg")


def test_plot_profile_empty_raises():
    prof = DecayProfile(np.array([0.5, 0.25]))
    with pytest.raises(EmptyProfile):
        plot_profile(prof, "/tmp/never-written.svg")


def test_parser_rejects_malformed_param(capsys):
    assert main(["density", "--param", "r0geq0.1"]) == 1
    assert "key=value" in capsys.readouterr().err


def test_every_command_registered():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    names = set(sub.choices)
    assert names == {
        "check-group",
        "compile-law",
        "grass-net",
        "cg-estimate",
        "tangent-fit",
        "blowup",
        "density",
        "tube-check",
        "area-check",
        "lipschitz-cover",
        "gen-fixture",
        "equiv-suite",
        "suite",
    }


def test_report_add_verdict_ops():
    rep = Report(ExperimentConfig(command="x"))
    assert rep.add_verdict("a", 1.0, "<=", 2.0)
    assert not rep.add_verdict("b", 3.0, "<=", 2.0)
    assert rep.add_verdict("c", 0.5, "in", [0.0, 1.0])
    assert not rep.passed
    assert [v["pass"] for v in rep.verdicts] == [True, False, True]
