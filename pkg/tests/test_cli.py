from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from lipgeo.cli import run
from lipgeo.complexes import HolderComplex, complex_to_json
from lipgeo.exponents import Arc, U, W, arc_to_json, expr_to_json, mono
from lipgeo.metriclab import cusp_model, horn_model, horn_sector_model, model_to_json
from lipgeo.pizza import make_pizza, pizza_from_json


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("inputs")
    data = {
        "cycle235": complex_to_json(HolderComplex.cycle([2, 3, 5])),
        "cycle2789": complex_to_json(HolderComplex.cycle([2, 7, 9, 11])),
        "cycle34": complex_to_json(HolderComplex.cycle([3, 4])),
        "path": complex_to_json(HolderComplex.build([("a", "b", 2), ("b", "c", 3)])),
        "absdiff": expr_to_json(abs(W - U * U)),
        "deep": expr_to_json(abs(W - U * U - mono(1, 10))),
        "halfpower": expr_to_json(mono(1, 0, "1/2")),
        "cusp": model_to_json(cusp_model()),
        "horn2": model_to_json(horn_model(2)),
        "sector": model_to_json(horn_sector_model(2)),
        "branches": [{"patch": 0, "s": 1.0}, {"patch": 1, "s": 1.0}],
        "symbolic": [arc_to_json(Arc.graph(w)) for w in ({2: 1}, {2: 2}, {3: 1})],
        "split": {"groups": [[0], [1]], "betas": ["2", "2"]},
        "cuspsplit": {"groups": [[0], [1]], "betas": ["1", "1"]},
        "pizza": make_pizza([(2, "inf", 2, (1, 0)), ("inf", 1, 1, (1, 0))], 1).to_json(),
        "badpizza": make_pizza([(1, 3, 2, (1, 1))], 1).to_json(),
    }
    paths = {}
    for name, value in data.items():
        p = d / f"{name}.json"
        p.write_text(json.dumps(value))
        paths[name] = str(p)
    (d / "broken.json").write_text("{not json")
    paths["broken"] = str(d / "broken.json")
    paths["dir"] = str(d)
    return paths


def body(text: str) -> dict:
    return json.loads(text)["result"]


# ---------------------------------------------------------------------------
# documented examples


def test_compare_inner_cycles(files):
    code, text, _ = run(["compare-inner", files["cycle235"], files["cycle2789"]])
    assert code == 0 and body(text)["equivalent"]
    code, _, _ = run(["compare-inner", files["cycle235"], files["cycle34"]])
    assert code == 1


def test_pizza_extract_absdiff(files):
    code, text, _ = run(["pizza-extract", files["absdiff"], "--beta", "1/1"])
    assert code == 0
    pizza = pizza_from_json(body(text)["pizza"])
    assert pizza == make_pizza([(2, "inf", 2, (1, 0)), ("inf", 1, 1, (1, 0))], 1)


def test_verify_cusp_branches(files):
    code, text, _ = run(["verify", files["cusp"], "--arcs", files["branches"]])
    assert code == 1
    witness = body(text)["witness"]
    assert abs(witness["tord"] - 1.5) <= 0.05 and abs(witness["itord"] - 1.0) <= 0.05


# ---------------------------------------------------------------------------
# remaining commands


def test_canonicalize_formats(files):
    code, text, _ = run(["canonicalize", files["cycle235"]])
    assert code == 0 and body(text)["canonical"]
    assert len(body(text)["complex"]["edges"]) == 2
    _, dot, _ = run(["canonicalize", files["cycle235"], "--format", "dot"])
    assert dot.startswith("graph")
    _, svg, _ = run(["canonicalize", files["cycle235"], "--format", "svg"])
    assert svg.startswith("<svg")


def test_horn(files):
    code, text, _ = run(["horn", files["cycle235"]])
    assert code == 0 and body(text)["exponent"] == "2"
    code, text, _ = run(["horn", files["path"]])
    assert code == 1 and not body(text)["horn"]


def test_horn_numeric(files):
    code, text, _ = run(["horn", files["cycle235"], "--numeric"])
    assert code == 0 and body(text)["numeric"]["agrees"]


def test_realize_feeds_verify(files, tmp_path):
    out = tmp_path / "model.json"
    code, _, path = run(["-o", str(out), "realize", files["cycle235"]])
    assert code == 0 and path == str(out)
    out.write_text(run(["realize", files["cycle235"]])[1])
    code, text, _ = run(["verify", str(out), "--arcs-per-patch", "2", "--levels", "4"])
    assert code in (0, 1) and "lne" in body(text)


def test_pizza_compare(files, tmp_path):
    assert run(["pizza-compare", files["pizza"], files["pizza"]])[0] == 0
    reversed_pizza = tmp_path / "rev.json"
    p = pizza_from_json(json.loads(open(files["pizza"]).read()))
    reversed_pizza.write_text(json.dumps(p.reversed().to_json()))
    assert run(["pizza-compare", files["pizza"], str(reversed_pizza)])[0] == 1
    assert run(["pizza-compare", files["pizza"], str(reversed_pizza), "--unoriented"])[0] == 0
    assert run(["pizza-compare", files["pizza"], files["badpizza"]])[0] == 2


def test_pizza_extract_reads_its_own_report(files, tmp_path):
    report = tmp_path / "report.json"
    report.write_text(run(["pizza-extract", files["absdiff"]])[1])
    assert run(["pizza-compare", str(report), files["pizza"]])[0] == 0


def test_verify_weak_and_decompositions(files):
    code, _, _ = run(["verify", files["cusp"], "--arcs", files["branches"], "--weak", "--beta", "1"])
    assert code == 0
    assert run(["verify", files["cusp"], "--weak"])[0] == 2
    code, text, _ = run(["verify", files["sector"], "--decomposition", files["split"]])
    assert code == 0 and body(text)["pancake"]["label"] == "valid but NOT minimal"
    code, text, _ = run(["verify", files["cusp"], "--decomposition", files["cuspsplit"]])
    assert code == 0 and body(text)["pancake"]["label"] == "valid and minimal"


def test_verify_horn_is_lne(files):
    code, text, _ = run(["verify", files["horn2"]])
    assert code == 0 and body(text)["lne"]["ok"]


def test_project(files):
    code, text, _ = run(["project", files["horn2"], "--planes", "10", "--beta", "2"])
    assert code == 0 and body(text)["projection"]["fraction_within"] >= 0.95


def test_tangent(files):
    code, text, _ = run(["tangent", files["horn2"], "--beta", "2"])
    assert code == 0 and body(text)["matches_expected"]
    assert run(["tangent", files["horn2"], "--beta", "3"])[0] == 1


def test_tord_table(files):
    code, text, _ = run(["tord", files["symbolic"]])
    assert code == 0
    assert [r["tord"] for r in body(text)["pairs"]] == ["2", "2", "2"]
    _, plain, _ = run(["tord", files["symbolic"], "--format", "text"])
    assert plain.splitlines()[0] == "0 1 2"
    assert run(["tord", files["branches"]])[0] == 2


# ---------------------------------------------------------------------------
# exit-code contract and serialization


def test_input_errors(files):
    assert run(["canonicalize", files["broken"]])[0] == 2
    assert run(["canonicalize", files["dir"] + "/missing.json"])[0] == 2
    assert run(["canonicalize", files["absdiff"]])[0] == 2
    code, text, _ = run(["pizza-extract", files["halfpower"]])
    assert code == 2 and "error" in json.loads(text)


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        run(["no-such-command"])
    assert info.value.code == 2


def test_resolution_bound_gives_exit_three(files, monkeypatch):
    monkeypatch.setenv("LIPGEO_MAX_EXP", "5")
    code, text, _ = run(["pizza-extract", files["deep"]])
    report = json.loads(text)
    assert code == 3
    assert report["inconclusive"] and "result" not in report
    assert report["config"]["max_exp"] == "5"
    monkeypatch.delenv("LIPGEO_MAX_EXP")
    assert run(["pizza-extract", files["deep"]])[0] == 0


def test_resolved_result_is_not_reused_under_smaller_bound(files, monkeypatch):
    assert run(["pizza-extract", files["deep"]])[0] == 0
    monkeypatch.setenv("LIPGEO_MAX_EXP", "5")
    assert run(["pizza-extract", files["deep"]])[0] == 3


@pytest.mark.parametrize("argv", [
    ["canonicalize", "cycle235"],
    ["compare-inner", "cycle235", "cycle2789"],
    ["pizza-extract", "absdiff"],
    ["verify", "cusp", "--arcs", "branches"],
    ["tord", "symbolic"],
])
def test_reports_are_byte_identical_and_round_trip(files, argv):
    argv = [files.get(a, a) for a in argv]
    first, second = run(argv)[1], run(argv)[1]
    assert first == second
    data = json.loads(first)
    assert json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n" == first
    assert data["config"]["version"] and "max_exp" in data["config"]


def test_console_script(files, tmp_path):
    out = tmp_path / "out.json"
    proc = subprocess.run([sys.executable, "-m", "lipgeo.cli", "-o", str(out), "horn", files["cycle235"]],
                          capture_output=True, text=True, env={**os.environ, "LIPGEO_MAX_EXP": "64"})
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["result"]["exponent"] == "2"
    proc = subprocess.run([sys.executable, "-m", "lipgeo.cli", "horn", files["broken"]],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stderr.startswith("lipgeo: ")
