import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from spdc_hiding import cli
from spdc_hiding.fock import FockState
from spdc_hiding.states import theta

DOCS = Path(__file__).resolve().parent.parent / "docs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads((DOCS / name).read_text())


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "1/2" in out
    assert "FAIL" not in out


def test_expand_decomposition(capsys):
    code, out, _ = run(capsys, "expand", "--eq", "4")
    assert code == 0
    assert "c = 1/2" in out and "PASS" in out


@pytest.mark.parametrize("eq, marker", [("1", "norm² = 3/4"), ("2", "norm² = 5/2"), ("3", "<Θ|Θ> = 5/2")])
def test_expand_other_sectors(capsys, eq, marker):
    code, out, _ = run(capsys, "expand", "--eq", eq)
    assert code == 0 and marker in out


def test_dump_state_round_trip(capsys):
    code, out, _ = run(capsys, "expand", "--eq", "3", "--dump-state")
    assert code == 0
    lines = out.splitlines()
    start = next(i for i, line in enumerate(lines) if line and line[0].isdigit())
    state = FockState.from_text("\n".join(lines[start:]) + "\n")
    assert state.allclose(theta(), atol=1e-15)


def test_gba_table(capsys):
    code, out, _ = run(capsys, "gba-table")
    assert code == 0
    assert len([line for line in out.splitlines() if line[:1] in "ΦΨΓΥΩ"]) == 10
    code, out, _ = run(capsys, "gba-table", "--format", "json")
    rows = json.loads(out)["rows"]
    assert len(rows) == 10


def test_simulate_json_schema_and_determinism(capsys):
    args = ("simulate", "--n", "3", "--secret", "1", "--trials", "20", "--seed", "5", "--per-trial")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    report = json.loads(first)
    jsonschema.validate(report, schema("simulate.schema.json"))
    assert report["stats"]["success_rate"] == 1.0
    assert len(report["per_trial"]) == 20


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "2", "--secret", "0", "--trials", "5", "--format", "csv", "--per-trial")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == cli.SIMULATE_COLUMNS
    assert rows[1][0] == "summary" and len(rows) == 7


def test_simulate_output_file(capsys, tmp_path):
    target = tmp_path / "run.json"
    code, out, _ = run(capsys, "simulate", "--n", "1", "--secret", "0", "--trials", "3", "--output", str(target))
    assert code == 0
    jsonschema.validate(json.loads(target.read_text()), schema("simulate.schema.json"))
    assert str(target) in out


def test_analyze_json_schema(capsys):
    code, out, _ = run(capsys, "analyze", "--n", "1")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("analyze.schema.json"))
    assert report["trace_distance"] == pytest.approx(1.0, abs=1e-10)


def test_analyze_csv(capsys):
    _, out, _ = run(capsys, "analyze", "--n", "1", "--report", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "m", "value"]
    assert sum(r[0] == "bound" for r in rows) == 20


def test_figures(capsys, tmp_path):
    run(capsys, "simulate", "--n", "2", "--secret", "1", "--trials", "5", "--figures", str(tmp_path))
    run(capsys, "analyze", "--n", "1", "--figures", str(tmp_path))
    for name in ("class_histogram.png", "bound_curve.png"):
        data = (tmp_path / name).read_bytes()
        assert data.startswith(b"\x89PNG")


def test_analyze_rejects_large_n(capsys):
    code, _, err = run(capsys, "analyze", "--n", "4")
    assert code == 2
    assert "n ≤ 3 for exact analysis" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("simulate", "--n", "0", "--secret", "1"),
        ("simulate", "--n", "2", "--secret", "1", "--p", "0.5"),
        ("simulate", "--n", "2", "--secret", "1", "--trials", "0"),
    ],
)
def test_invalid_config_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--bogus"])
    assert exc.value.code == 2
