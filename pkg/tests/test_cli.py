import io
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema
import pytest

from darmonlab.cli import run

SCHEMAS = pathlib.Path(__file__).resolve().parents[1] / "docs" / "schemas"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


JSON_CASES = {
    "hilbert": ["hilbert", "-1", "-1", "--all"],
    "delta": ["delta", "3", "-1", "--field", "Q(sqrt,-5)"],
    "member": ["member", "--set", "T", "-1", "-1", "3"],
    "prescribe": ["prescribe", "--places", "2", "3"],
    "darmon": ["darmon", "--n", "3", "5/8"],
    "formula": ["formula", "--which", "empty", "--n", "2", "--export", "json"],
    "ledger": ["ledger"],
    "verify": ["verify", "--suite", "budget"],
}


@pytest.mark.parametrize("name", sorted(JSON_CASES))
def test_json_output_matches_schema(name):
    code, out, _ = call(*JSON_CASES[name], "--json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema(name))


def test_schema_files_are_valid():
    for path in SCHEMAS.glob("*.schema.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads(path.read_text()))


def test_hilbert_table():
    code, out, _ = call("hilbert", "-1", "-1", "--all", "--field", "Q")
    assert code == 0
    assert out.splitlines() == ["2: -1", "inf: -1"]
    code, out, _ = call("hilbert", "2", "3", "--place", "3")
    assert out.strip() == "3: -1"


def test_darmon_member_json():
    code, out, _ = call("darmon", "--n", "3", "5/8", "--field", "Q", "--json")
    assert code == 0 and json.loads(out)["member"] is True
    code, out, _ = call("darmon", "--n", "3", "8/5")
    assert out.strip() == "false"
    code, out, _ = call("darmon", "--n", "2", "1/5", "--places", "5")
    assert out.strip() == "true"
    code, out, _ = call("darmon", "--n", "inf", "1/5", "--params", "2,5,2,5")
    assert out.strip() == "true"


def test_ledger_has_no_mismatches():
    code, out, _ = call("ledger", "--json")
    data = json.loads(out)
    assert code == 0 and data["mismatches"] == []
    assert data["counts"]["flagged"] == 12


def test_prescribe_roundtrip_output():
    code, out, _ = call("prescribe", "--places", "2", "3", "--json")
    data = json.loads(out)
    assert [p["label"] for p in data["delta_upper"]] == ["2", "3"]


def test_member_sets():
    assert call("member", "--set", "sum4sq", "7")[1].strip() == "true"
    assert call("member", "--set", "J", "2", "3", "6")[1].strip() == "true"
    assert call("member", "--set", "J4", "2", "3", "-1", "3", "3")[1].strip() == "true"
    assert call("member", "--set", "J42", "2", "3", "-1", "3", "3")[1].strip() == "false"


def test_formula_export_sexp():
    code, out, _ = call("formula", "--which", "empty", "--n", "1", "--export", "sexp")
    assert code == 0
    first, second = out.split("\n", 1)
    assert "A15 E33" in first and "degree <= 73" in first and "real: 33" in first
    assert second.startswith("(forall (")


@pytest.mark.parametrize(
    "argv, code",
    [
        (["frobnicate"], 1),
        (["hilbert", "1"], 1),
        (["hilbert", "1", "2", "--bogus"], 1),
        (["hilbert", "0", "2"], 1),
        (["hilbert", "1", "2", "--field", "poly:[3,0,1]"], 1),
        (["member", "--set", "Ksf", "-1", "-1", "0"], 1),
        (["member", "--set", "T", "1", "2"], 1),
        (["prescribe", "--places", "3"], 1),
        (["darmon", "--n", "0", "3"], 1),
        (["formula", "--which", "main", "--n", "0"], 1),
        (["hilbert", "1", "2", "--place", "5", "--field", "Q(sqrt,-1)"], 1),
    ],
)
def test_exit_codes(argv, code):
    got, out, err = call(*argv)
    assert got == code
    assert err


def test_usage_text_on_unknown_command():
    _, _, err = call("frobnicate")
    assert "usage:" in err


def test_error_json_schema():
    code, _, err = call("member", "--set", "Ksf", "-1", "-1", "0", "--json")
    assert code == 1
    jsonschema.validate(json.loads(err), schema("error"))


def test_search_exhaustion_exit_code(monkeypatch):
    from darmonlab import cli
    from darmonlab.numberfield import SearchExhausted

    def boom(*args, **kwargs):
        raise SearchExhausted("bound exceeded", bound=3)

    monkeypatch.setattr(cli, "realize_finite", boom)
    code, _, err = call("prescribe", "--places", "2", "3", "--json")
    assert code == 2
    data = json.loads(err)
    jsonschema.validate(data, schema("error"))
    assert data["error"] == "search_exhausted" and data["bound"] == 3


def test_determinism_and_seed_override(monkeypatch):
    argv = ["verify", "--suite", "reciprocity", "--count", "15", "--json"]
    first = call(*argv)[1]
    assert first == call(*argv)[1]
    seeded = call(*argv, "--seed", "5")[1]
    monkeypatch.setenv("DARMONLAB_SEED", "5")
    assert call(*argv)[1] == seeded
    assert json.loads(seeded)["seed"] == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "darmonlab", "darmon", "--n", "3", "5/8"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "true"


@pytest.mark.skipif(shutil.which("darmonlab") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["darmonlab", "hilbert", "-1", "-1", "--all"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "inf: -1" in proc.stdout
