"""Golden corpus and command-line behavior.

Each ``tests/golden/*.sx`` starts with ``; tropivol <verb> [flags]``; the
matching ``.out`` holds stdout, stderr and ``[exit N]``.  Regenerate with
``TROPIVOL_UPDATE_GOLDEN=1 pytest tests/test_cli.py``.
"""
from __future__ import annotations

import contextlib
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from tropivol.cli import main as cli
from tropivol.cli.sexp import parse

GOLDEN = Path(__file__).parent / "golden"
CASES = sorted(GOLDEN.glob("*.sx"))


def directive(path: Path) -> list[str]:
    first = path.read_text().splitlines()[0]
    assert first.startswith("; tropivol "), f"{path.name} lacks a directive line"
    return first[len("; tropivol "):].split()


def run_cli(argv: list[str], cwd: Path) -> tuple[str, str, int]:
    out, err = io.StringIO(), io.StringIO()
    old = Path.cwd()
    os.chdir(cwd)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(argv)
    finally:
        os.chdir(old)
    return out.getvalue(), err.getvalue(), code


def golden_text(path: Path) -> str:
    verb, *flags = directive(path)
    out, err, code = run_cli([verb, path.name, *flags], path.parent)
    return out + err + f"[exit {code}]\n"


@pytest.mark.parametrize("case", CASES, ids=[c.stem for c in CASES])
def test_golden(case: Path):
    expected = case.with_suffix(".out")
    actual = golden_text(case)
    if os.environ.get("TROPIVOL_UPDATE_GOLDEN"):
        expected.write_text(actual)
    assert expected.exists(), f"missing {expected.name}"
    assert actual == expected.read_text()


def test_corpus_is_complete():
    assert len(CASES) >= 40
    assert {c.stem for c in CASES} == {p.stem for p in GOLDEN.glob("*.out")}


def test_deterministic_across_runs():
    case = GOLDEN / "oracle_plane.sx"
    assert golden_text(case) == golden_text(case)


def test_json_output_is_valid(tmp_path: Path):
    for name in ("vol_ball", "conductor_swap", "trace_swap", "snf_basic", "fubini_basic", "cov_uniformizer",
                 "compare_sphere_g2", "additivity_swap", "motivic_gm", "integrate_ball"):
        case = GOLDEN / f"{name}.sx"
        verb, *_ = directive(case)
        out, _, code = run_cli([verb, case.name, "--json"], GOLDEN)
        assert code == 0
        data = json.loads(out)
        assert data["verb"] == verb


def test_json_values():
    out, _, _ = run_cli(["vol", "vol_ball.sx", "--json"], GOLDEN)
    assert json.loads(out) == {"verb": "vol", "vol": {"fin": -3}}
    out, _, _ = run_cli(["conductor", "conductor_swap.sx", "--json"], GOLDEN)
    assert json.loads(out) == {"verb": "conductor", "c": "1/2", "artin": "1"}
    out, _, _ = run_cli(["vol", "vol_field.sx", "--json"], GOLDEN)
    assert json.loads(out)["vol"] == {"posinf": True}


def test_check_failure_exit_code():
    _, _, code = run_cli(["compare", "compare_mismatch.sx"], GOLDEN)
    assert code == 2


def test_unwrapped_document(tmp_path: Path):
    (tmp_path / "a.sx").write_text("(vfcell (ordset (pset (r 1) (cell (ge (1) 3)))))\n")
    out, _, code = run_cli(["vol", "a.sx"], tmp_path)
    assert (out, code) == ("vol = -3\n", 0)


def test_wrong_verb_reports_location(tmp_path: Path):
    out, err, code = run_cli(["trace", "conductor_swap.sx"], GOLDEN)
    assert code == 1 and out == ""
    assert err.startswith("error: conductor_swap.sx:3:1: ")


def test_missing_file(tmp_path: Path):
    _, err, code = run_cli(["vol", "nope.sx"], tmp_path)
    assert code == 1 and err.startswith("error: nope.sx")


def test_bad_oracle_flag():
    _, err, code = run_cli(["vol", "vol_ball.sx", "--oracle-lmax", "0"], GOLDEN)
    assert code == 1 and "oracle-lmax" in err


@pytest.mark.parametrize("kind", cli.GEN_KINDS)
def test_gen_documents_run(kind: str, tmp_path: Path, monkeypatch):
    monkeypatch.setenv("TROPIVOL_SEED", "11")
    _, _, code = run_cli(["gen", kind, "--count", "3", "--out", str(tmp_path)], tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("*.sx"))
    assert len(files) == 3
    for f in files:
        out, err, code = run_cli([kind, f.name], tmp_path)
        assert code == 0, err
        if kind in cli.CHECK_VERBS:
            assert "equal = true" in out


def test_gen_is_seeded(monkeypatch):
    monkeypatch.setenv("TROPIVOL_SEED", "5")
    a = run_cli(["gen", "fubini"], GOLDEN)[0]
    b = run_cli(["gen", "fubini"], GOLDEN)[0]
    monkeypatch.setenv("TROPIVOL_SEED", "6")
    c = run_cli(["gen", "fubini"], GOLDEN)[0]
    assert a == b != c
    parse(a)


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "tropivol.cli.main", "conductor", "conductor_swap.sx"],
                       cwd=GOLDEN, capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == "c = 1/2\nartin = 1\n"


def test_usage_errors_exit_1(tmp_path: Path):
    _, err, code = run_cli(["--bogus"], tmp_path)
    assert code == 1 and "usage:" in err
    _, _, code = run_cli(["gen", "nope"], tmp_path)
    assert code == 1
    _, _, code = run_cli(["frobnicate", "x.sx"], tmp_path)
    assert code == 1
