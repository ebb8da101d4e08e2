import io
import json
import shutil
import subprocess
import sys

import pytest

from conftest import CORPUS, FIXTURES
from sstt.cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_TYPE_ERROR, main, run_check

CLEAN = FIXTURES / "clean.rzk"
BROKEN = FIXTURES / "broken.rzk"
TYPE_ERROR = FIXTURES / "type-error.rzk"
WRONG_VERSION = FIXTURES / "wrong-version.rzk"
ISSUE = FIXTURES / "issue-standalone.rzk.md"
SEQUENTS = FIXTURES / "sequents.txt"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "path, expected",
    [
        (CLEAN, EXIT_OK),
        (TYPE_ERROR, EXIT_TYPE_ERROR),
        (BROKEN, EXIT_INPUT_ERROR),
        (WRONG_VERSION, EXIT_INPUT_ERROR),
        (FIXTURES / "does-not-exist.rzk", EXIT_INPUT_ERROR),
    ],
    ids=["clean", "type-error", "parse-error", "wrong-version", "missing"],
)
def test_exit_codes(capsys, path, expected):
    code, _, _ = run(capsys, "check", "--isolate", path)
    assert code == expected


def test_exit_code_is_worst_over_files(capsys):
    assert run(capsys, "check", "--isolate", CLEAN, TYPE_ERROR)[0] == EXIT_TYPE_ERROR
    assert run(capsys, "check", "--isolate", TYPE_ERROR, BROKEN, CLEAN)[0] == EXIT_INPUT_ERROR


def test_missing_file_is_reported_as_parse_error(capsys):
    code, out, _ = run(capsys, "check", "--json", FIXTURES / "nope.rzk")
    [diag] = json.loads(out)
    assert (code, diag["code"]) == (EXIT_INPUT_ERROR, "E-PARSE")
    assert diag["message"].startswith("cannot read file")


def test_error_does_not_hide_later_declarations(capsys):
    code, out, err = run(capsys, "check", TYPE_ERROR)
    assert code == EXIT_TYPE_ERROR
    assert "1 declaration(s) checked, 1 error(s)" in out
    assert "E-MISMATCH" in err and "declaration wrong" in err


def test_issue_gives_exactly_one_mismatch(capsys):
    code, out, _ = run(capsys, "check", "--json", ISSUE)
    diags = json.loads(out)
    assert code == EXIT_TYPE_ERROR
    assert [d["code"] for d in diags] == ["E-MISMATCH"]
    assert any("[t ≡ 0₂ ↦ x]" in frame for frame in diags[0]["trace"])


def test_json_shape(capsys):
    _, out, _ = run(capsys, "check", "--json", TYPE_ERROR, BROKEN)
    diags = json.loads(out)
    assert len(diags) == 2
    for d in diags:
        assert set(d) == {"code", "file", "message", "span", "trace"}
        assert set(d["span"]) == {"startLine", "startCol", "endLine", "endCol"}
        assert all(isinstance(v, int) and v >= 1 for v in d["span"].values())
        assert isinstance(d["trace"], list) and all(isinstance(f, str) for f in d["trace"])


def test_clean_json_is_empty_list(capsys):
    code, out, _ = run(capsys, "check", "--json", CLEAN)
    assert (code, json.loads(out)) == (EXIT_OK, [])


def test_json_is_byte_identical_across_processes():
    exe = shutil.which("sstt-check")
    argv = [exe] if exe else [sys.executable, "-m", "sstt.cli"]
    argv += ["check", "--json", str(ISSUE), str(TYPE_ERROR), str(BROKEN)]
    first = subprocess.run(argv, capture_output=True, check=False)
    second = subprocess.run(argv, capture_output=True, check=False)
    assert first.returncode == second.returncode == EXIT_INPUT_ERROR
    assert first.stdout == second.stdout and first.stdout


def test_corpus_directory_is_clean(capsys):
    code, out, _ = run(capsys, "check", "--json", CORPUS)
    assert (code, json.loads(out)) == (EXIT_OK, [])


def test_shared_signature_versus_isolate(capsys):
    dependent = CORPUS / "simplicial-basics" / "triangles.rzk.md"
    hom = CORPUS / "simplicial-basics" / "hom.rzk.md"
    assert run(capsys, "check", hom, dependent)[0] == EXIT_OK
    code, _, err = run(capsys, "check", "--isolate", hom, dependent)
    assert code == EXIT_TYPE_ERROR and "E-UNBOUND" in err


def test_type_in_type_flag(capsys):
    weird = CORPUS / "regressions" / "universe-in-itself.rzk.md"
    assert run(capsys, "check", weird)[0] == EXIT_TYPE_ERROR
    assert run(capsys, "check", "--type-in-type", weird)[0] == EXIT_OK


def test_trace_truncation_and_full_trace(capsys):
    _, _, short = run(capsys, "check", ISSUE)
    _, _, full = run(capsys, "check", "--full-trace", ISSUE)
    short_frames = [l for l in short.splitlines() if l.startswith("  in ")]
    full_frames = [l for l in full.splitlines() if l.startswith("  in ")]
    assert len(short_frames) <= 3 <= len(full_frames)
    assert set(short_frames) <= set(full_frames)


def test_color(capsys, monkeypatch):
    monkeypatch.delenv("SSTT_COLOR", raising=False)
    assert "\x1b[" not in run(capsys, "check", TYPE_ERROR)[2]
    assert "\x1b[" in run(capsys, "check", "--color", "always", TYPE_ERROR)[2]
    monkeypatch.setenv("SSTT_COLOR", "always")
    assert "\x1b[" in run(capsys, "check", TYPE_ERROR)[2]
    assert "\x1b[" not in run(capsys, "check", "--color", "never", TYPE_ERROR)[2]


def test_fuel_must_be_positive(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "--fuel", "0", str(CLEAN)])
    assert exc.value.code == 2
    capsys.readouterr()


def test_solve_file(capsys):
    code, out, _ = run(capsys, "solve", SEQUENTS)
    assert code == EXIT_OK
    assert out.splitlines() == [
        "valid: x <= y, y <= z |- x <= z",
        "valid: |- x <= y \\/ y <= x",
        "invalid: s <= t |- t === 1_2 \\/ s === 0_2",
        "invalid: |- x === 0_2",
    ]


def test_solve_stdin_with_malformed_line(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("t ≡ 0₂ ∧ t ≡ 1₂ ⊢ ⊥\nx <= |- y\n|- ⊤\n"))
    code, out, _ = run(capsys, "solve", "-")
    lines = out.splitlines()
    assert code == EXIT_INPUT_ERROR
    assert lines[0] == "valid: t ≡ 0₂ ∧ t ≡ 1₂ ⊢ ⊥"
    assert lines[1].startswith("error: line 2:")
    assert lines[2] == "valid: |- ⊤"


def test_solve_missing_file(capsys):
    assert run(capsys, "solve", FIXTURES / "missing.txt")[0] == EXIT_INPUT_ERROR


def test_compute(capsys):
    hom = CORPUS / "simplicial-basics" / "hom.rzk.md"
    code, out, _ = run(capsys, "compute", hom, "arr")
    assert code == EXIT_OK
    assert out.strip().startswith("\\ ")


def test_compute_unknown_name_and_postulate(capsys):
    code, _, err = run(capsys, "compute", CLEAN, "nothing-here")
    assert code == EXIT_TYPE_ERROR and "E-UNBOUND" in err
    code, _, err = run(capsys, "compute", FIXTURES / "postulate.rzk", "axiom")
    assert code == EXIT_TYPE_ERROR and "postulated" in err


def test_compute_on_parse_error(capsys):
    assert run(capsys, "compute", BROKEN, "broken")[0] == EXIT_INPUT_ERROR


def test_run_check_counts_declarations():
    report = run_check([CLEAN, TYPE_ERROR], isolate=True)
    assert [f.declarations for f in report.files] == [1, 1]
    assert [d.code for d in report.diagnostics] == ["E-MISMATCH"]
