import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from distrack.cli import EXIT_INPUT, EXIT_OK, EXIT_REMOTE, main
from distrack.fixtures import write_case_fixture

PAPER_CLAIM = (
    "Massive protest in France against the mandatory implementation "
    "of the COVID passport in public spaces"
)
PAPER_QUERY = (
    "((protest AND france AND passport AND covid)"
    " OR (protest AND france AND passport AND public)"
    " OR (protest AND france AND covid AND public)"
    " OR (protest AND passport AND covid AND public)"
    " OR (france AND passport AND covid AND public))"
)


@pytest.fixture(scope="module")
def case_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("case")
    write_case_fixture("discredit", 7, path)
    return path


def test_query_reproduces_reference_string(capsys):
    rc = main(["query", "--claim", PAPER_CLAIM,
               "--keywords", "protest,france,passport,covid,public", "--drop", "1"])
    assert rc == EXIT_OK
    assert capsys.readouterr().out.strip() == PAPER_QUERY


def test_keywords_subcommand(capsys):
    rc = main(["keywords", "--claim", "COVID passport protest"])
    assert rc == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == ["covid", "passport", "protest"]


def test_query_without_claim_is_input_error(capsys):
    assert main(["query"]) == EXIT_INPUT


def test_unknown_flag_is_input_error():
    assert main(["query", "--bogus"]) == EXIT_INPUT


def test_help_exits_zero():
    for args in (["--help"], ["query", "--help"], ["pipeline", "--help"]):
        with pytest.raises(SystemExit) as info:
            main(args)
        assert info.value.code == 0


def test_align_missing_archive_is_input_error(tmp_path):
    rc = main(["align", "--claim", "x y z", "--posts", str(tmp_path / "missing.jsonl"),
               "--out", str(tmp_path / "a.jsonl")])
    assert rc == EXIT_INPUT


def test_fetch_requires_source_or_token(tmp_path, monkeypatch):
    monkeypatch.delenv("DISTRACK_API_TOKEN", raising=False)
    rc = main(["fetch", "--claim", "some claim text", "--out", str(tmp_path / "o.jsonl")])
    assert rc == EXIT_INPUT


def test_fetch_with_token_but_no_live_client_is_remote_error(tmp_path, monkeypatch):
    monkeypatch.setenv("DISTRACK_API_TOKEN", "t0ken")
    rc = main(["fetch", "--claim", "some claim text", "--out", str(tmp_path / "o.jsonl")])
    assert rc == EXIT_REMOTE


def test_fetch_from_archive(tmp_path, case_dir):
    out = tmp_path / "window.jsonl"
    rc = main(["fetch", "--config", str(case_dir / "config.json"),
               "--from-archive", str(case_dir / "posts.jsonl"),
               "--max-results", "10", "--out", str(out)])
    assert rc == EXIT_OK
    lines = out.read_bytes().splitlines()
    assert len(lines) == 10
    for line in lines:
        json.loads(line)


def test_remote_classifier_unreachable_is_exit_two(tmp_path, case_dir):
    rc = main(["align", "--config", str(case_dir / "config.json"),
               "--classifier", "remote:http://127.0.0.1:9",
               "--out", str(tmp_path / "a.jsonl")])
    assert rc == EXIT_REMOTE


def test_pipeline_then_render_and_report(tmp_path, case_dir):
    out_dir = tmp_path / "out"
    rc = main(["--log-level", "WARNING", "pipeline",
               "--config", str(case_dir / "config.json"), "--out-dir", str(out_dir)])
    assert rc == EXIT_OK
    for name in ("query.txt", "alignments.jsonl", "cascade.json", "cascade.svg",
                 "cascade.dot", "report.json", "report.md", "run_config.json"):
        assert (out_dir / name).exists(), name
    report = json.loads((out_dir / "report.json").read_text())
    expected = json.loads((case_dir / "expected_report.json").read_text())
    assert report == expected

    svg_out = tmp_path / "again.svg"
    rc = main(["render", "--cascade", str(out_dir / "cascade.json"),
               "--format", "svg", "--out", str(svg_out)])
    assert rc == EXIT_OK
    assert svg_out.read_bytes() == (out_dir / "cascade.svg").read_bytes()

    dot_out = tmp_path / "again.dot"
    rc = main(["render", "--cascade", str(out_dir / "cascade.json"),
               "--format", "dot", "--out", str(dot_out)])
    assert rc == EXIT_OK
    assert dot_out.read_bytes() == (out_dir / "cascade.dot").read_bytes()

    report_dir = tmp_path / "reports"
    rc = main(["report", "--cascade", str(out_dir / "cascade.json"),
               "--out-dir", str(report_dir)])
    assert rc == EXIT_OK
    assert json.loads((report_dir / "report.json").read_text()) == expected


def test_align_subcommand_writes_labels(tmp_path, case_dir):
    out = tmp_path / "alignments.jsonl"
    rc = main(["--log-level", "WARNING", "align", "--config", str(case_dir / "config.json"),
               "--out", str(out)])
    assert rc == EXIT_OK
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 84
    assert {l["label"] for l in lines} <= {"entailment", "contradiction", "neutral"}
    run_config = json.loads((out.parent / "run_config.json").read_text())
    assert run_config["align"]["similarity_threshold"] == 0.6


def test_build_accepts_precomputed_alignments(tmp_path, case_dir):
    out_dir = tmp_path / "out"
    main(["--log-level", "WARNING", "pipeline", "--config", str(case_dir / "config.json"),
          "--out-dir", str(out_dir)])
    rebuilt = tmp_path / "cascade2.json"
    rc = main(["--log-level", "WARNING", "build", "--config", str(case_dir / "config.json"),
               "--alignments", str(out_dir / "alignments.jsonl"), "--out", str(rebuilt)])
    assert rc == EXIT_OK
    assert rebuilt.read_bytes() == (out_dir / "cascade.json").read_bytes()


def test_render_empty_cascade(tmp_path):
    posts = tmp_path / "posts.jsonl"
    posts.write_text("")
    cascade_path = tmp_path / "cascade.json"
    rc = main(["--log-level", "WARNING", "build", "--claim", "an empty conversation",
               "--posts", str(posts), "--out", str(cascade_path)])
    assert rc == EXIT_OK
    svg_path = tmp_path / "empty.svg"
    rc = main(["render", "--cascade", str(cascade_path), "--format", "svg",
               "--out", str(svg_path)])
    assert rc == EXIT_OK
    root = ET.fromstring(svg_path.read_bytes())
    assert root.tag.endswith("svg")


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "distrack", "query", "--claim", "COVID passport protest",
         "--drop", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "AND" in proc.stdout
