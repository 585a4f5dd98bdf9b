import json
import re

import numpy as np
import pytest

from symrig.cli import main
from symrig.documents import parse_document


@pytest.fixture()
def docs(tmp_path):
    """Write a few example documents and return their paths."""
    paths = {}
    for name in ("triangle-cs", "bricard-c2", "octahedron-cs-isostatic", "k33-hexagon"):
        path = tmp_path / f"{name}.fw"
        assert main(["example", name, "--out", str(path)]) == 0
        paths[name] = str(path)
    return paths


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        assert main(["flex-detect"]) == 1

    def test_unknown_example_is_2(self, capsys):
        assert main(["example", "nope"]) == 2

    def test_missing_file_is_1(self, capsys):
        assert main(["validate", "/nonexistent/file.fw"]) == 1

    def test_json_syntax_error_is_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.fw"
        bad.write_text("{broken")
        assert main(["validate", str(bad)]) == 1

    def test_semantic_error_is_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.fw"
        bad.write_text('{"format_version": 1, "dimension": 2}')
        assert main(["validate", str(bad)]) == 2

    def test_validation_failure_is_2(self, tmp_path, capsys):
        path = tmp_path / "tri.fw"
        assert main(["example", "triangle-cs", "--out", str(path)]) == 0
        doc = json.loads(path.read_text())
        doc["coordinates"][2] = [0.25, 2.0]  # apex off the mirror
        path.write_text(json.dumps(doc))
        assert main(["validate", str(path)]) == 2

    def test_inconclusive_flex_detect_is_3(self, docs, capsys):
        assert main(["flex-detect", docs["k33-hexagon"]]) == 3

    def test_trace_gate_is_3(self, docs, capsys):
        code, out, err = run(capsys, ["trace", docs["octahedron-cs-isostatic"],
                                      "--steps", "3", "--step-size", "0.02"])
        assert code == 3
        assert "allow-unverified" in err


class TestValidateAnalyze:
    def test_validate_ok(self, docs, capsys):
        code, out, _ = run(capsys, ["validate", docs["triangle-cs"]])
        assert code == 0
        assert "valid: true" in out

    def test_analyze_triangle_json_block_shapes(self, docs, capsys):
        code, out, _ = run(capsys, ["analyze", docs["triangle-cs"], "--json"])
        assert code == 0
        report = json.loads(out)
        assert report["block_shapes"] == [[2, 3], [1, 3]]
        assert report["rigidity"]["infinitesimally_rigid"] is True

    def test_analyze_text_numbers_all_in_json(self, docs, capsys):
        code, text, _ = run(capsys, ["analyze", docs["bricard-c2"]])
        assert code == 0
        code, js, _ = run(capsys, ["analyze", docs["bricard-c2"], "--json"])
        assert code == 0
        for token in re.findall(r"-?\d+\.?\d*(?:e-?\d+)?", text):
            token = token.rstrip(".")
            if token and token not in docs["bricard-c2"]:
                assert token in js, f"number {token} missing from the JSON report"


class TestFlexDetect:
    def test_bricard_verdict_and_rule(self, docs, capsys):
        code, out, _ = run(capsys, ["flex-detect", docs["bricard-c2"], "--json"])
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "finite-symmetry-preserving-flex"
        assert report["rule"] == "Cor4.1"

    def test_irrep_by_name(self, docs, capsys):
        code, out, _ = run(capsys, ["flex-detect", docs["bricard-c2"], "--irrep", "B", "--json"])
        report = json.loads(out)
        assert report["irrep_name"] == "B"
        assert report["verdict"] != "finite-symmetry-preserving-flex"

    def test_unknown_irrep_is_usage_error(self, docs, capsys):
        assert main(["flex-detect", docs["bricard-c2"], "--irrep", "Z9"]) == 1

    def test_json_reports_are_byte_identical(self, docs, capsys):
        _, out1, _ = run(capsys, ["flex-detect", docs["bricard-c2"], "--json"])
        _, out2, _ = run(capsys, ["flex-detect", docs["bricard-c2"], "--json"])
        assert out1 == out2


class TestTrace:
    def test_trace_writes_json_frames(self, docs, tmp_path, capsys):
        out_path = tmp_path / "frames.json"
        code, out, _ = run(
            capsys,
            ["trace", docs["bricard-c2"], "--steps", "5", "--step-size", "0.02",
             "--out", str(out_path), "--json"],
        )
        assert code == 0
        frames = json.loads(out_path.read_text())["frames"]
        assert len(frames) == 6
        assert len(frames[0]) == 6 and len(frames[0][0]) == 3

    def test_trace_writes_csv_frames(self, docs, tmp_path, capsys):
        out_path = tmp_path / "frames.csv"
        code, _, _ = run(
            capsys,
            ["trace", docs["bricard-c2"], "--steps", "4", "--step-size", "0.02",
             "--out", str(out_path)],
        )
        assert code == 0
        lines = out_path.read_text().strip().splitlines()
        assert lines[0].startswith("frame,v1_x,v1_y,v1_z")
        assert len(lines) == 1 + 5


class TestExample:
    def test_example_to_stdout_parses(self, capsys):
        code, out, _ = run(capsys, ["example", "k33-phi-a"])
        assert code == 0
        doc = parse_document(out)
        assert doc.vertex_count == 6

    def test_example_outputs_always_validate(self, tmp_path, capsys):
        from symrig.catalog import example_names

        for name in example_names():
            path = tmp_path / f"{name}.fw"
            assert main(["example", name, "--out", str(path)]) == 0
            assert main(["validate", str(path)]) == 0
            capsys.readouterr()

    def test_example_deterministic_output(self, capsys):
        _, out1, _ = run(capsys, ["example", "bricard-c2", "--seed", "9"])
        _, out2, _ = run(capsys, ["example", "bricard-c2", "--seed", "9"])
        assert out1 == out2
