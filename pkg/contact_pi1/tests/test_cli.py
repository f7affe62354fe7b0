import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from contact_pi1.corpus import check_entry, corpus
from contact_pi1.main_cli import main, run, validation_report
from contact_pi1.schemas import parse_documents, parse_input
from contact_pi1.src.errors import ParseError

EXAMPLES_DIR = Path(__file__).resolve().parents[2] / "data" / "examples"

LENS_P3 = {"kind": "cone", "ambient_dim": 2, "normals": [[1, 0], [-1, 3]], "label": "L(3, 1)"}
UNIT_SQUARE = {
    "kind": "polytope",
    "ambient_dim": 2,
    "halfspaces": [
        {"normal": [1, 0], "offset": 0},
        {"normal": [-1, 0], "offset": -1},
        {"normal": [0, 1], "offset": 0},
        {"normal": [0, -1], "offset": -1},
    ],
}
NON_GOOD = {"kind": "cone", "ambient_dim": 3, "normals": [[1, 0, 0], [1, 2, 0], [-1, -1, 1]]}
TRIANGLE = {
    "kind": "polytope",
    "ambient_dim": 2,
    "halfspaces": [
        {"normal": [1, 0], "offset": 0},
        {"normal": [0, 1], "offset": 0},
        {"normal": [-1, -2], "offset": -3},
    ],
}


@pytest.fixture
def write_document(tmp_path):
    def _write(document, name="input.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)
    return _write


class TestParseInput:

    def test_cone(self):
        document = parse_input(json.dumps(LENS_P3))
        assert document.kind == "cone"
        assert document.normals == [[1, 0], [-1, 3]]

    def test_fraction_offset(self):
        data = dict(TRIANGLE, halfspaces=[dict(h) for h in TRIANGLE["halfspaces"]])
        data["halfspaces"][2]["offset"] = "-3/2"
        document = parse_input(json.dumps(data))
        assert document.halfspaces[2].offset == Fraction(-3, 2)

    def test_malformed_json_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_input('{"kind": "cone"}\n\n}')
        assert info.value.line == 3

    def test_float_offset_rejected(self):
        data = dict(UNIT_SQUARE, halfspaces=[{"normal": [1, 0], "offset": 0.5}])
        with pytest.raises(ParseError) as info:
            parse_input(json.dumps(data))
        assert info.value.field == "halfspaces.0.offset"

    def test_unknown_field(self):
        with pytest.raises(ParseError) as info:
            parse_input(json.dumps(dict(LENS_P3, colour="red")))
        assert info.value.field == "colour"

    def test_missing_field(self):
        with pytest.raises(ParseError, match="normals"):
            parse_input('{"kind": "cone", "ambient_dim": 2}')

    def test_field_not_allowed_for_kind(self):
        with pytest.raises(ParseError, match="bundle_class"):
            parse_input(json.dumps(dict(UNIT_SQUARE, bundle_class=[1, 2, 3])))

    def test_boolean_is_not_an_integer(self):
        with pytest.raises(ParseError):
            parse_input('{"kind": "cone", "ambient_dim": 2, "normals": [[true, 0], [0, 1]]}')

    @pytest.mark.skipif(not hasattr(sys, "get_int_max_str_digits"), reason="no integer string limit")
    def test_oversized_integer_literal(self):
        with pytest.raises(ParseError):
            parse_input('{"kind": "t3_bundle", "bundle_class": [' + "9" * 5000 + ", 0, 0]}")

    def test_batch(self):
        documents = parse_documents(json.dumps([LENS_P3, UNIT_SQUARE]))
        assert [d.kind for d in documents] == ["cone", "polytope"]

    def test_batch_error_names_the_document(self):
        with pytest.raises(ParseError) as info:
            parse_documents(json.dumps([LENS_P3, {"kind": "sphere"}]))
        assert info.value.field.startswith("1.")


class TestRun:

    def test_lens(self):
        report = run(parse_input(json.dumps(LENS_P3)))
        assert report.class_label == "ReebType"
        assert report.pi1 == "Z/3"
        assert report.cross_check == "Agree"
        assert {name: method.result for name, method in report.methods.items()} == {
            "thmB": "Z/3", "lerman": "Z/3", "thmC": "Z/3",
        }

    def test_unit_square(self):
        report = run(parse_input(json.dumps(UNIT_SQUARE)))
        assert report.pi1 == "0"
        assert report.validation.delzant is True
        assert report.reeb == [0, 0, 1]

    def test_non_good(self):
        report = run(parse_input(json.dumps(NON_GOOD)))
        assert report.class_label == "InvalidMomentCone"
        assert report.pi1 == "Z/2"
        assert report.methods["thmB"].result is None
        assert report.validation.good is False

    def test_triangle_echoes_exact_offsets(self):
        report = run(parse_input(json.dumps(TRIANGLE)))
        assert report.input["halfspaces"][2] == {"normal": [-1, -2], "offset": -3}
        orders = sorted(entry.order for entry in report.orbifold.vertex_orders)
        assert orders == [1, 1, 2]

    def test_polytope_rescale_warning(self):
        data = dict(UNIT_SQUARE, halfspaces=[{"normal": [2, 0], "offset": 0}] + UNIT_SQUARE["halfspaces"][1:])
        report = run(parse_input(json.dumps(data)))
        assert report.warnings == ["halfspace 0 divided by 2"]
        assert report.pi1 == "0"

    def test_morse_data(self):
        report = run(parse_input(json.dumps(LENS_P3)))
        assert report.morse.betti2 == 1
        assert [step.pi1 for step in report.morse.filtration] == ["Z", "Z/3"]
        assert "filtration:  Z -> Z/3" in report.to_text()

    def test_bundle_basis(self):
        report = run(parse_input(json.dumps({"kind": "t3_bundle", "bundle_class": [2, 4, 6]})))
        assert report.bundle_basis[0] == [1, 2, 3]
        assert report.morse is None

    def test_text_report(self):
        text = run(parse_input(json.dumps(LENS_P3))).to_text()
        assert "pi1:         Z/3" in text
        assert "cross-check: Agree" in text


def test_validation_report_for_non_good_cone():
    result = validation_report(parse_input(json.dumps(NON_GOOD)))
    assert result["good"] is False
    assert result["failures"][0]["ray"] == [0, 0, 1]
    assert result["failures"][0]["smith_invariants"] == [1, 2]
    assert [ray["generator"] for ray in result["rays"]] == sorted(ray["generator"] for ray in result["rays"])


class TestMain:

    def test_compute(self, write_document, capsys):
        assert main(["compute", write_document(LENS_P3)]) == 0
        assert json.loads(capsys.readouterr().out)["pi1"] == "Z/3"

    def test_output_is_byte_identical(self, write_document, capsys):
        path = write_document(TRIANGLE)
        main(["compute", path])
        first = capsys.readouterr().out
        main(["compute", path])
        assert capsys.readouterr().out == first

    def test_batch(self, write_document, capsys):
        assert main(["compute", write_document([LENS_P3, UNIT_SQUARE])]) == 0
        assert [r["pi1"] for r in json.loads(capsys.readouterr().out)] == ["Z/3", "0"]

    def test_text_format(self, write_document, capsys):
        assert main(["compute", write_document(UNIT_SQUARE), "--format", "text"]) == 0
        assert "class:       ReebType" in capsys.readouterr().out

    def test_invalid_input_exit_code(self, write_document, capsys):
        path = write_document({"kind": "cone", "ambient_dim": 2, "normals": [[1, 0], [2, 0]]})
        assert main(["compute", path]) == 1
        error = json.loads(_stderr_json(capsys))
        assert error["error"] == "DuplicateNormal"

    @pytest.mark.skipif(not hasattr(sys, "get_int_max_str_digits"), reason="no integer string limit")
    def test_oversized_integer_exit_code(self, tmp_path, capsys):
        path = tmp_path / "huge.json"
        path.write_text('{"kind": "cone", "ambient_dim": ' + "9" * 5000 + ', "normals": []}')
        assert main(["compute", str(path)]) == 1
        assert json.loads(_stderr_json(capsys))["error"] == "ParseError"

    def test_missing_file(self, tmp_path, capsys):
        assert main(["compute", str(tmp_path / "missing.json")]) == 1

    def test_thmC_only_on_non_delzant_slice(self, write_document):
        assert main(["compute", write_document(TRIANGLE), "--method", "thmC"]) == 1

    def test_validate(self, write_document, capsys):
        assert main(["validate", write_document(NON_GOOD)]) == 0
        assert json.loads(capsys.readouterr().out)["good"] is False

    def test_corpus_emit(self, tmp_path, capsys):
        assert main(["corpus", "--emit", str(tmp_path)]) == 0
        assert len(list(tmp_path.glob("*.json"))) == len(corpus())

    def test_crossval(self, capsys):
        assert main(["crossval", "--count", "4", "--seed", "7"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["success"] is True
        assert summary["statistics"]["trials"] == 4


def _stderr_json(capsys):
    err = capsys.readouterr().err
    start = err.index('{\n  "error"')
    return err[start:err.rindex("}") + 1]


@pytest.mark.parametrize("entry", corpus(), ids=lambda entry: entry.name)
def test_corpus_entry(entry):
    assert check_entry(entry)["passed"]


@pytest.mark.parametrize("name, pi1", [
    ("lens_p3.json", "Z/3"),
    ("unit_square.json", "0"),
    ("non_good_cone.json", "Z/2"),
    ("t3_bundle.json", "Z/2 + Z^2"),
    ("triangle.json", "Z/3"),
])
def test_shipped_examples(name, pi1):
    document = parse_input((EXAMPLES_DIR / name).read_bytes())
    assert run(document).pi1 == pi1
