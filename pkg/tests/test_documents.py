import numpy as np
import pytest

from symrig import (
    DocumentError,
    build_framework,
    builtin_example,
    parse_document,
    render_document,
    validate_document,
    validate_type_map,
)
from symrig.catalog import example_names, octahedron_edges


class TestParseAndRender:
    def test_triangle_roundtrip(self):
        doc = builtin_example("triangle-cs")
        text = render_document(doc)
        again = render_document(parse_document(text))
        assert text == again

    def test_bricard_roundtrip_byte_identical(self):
        doc = builtin_example("bricard-c2")
        text = render_document(doc)
        assert text == render_document(parse_document(text))

    def test_syntax_error_carries_location(self):
        with pytest.raises(DocumentError) as err:
            parse_document('{"format_version": 1,,}')
        assert err.value.syntactic
        assert err.value.line == 1

    def test_missing_key_is_semantic(self):
        with pytest.raises(DocumentError, match="dimension"):
            parse_document('{"format_version": 1}')

    def test_non_automorphism_phi_names_missing_edge(self):
        doc = builtin_example("triangle-cs")
        data = doc.to_dict()
        data["edges"] = [[1, 2], [1, 3]]  # drop (2,3): the swap is no automorphism
        import json

        with pytest.raises(DocumentError, match="not an edge"):
            parse_document(json.dumps(data))

    def test_unknown_option_rejected(self):
        doc = builtin_example("triangle-cs")
        data = doc.to_dict()
        data["options"] = {"bogus": 1}
        import json

        with pytest.raises(DocumentError, match="bogus"):
            parse_document(json.dumps(data))

    def test_float_formatting_17_digits(self):
        doc = builtin_example("bricard-c2")
        text = render_document(doc)
        value = float(doc.coordinates[0][0])
        assert format(value, ".17g") in text


class TestValidation:
    def test_triangle_document_validates(self):
        report = validate_document(builtin_example("triangle-cs"))
        assert report["valid"]
        assert report["max_residual"] <= report["tolerance"]

    def test_every_builtin_validates(self):
        for name in example_names():
            report = validate_document(builtin_example(name))
            assert report["valid"], name

    def test_build_framework_matches_validate(self):
        built = build_framework(builtin_example("k33-phi-a"))
        assert validate_type_map(built.framework, built.phi).valid


class TestBuiltins:
    def test_unknown_name(self):
        with pytest.raises(DocumentError, match="unknown example"):
            builtin_example("nope")

    def test_double_suspension_smallest_is_octahedron(self):
        doc = builtin_example("double-suspension", n=2)
        assert doc.vertex_count == 6
        assert sorted(doc.edges) == octahedron_edges()

    def test_double_suspension_inline_parameter(self):
        doc = builtin_example("double-suspension(3)")
        assert doc.vertex_count == 8
        assert len(doc.edges) == 6 + 12

    def test_double_suspension_rejects_tiny(self):
        with pytest.raises(DocumentError):
            builtin_example("double-suspension", n=1)

    def test_size_parameter_only_for_double_suspension(self):
        with pytest.raises(DocumentError):
            builtin_example("triangle-cs", n=3)

    def test_seeded_examples_are_deterministic(self):
        a = render_document(builtin_example("bricard-cs", seed=3))
        b = render_document(builtin_example("bricard-cs", seed=3))
        assert a == b
        c = render_document(builtin_example("bricard-cs", seed=4))
        assert a != c

    def test_sampled_documents_carry_generic_flag(self):
        doc = builtin_example("octahedron-c2v")
        assert doc.options.assume_generic
        fixed = builtin_example("k33-hexagon")
        assert not fixed.options.assume_generic

    def test_hexagon_joints_on_unit_circle(self):
        doc = builtin_example("k33-hexagon")
        radii = np.linalg.norm(np.asarray(doc.coordinates), axis=1)
        assert radii == pytest.approx(np.ones(6))
