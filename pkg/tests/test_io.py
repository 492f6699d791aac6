import json

import pytest
from contextlib import nullcontext as does_not_raise

import hefcheck as hc
from hefcheck.errors import (
    BadAtomNameError,
    CertificateFormatError,
    EmptyHeadError,
    NotThreeCnfError,
    ParseError,
    UnknownAtomError,
)
from hefcheck.io import (
    Cnf3,
    SourceSpan,
    certificate_from_json,
    certificate_to_json,
    parse_dimacs,
    parse_program,
    program_sha256,
    render_dimacs,
    render_program,
    save_program,
)
from hefcheck.program import project


class TestParseProgram:
    def test_example2(self):
        p = parse_program("b | c :- a.\nb :- c.\nc :- b.\na :- b.\nd :- b, c.")
        assert len(p) == 5
        assert p.atoms == ("b", "c", "a", "d")

    def test_semicolon_and_comments(self):
        p = parse_program("% a comment\na ; b :- c. % trailing\n")
        assert p[0].head == p.atom_set(["a", "b"])
        assert p[0].pos == p.atom_set(["c"])

    def test_negation(self):
        p = parse_program("a :- not b, c.")
        assert p[0].pos == p.atom_set(["c"])
        assert p[0].neg == p.atom_set(["b"])

    def test_empty_text(self):
        assert len(parse_program("  % nothing\n")) == 0

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("a.", does_not_raise()),
            ("a :- b", pytest.raises(ParseError, match="expected '.'")),
            ("b | :- a.", pytest.raises(ParseError, match="head atom")),
            (":- a.", pytest.raises(EmptyHeadError)),
            ("a.\n.", pytest.raises(EmptyHeadError, match="rule 1")),
            ("B :- a.", pytest.raises(BadAtomNameError)),
            ("a :- 9b.", pytest.raises(BadAtomNameError)),
            ("a :- not.", pytest.raises(ParseError, match="after 'not'")),
            ("not :- a.", pytest.raises(ParseError, match="reserved")),
            ("a :- b & c.", pytest.raises(ParseError, match="unexpected character")),
        ],
    )
    def test_errors(self, text, expected):
        with expected:
            parse_program(text)

    def test_error_span(self):
        with pytest.raises(ParseError) as info:
            parse_program("a.\nb :- c")
        assert info.value.span == SourceSpan(2, 7, 9)
        assert str(info.value).startswith("2:7: ")

    def test_names_starting_with_not(self):
        p = parse_program("nota :- not notb, note.")
        assert p.atoms == ("nota", "note", "notb")
        assert p[0].neg == p.atom_set(["notb"])

    @pytest.mark.parametrize(
        "text, span",
        [
            ("a :- b & c.", SourceSpan(1, 8, 7)),
            (":- a.", SourceSpan(1, 1, 0)),
            ("a.\n.", SourceSpan(2, 1, 3)),
            ("a :- 9b.", SourceSpan(1, 6, 5)),
            ("a.\nb | :- c.", SourceSpan(2, 5, 7)),
        ],
    )
    def test_every_error_is_located(self, text, span):
        with pytest.raises(ValueError) as info:
            parse_program(text)
        assert info.value.span == span


class TestRenderProgram:
    def test_canonical_text(self, stable_demo):
        assert render_program(stable_demo) == (
            "b | c :- a.\ne :- d, not a.\ne :- c, f, not b.\na :- not b."
        )

    def test_round_trip(self, make_random_program, rng):
        for _ in range(200):
            program = make_random_program(rng, 6, 6, max_head=3, negation=True)
            text = render_program(program)
            assert parse_program(text) == program

    def test_save_and_load(self, tmp_path, example3):
        path = tmp_path / "example3.lp"
        save_program(example3, path)
        assert hc.load_program(path) == example3

    def test_projection(self, example3):
        projected = project(example3, example3.atom_set(["b", "c", "e", "f"]))
        assert projected.atoms == ("b", "c", "e", "f")
        assert render_program(projected) == (
            "b :- c.\ne :- b.\nf :- e.\ne :- f.\nc :- e."
        )


class TestDimacs:
    def test_parse(self):
        formula = parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n-1 2\n3 0\n")
        assert formula.num_vars == 3
        assert formula.clauses == ((1, -2, 3), (-1, 2, 3))

    def test_satlib_end_marker(self):
        formula = parse_dimacs("p cnf 3 1\n1 2 3 0\n%\n0\n")
        assert formula.num_clauses == 1

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("p cnf 3 1\n1 2 3 0\n", does_not_raise()),
            ("1 2 3 0\n", pytest.raises(ParseError, match="header")),
            ("", pytest.raises(ParseError, match="missing")),
            ("p cnf 3 1\n1 2 0\n", pytest.raises(NotThreeCnfError)),
            ("p cnf 3 1\n1 2 3 1 0\n", pytest.raises(NotThreeCnfError)),
            ("p cnf 3 1\n1 1 2 0\n", pytest.raises(NotThreeCnfError, match="repeats")),
            ("p cnf 3 1\n1 2 4 0\n", pytest.raises(ParseError, match="exceeds 3")),
            ("p cnf 3 1\n1 2 x 0\n", pytest.raises(ParseError, match="literal")),
            ("p cnf 3 1\n1 2 3\n", pytest.raises(ParseError, match="terminated")),
            ("p cnf 3 2\n1 2 3 0\n", pytest.raises(ParseError, match="announces 2")),
        ],
    )
    def test_errors(self, text, expected):
        with expected:
            parse_dimacs(text)

    @pytest.mark.parametrize(
        "text, span",
        [
            ("p cnf 3 1\n1 2 0\n", SourceSpan(2, 5, 14)),
            ("p cnf 3 1\n1 2 3 1 0\n", SourceSpan(2, 9, 18)),
            ("c x\np cnf 3 1\n1 1\n  2 0\n", SourceSpan(4, 5, 22)),
        ],
    )
    def test_clause_errors_are_located(self, text, span):
        with pytest.raises(NotThreeCnfError) as info:
            parse_dimacs(text)
        assert info.value.span == span
        assert str(info.value).startswith(f"{span}: clause 0")

    def test_tautology_warning(self, caplog):
        with caplog.at_level("WARNING", logger="hefcheck.io"):
            formula = parse_dimacs("p cnf 2 1\n1 -1 2 0\n")
        assert formula.is_tautological(0)
        assert "tautological" in caplog.text

    def test_render(self):
        formula = Cnf3(3, [(1, 2, 3), (-1, -2, -3)])
        assert render_dimacs(formula) == "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n"
        assert parse_dimacs(render_dimacs(formula)) == formula

    def test_cnf3_validation(self):
        with pytest.raises(NotThreeCnfError, match="outside"):
            Cnf3(2, [(1, 2, 3)])
        with pytest.raises(ValueError, match="clause"):
            Cnf3(2, [])


class TestCertificates:
    def test_json_schema(self, example2):
        verdict = hc.is_hef(example2)
        data = json.loads(certificate_to_json(example2, verdict.certificate))
        assert data["version"] == 1
        assert data["status"] == "not_hef"
        assert data["program_sha256"] == program_sha256(example2)
        assert data["elementary_set"] == ["b", "c"]
        assert data["witness"] == ["b :- c.", "c :- b."]
        assert data["violating_rule"] == 0

    def test_read_back(self, example2):
        cert = hc.is_hef(example2).certificate
        back, digest = certificate_from_json(certificate_to_json(example2, cert), example2)
        assert digest == program_sha256(example2)
        assert back.elementary_set == cert.elementary_set
        assert back.violating_rule == cert.violating_rule
        assert hc.verify_certificate(example2, back)

    def test_digest_ignores_layout(self, example2):
        spaced = parse_program("% same rules\nb|c:-a.  b:-c. c:-b.\na:-b.\nd:-b,c.\n")
        assert program_sha256(spaced) == program_sha256(example2)

    @pytest.mark.parametrize(
        "document, expected",
        [
            ("not json", pytest.raises(CertificateFormatError, match="not valid JSON")),
            ("[]", pytest.raises(CertificateFormatError, match="object")),
            ('{"version": 2}', pytest.raises(CertificateFormatError, match="version")),
            (
                '{"version": 1, "status": "hef"}',
                pytest.raises(CertificateFormatError, match="status"),
            ),
            (
                '{"version": 1, "status": "not_hef", "elementary_set": ["b", "c"],'
                ' "witness": ["b :- c."], "violating_rule": "0", "program_sha256": ""}',
                pytest.raises(CertificateFormatError, match="violating_rule"),
            ),
            (
                '{"version": 1, "status": "not_hef", "elementary_set": ["b", "c"],'
                ' "witness": ["b :-"], "violating_rule": 0, "program_sha256": ""}',
                pytest.raises(CertificateFormatError, match="does not parse"),
            ),
            (
                '{"version": 1, "status": "not_hef", "elementary_set": ["b", "zz"],'
                ' "witness": [], "violating_rule": 0, "program_sha256": ""}',
                pytest.raises(UnknownAtomError),
            ),
        ],
    )
    def test_malformed(self, example2, document, expected):
        with expected:
            certificate_from_json(document, example2)
