import json

import matplotlib
import pytest
from click.testing import CliRunner

import hefcheck as hc
from hefcheck.cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_RESOURCE_LIMIT, EXIT_VIOLATED, main
from hefcheck.io import load_program
from hefcheck.registry import example_path

matplotlib.use("Agg")


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def bundled(write):
    def _bundled(name):
        path = example_path(name)
        return write(path.name, path.read_text(encoding="utf-8"))

    return _bundled


class TestCheck:
    def test_not_hef(self, runner, bundled):
        result = runner.invoke(main, ["check", bundled("example2")])
        assert result.exit_code == EXIT_VIOLATED
        lines = result.output.splitlines()
        assert lines[0] == "not_hef: E={b, c}"
        assert lines[1] == "violating rule 0: b | c :- a."
        assert lines[-2:] == ["  b :- c.", "  c :- b."]

    def test_hef(self, runner, write):
        result = runner.invoke(main, ["check", write("p.lp", "a :- b.\nb :- a.\n")])
        assert result.exit_code == EXIT_OK
        assert result.output == "hef\n"

    def test_hcf_mode(self, runner, bundled):
        result = runner.invoke(main, ["check", "--mode", "hcf", bundled("example2")])
        assert result.exit_code == EXIT_VIOLATED
        assert result.output.startswith("not_hcf: rule 0 (b | c :- a.) has b and c")

    def test_hcf_mode_accepts(self, runner, write):
        path = write("p.lp", "a | b.\nc :- a.\nc :- b.\n")
        result = runner.invoke(main, ["check", "--mode", "hcf", path])
        assert result.exit_code == EXIT_OK

    def test_json_is_deterministic(self, runner, bundled):
        path = bundled("example3")
        first = runner.invoke(main, ["check", "--format", "json", path])
        second = runner.invoke(main, ["check", "--format", "json", path])
        assert first.output == second.output
        data = json.loads(first.output)
        assert data["version"] == 1
        assert data["command"] == "check"
        assert data["status"] == "not_hef"
        assert data["elementary_set"] == ["b", "c", "e"]
        assert data["stats"]["candidates"] == 16

    def test_atom_cap(self, runner, bundled):
        result = runner.invoke(main, ["check", "--max-atoms", "5", bundled("example3")])
        assert result.exit_code == EXIT_RESOURCE_LIMIT
        assert result.output.startswith("resource_limit:")

    def test_option_out_of_range(self, runner, bundled):
        result = runner.invoke(main, ["check", "--max-subset", "0", bundled("example2")])
        assert result.exit_code == 2
        assert "Invalid value" in result.output

    def test_parse_error(self, runner, write):
        path = write("bad.lp", "a :- b.\nb :- .\n")
        result = runner.invoke(main, ["check", path])
        assert result.exit_code == EXIT_INPUT_ERROR
        assert f"error: {path}:2:" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(main, ["check", str(tmp_path / "nope.lp")])
        assert result.exit_code == EXIT_INPUT_ERROR
        assert result.output.startswith("error:")

    def test_dot_and_plot(self, runner, bundled, tmp_path):
        dot, png = tmp_path / "g.dot", tmp_path / "g.png"
        result = runner.invoke(
            main, ["check", bundled("example2"), "--dot", str(dot), "--plot", str(png)]
        )
        assert result.exit_code == EXIT_VIOLATED
        assert dot.read_text(encoding="utf-8").startswith("digraph dependencies {")
        assert png.stat().st_size > 0


class TestCertificates:
    def test_round_trip(self, runner, bundled, tmp_path):
        program = bundled("example3")
        cert = tmp_path / "cert.json"
        result = runner.invoke(main, ["check", program, "--certificate", str(cert)])
        assert result.exit_code == EXIT_VIOLATED
        result = runner.invoke(main, ["verify", program, str(cert)])
        assert result.exit_code == EXIT_OK
        assert result.output == "valid\n"

    def test_other_program(self, runner, bundled, write, tmp_path):
        cert = tmp_path / "cert.json"
        runner.invoke(main, ["check", bundled("example2"), "--certificate", str(cert)])
        other = write("other.lp", "b | c :- a.\nb :- c.\nc :- b.\na :- b.\n")
        result = runner.invoke(main, ["verify", other, str(cert)])
        assert result.exit_code == EXIT_VIOLATED
        assert "another program" in result.output

    def test_tampered(self, runner, bundled, tmp_path):
        program = bundled("example2")
        cert = tmp_path / "cert.json"
        runner.invoke(main, ["check", program, "--certificate", str(cert)])
        data = json.loads(cert.read_text(encoding="utf-8"))
        data["violating_rule"] = 1
        cert.write_text(json.dumps(data), encoding="utf-8")
        result = runner.invoke(main, ["verify", "--format", "json", program, str(cert)])
        assert result.exit_code == EXIT_VIOLATED
        assert json.loads(result.output)["valid"] is False

    def test_malformed(self, runner, bundled, write):
        cert = write("cert.json", "{not json")
        result = runner.invoke(main, ["verify", bundled("example2"), cert])
        assert result.exit_code == EXIT_INPUT_ERROR


class TestElementary:
    def test_elementary(self, runner, bundled):
        result = runner.invoke(main, ["elementary", bundled("example2"), "--set", "b,c"])
        assert result.exit_code == EXIT_OK
        assert result.output == "elementary: {b, c}\n"

    def test_not_elementary(self, runner, bundled):
        result = runner.invoke(
            main, ["elementary", bundled("example2"), "--set", "a,b,c,d", "--format", "json"]
        )
        assert result.exit_code == EXIT_VIOLATED
        assert sorted(json.loads(result.output)["failing_subset"]) == ["a", "b", "c"]

    def test_unknown_atom(self, runner, bundled):
        result = runner.invoke(main, ["elementary", bundled("example2"), "--set", "zz"])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_subset_cap(self, runner, bundled):
        result = runner.invoke(
            main, ["elementary", bundled("example3"), "--set", "a,b,c,d,e,f", "--max-subset", "3"]
        )
        assert result.exit_code == EXIT_RESOURCE_LIMIT


class TestSemanticsCommands:
    def test_stable(self, runner, bundled):
        result = runner.invoke(main, ["stable", bundled("stable_demo")])
        assert result.exit_code == EXIT_OK
        assert result.output == "a c\n"

    def test_stable_json(self, runner, write):
        result = runner.invoke(
            main, ["stable", "--format", "json", write("p.lp", "a | b.\n")]
        )
        assert json.loads(result.output)["models"] == [["a"], ["b"]]

    def test_shift(self, runner, bundled):
        result = runner.invoke(main, ["shift", bundled("shift_counterexample")])
        assert result.exit_code == EXIT_OK
        assert result.output == "a :- not b.\nb :- not a.\na :- b.\nb :- a.\n"


class TestReduction:
    def test_reduce_to_file(self, runner, bundled, tmp_path):
        out = tmp_path / "red.lp"
        result = runner.invoke(main, ["reduce", bundled("one_clause"), "-o", str(out)])
        assert result.exit_code == EXIT_OK
        assert "16 rules over 10 atoms" in result.output
        assert len(load_program(out)) == 16

    def test_reduce_to_stdout(self, runner, bundled):
        result = runner.invoke(main, ["reduce", bundled("one_clause")])
        assert result.output.splitlines()[0] == "c0 | c2 :- phi."

    def test_bad_cnf(self, runner, write):
        result = runner.invoke(main, ["reduce", write("bad.cnf", "p cnf 2 1\n1 2 0\n")])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_xvalidate(self, runner, bundled, tmp_path):
        report = tmp_path / "report.json"
        result = runner.invoke(
            main, ["xvalidate", bundled("one_clause"), "--report", str(report)]
        )
        assert result.exit_code == EXIT_OK
        assert result.output.endswith(": consistent (sat, not_hef)\n")
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["command"] == "xvalidate"
        assert data["formulas"][0]["equivalence"] == "consistent"

    def test_xvalidate_inconclusive(self, runner, bundled):
        result = runner.invoke(
            main, ["xvalidate", bundled("all_shapes"), "--max-subset", "8"]
        )
        assert result.exit_code == EXIT_RESOURCE_LIMIT
        assert "inconclusive (unsat, resource_limit)" in result.output


def test_verbose_flag(runner, write):
    result = runner.invoke(main, ["-v", "check", write("p.lp", "a.\n")])
    assert result.exit_code == EXIT_OK
    assert result.output.endswith("hef\n")


@pytest.mark.usefixtures("clear_config")
@pytest.mark.parametrize(
    "args",
    [
        ["check", "example2"],
        ["check", "example3"],
        ["check", "stable_demo"],
        ["check", "shift_counterexample"],
        ["elementary", "example2", "--set", "a,b,c,d"],
        ["elementary", "example3", "--set", "b,c,e"],
        ["xvalidate", "one_clause"],
    ],
)
def test_json_is_identical_across_thread_counts(runner, bundled, args):
    command, name, *rest = args
    path = bundled(name)
    outputs = []
    for threads in (1, 4):
        hc.config["threads"] = threads
        result = runner.invoke(main, [command, "--format", "json", path, *rest])
        outputs.append((result.exit_code, result.output))
    assert outputs[0] == outputs[1]
