import time

import pytest

import hefcheck as hc
from hefcheck.depgraph import build_dep_graph, induced_strongly_connected, is_hcf, sccs, to_dot
from hefcheck.elementary import is_elementary_bruteforce
from hefcheck.io import parse_program
from hefcheck.program import AtomSet


def names(program, sets):
    return [program.names(s) for s in sets]


class TestDepGraph:
    def test_example2(self, example2):
        graph = build_dep_graph(example2)
        b, c, a, d = range(4)
        assert graph.nodes == example2.all_atoms
        assert set(graph.edges()) == {
            (a, b), (a, c), (c, b), (b, c), (b, a), (b, d), (c, d)
        }
        assert names(example2, sccs(graph)) == [["b", "c", "a"], ["d"]]
        assert graph.component_of(a) == example2.atom_set(["a", "b", "c"])

    def test_example3_single_component(self, example3):
        graph = build_dep_graph(example3)
        assert sccs(graph) == [example3.all_atoms]

    def test_negation_only_atoms_are_not_nodes(self, stable_demo):
        graph = build_dep_graph(stable_demo)
        assert stable_demo.atom_id("d") in graph.nodes
        # b occurs only in heads and under negation
        assert stable_demo.atom_id("b") in graph.nodes
        assert graph.nodes == stable_demo.all_atoms
        lone = parse_program("a :- not b.")
        assert build_dep_graph(lone).nodes == lone.atom_set(["a"])

    def test_empty_program(self):
        graph = build_dep_graph(parse_program(""))
        assert sccs(graph) == []
        assert graph.edges() == []

    def test_self_loop(self):
        p = parse_program("a :- a.\nb :- a.")
        graph = build_dep_graph(p)
        assert (0, 0) in graph.edges()
        assert names(p, sccs(graph)) == [["a"], ["b"]]


class TestStrongConnectivity:
    @pytest.mark.parametrize(
        "atoms, expected",
        [
            (["a", "b", "c"], True),
            (["b", "c"], True),
            (["a", "b"], True),
            (["a", "c"], False),
            (["a", "d"], False),
            (["d"], True),
        ],
    )
    def test_example2(self, example2, atoms, expected):
        graph = build_dep_graph(example2)
        assert induced_strongly_connected(graph, example2.atom_set(atoms)) is expected

    def test_non_node_atoms(self):
        p = parse_program("a :- not b.\nb :- c.")
        graph = build_dep_graph(p)
        assert induced_strongly_connected(graph, p.atom_set(["b"]))
        assert not induced_strongly_connected(graph, p.atom_set(["a", "b"]))

    def test_elementary_sets_are_strongly_connected(self, program_space):
        for rules in program_space(3, 2):
            program = hc.intern_program(rules)
            graph = build_dep_graph(program)
            for mask in range(1, 1 << program.num_atoms):
                y = AtomSet(mask)
                if is_elementary_bruteforce(y, program):
                    assert induced_strongly_connected(graph, y)


class TestHcf:
    def test_example2(self, example2):
        verdict = is_hcf(example2)
        assert not verdict
        assert verdict.rule == 0
        assert verdict.pair == (0, 1)

    def test_nondisjunctive_is_hcf(self):
        assert is_hcf(parse_program("a :- b.\nb :- a."))

    def test_disjunction_across_components(self):
        assert is_hcf(parse_program("a | b.\nc :- a.\nc :- b."))

    def test_pab(self, pab):
        assert not is_hcf(pab)

    @pytest.mark.slow
    def test_time_grows_linearly(self):
        def chain(n):
            # x_i+1 | y_i :- x_i, acyclic so every rule is scanned
            return hc.intern_program(
                [([f"x{i + 1}", f"y{i}"], [f"x{i}"], []) for i in range(n)]
            )

        def best_time(program):
            times = []
            for _ in range(7):
                start = time.perf_counter()
                assert is_hcf(program)
                times.append(time.perf_counter() - start)
            return min(times)

        ratio = best_time(chain(4000)) / best_time(chain(2000))
        assert ratio < 3.0


def test_to_dot(example2):
    graph = build_dep_graph(example2)
    dot = to_dot(graph, example2)
    assert dot.startswith("digraph dependencies {")
    assert '"a" -> "b";' in dot
    assert '"b" -> "d";' in dot
    assert dot.count("fillcolor") == 4
    assert 'comment="scc 1"' in dot
