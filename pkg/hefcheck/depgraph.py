import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .program import AtomSet, iter_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DepGraph:
    """
    Positive dependency graph of a program.

    There is an edge (m, n) iff some rule has m in its positive body and n in
    its head. Atoms occurring only under negation are not nodes.

    Attributes
    ----------
    nodes : AtomSet
        Atoms occurring in some head or positive body.
    succ : tuple of int
        Successor bitmask of every atom id.
    pred : tuple of int
        Predecessor bitmask of every atom id.
    components : tuple of AtomSet
        Strongly connected components, numbered by their smallest member id.
    scc_id : dict
        Component index of every node.
    """

    nodes: AtomSet
    succ: tuple
    pred: tuple
    components: tuple
    scc_id: dict

    def edges(self):
        """All edges (m, n) in ascending order."""
        return [(m, n) for m in self.nodes for n in iter_bits(self.succ[m])]

    def component_of(self, atom_id):
        return self.components[self.scc_id[atom_id]]


def _strong_labels(num_nodes, sources, targets):
    if num_nodes == 0:
        return np.zeros(0, dtype=np.int32)
    graph = csr_matrix(
        (np.ones(len(sources), dtype=np.int8), (sources, targets)),
        shape=(num_nodes, num_nodes),
    )
    _, labels = connected_components(graph, directed=True, connection="strong")
    return labels


def build_dep_graph(program):
    """
    Build the positive dependency graph and its SCC decomposition.

    SCCs are computed on an auxiliary graph with one extra node per rule
    (body atoms -> rule node -> head atoms), which has the same reachability
    between atoms as the dependency graph but only `|B| + |H|` edges per rule,
    so the decomposition is linear in the program size.

    Parameters
    ----------
    program : Program

    Returns
    -------
    DepGraph
    """
    n = program.num_atoms
    succ = [0] * n
    pred = [0] * n
    nodes = 0
    sources, targets = [], []
    for k, rule in enumerate(program.rules):
        rule_node = n + k
        head, pos = rule.head.mask, rule.pos.mask
        nodes |= head | pos
        for b in iter_bits(pos):
            succ[b] |= head
            sources.append(b)
            targets.append(rule_node)
        for h in iter_bits(head):
            pred[h] |= pos
            sources.append(rule_node)
            targets.append(h)

    labels = _strong_labels(n + len(program.rules), sources, targets)
    groups = {}
    for atom in iter_bits(nodes):
        groups.setdefault(labels[atom], []).append(atom)
    # groups are filled in ascending atom order, so group[0] is the smallest member
    ordered = sorted(groups.values(), key=lambda group: group[0])
    components = tuple(AtomSet.of(group) for group in ordered)
    scc_id = {atom: i for i, group in enumerate(ordered) for atom in group}

    logger.debug(
        "dependency graph: %d nodes, %d components",
        nodes.bit_count(),
        len(components),
    )
    return DepGraph(AtomSet(nodes), tuple(succ), tuple(pred), components, scc_id)


def sccs(graph):
    """The SCC partition of the nodes, numbered by smallest member id."""
    return list(graph.components)


def _closure(start, step, within):
    seen = frontier = start
    while frontier:
        reached = 0
        for v in iter_bits(frontier):
            reached |= step[v]
        frontier = reached & within & ~seen
        seen |= frontier
    return seen


def induced_strongly_connected(graph, y):
    """
    Whether the subgraph induced by `y` is strongly connected.

    A singleton is always strongly connected; a larger set containing an atom
    that is not a graph node never is.
    """
    if len(y) == 1:
        return True
    if not y or not y <= graph.nodes:
        return False
    start = y.mask & -y.mask
    return (
        _closure(start, graph.succ, y.mask) == y.mask
        and _closure(start, graph.pred, y.mask) == y.mask
    )


@dataclass(frozen=True)
class HcfVerdict:
    """
    Outcome of the head-cycle-freeness check.

    Truthy when the program is HCF. Otherwise `rule` is the first rule (in
    source order) with two head atoms in one SCC and `pair` the first such
    pair of atom ids.
    """

    holds: bool
    rule: int | None = None
    pair: tuple | None = None

    def __bool__(self):
        return self.holds


def is_hcf(program, graph=None):
    """
    Decide head-cycle-freeness: no rule has two head atoms in one SCC.

    Parameters
    ----------
    program : Program
    graph : DepGraph, optional
        Reused when given, built otherwise.

    Returns
    -------
    HcfVerdict
    """
    graph = build_dep_graph(program) if graph is None else graph
    for k, rule in enumerate(program.rules):
        if not rule.is_disjunctive:
            continue
        seen = {}
        for atom in rule.head:
            component = graph.scc_id[atom]
            if component in seen:
                return HcfVerdict(False, k, (seen[component], atom))
            seen[component] = atom
    return HcfVerdict(True)


def to_dot(graph, program):
    """
    DOT rendering of the dependency graph, nodes filled with their SCC colour.
    """
    from .plotting import scc_colors

    colors = scc_colors(len(graph.components))
    out = "digraph dependencies {\n"
    out += '  node [shape=ellipse, style=filled, fontname="Helvetica"];\n'
    for atom in graph.nodes:
        component = graph.scc_id[atom]
        out += (
            f'  "{program.atoms[atom]}" '
            f'[fillcolor="{colors[component]}", comment="scc {component}"];\n'
        )
    for m, n in graph.edges():
        out += f'  "{program.atoms[m]}" -> "{program.atoms[n]}";\n'
    out += "}\n"
    return out
