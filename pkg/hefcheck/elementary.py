import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    BadSubsetError,
    CapExceededError,
    DisjunctiveInputError,
    UnknownAtomError,
)
from .program import AtomSet, check_deadline, iter_bits, project_rules
from .settings import config

logger = logging.getLogger(__name__)

# subsets are scanned in chunks of this many masks; the chunking is fixed so
# results never depend on the worker count
CHUNK_SIZE = 1 << 14


@dataclass(frozen=True)
class OutboundEvidence:
    """
    Result of an outbound test for `subset`.

    `rule` is the index of the first rule witnessing that the subset is
    outbound, or None when it is not. Truthy exactly when outbound.
    """

    subset: AtomSet
    rule: int | None = None

    def __bool__(self):
        return self.rule is not None


@dataclass(frozen=True)
class ElementaryVerdict:
    """
    Truthy when the set is elementary; otherwise `failing` is the first
    non-outbound subset in (cardinality, bitmask) order, a minimal one.
    """

    elementary: bool
    failing: AtomSet | None = None

    def __bool__(self):
        return self.elementary


@dataclass(frozen=True)
class WitnessCheck:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


def _check_proper(z, y):
    if not z:
        raise BadSubsetError("the subset must be nonempty")
    if not z <= y:
        raise BadSubsetError("the subset is not contained in the set")
    if z == y:
        raise BadSubsetError("the subset must be proper")


def is_outbound(z, y, program):
    """
    Test whether `z` is outbound in `y` for `program`.

    A rule witnesses it when (i) H∩Z≠∅, (ii) B∩(Y∖Z)≠∅, (iii) B∩Z=∅ and
    (iv) H∩(Y∖Z)=∅. Negative bodies play no role.

    Parameters
    ----------
    z, y : AtomSet
        With ∅ ⊂ z ⊂ y.
    program : Program

    Returns
    -------
    OutboundEvidence
        Carrying the first witnessing rule in source order, if any.
    """
    _check_proper(z, y)
    inside, rest = z.mask, (y - z).mask
    for i, rule in enumerate(program.rules):
        head, pos = rule.head.mask, rule.pos.mask
        if head & inside and pos & rest and not pos & inside and not head & rest:
            return OutboundEvidence(z, i)
    return OutboundEvidence(z)


def outbound_in_projection(z, y, program):
    """
    Outbound test through the projection P_Y: some projected rule has
    ∅ ⊂ H′ ⊆ Z and ∅ ⊂ B′ ⊆ Y∖Z.
    """
    _check_proper(z, y)
    rest = (y - z).mask
    return any(
        rule.head.mask & ~z.mask == 0 and rule.pos.mask & ~rest == 0
        for rule in project_rules(program.rules, y)
    )


def _compress(mask, positions):
    return sum(1 << j for j, p in enumerate(positions) if (mask >> p) & 1)


def _local_rules(rules, y):
    """
    The projection of `rules` on `y`, with `y`'s atoms renumbered 0..|y|-1 in
    ascending id order. Duplicates are dropped; multiplicity never matters for
    outbound tests.
    """
    positions = list(y)
    local = {}
    for rule in project_rules(rules, y):
        key = (_compress(rule.head.mask, positions), _compress(rule.pos.mask, positions))
        local.setdefault(key, None)
    return positions, list(local)


def _first_uncovered(lo, hi, rules, deadline):
    check_deadline(deadline)
    z = np.arange(lo, hi, dtype=np.int64)
    covered = np.zeros(z.shape, dtype=bool)
    for head, pos in rules:
        covered |= ((z & head) == head) & ((z & pos) == 0)
    failing = z[~covered]
    if failing.size == 0:
        return None
    counts = np.bitwise_count(failing)
    best = np.lexsort((failing, counts))[0]
    return int(counts[best]), int(failing[best])


def is_elementary_bruteforce(y, program, *, max_subset=None, threads=None, deadline=None):
    """
    Decide whether `y` is elementary for `program` by checking every nonempty
    proper subset.

    Subsets are compared in ascending cardinality, then ascending bitmask, so
    the reported failing subset is minimal by cardinality and by inclusion.

    Parameters
    ----------
    y : AtomSet
        Nonempty candidate set.
    program : Program
    max_subset : int, optional
        Cap on `|y|`. Defaults to `config["max_subset"]`.
    threads : int, optional
        Workers scanning subset chunks. Defaults to `config["threads"]`.
    deadline : float, optional
        Monotonic deadline polled between chunks.

    Returns
    -------
    ElementaryVerdict

    Raises
    ------
    BadSubsetError
        If `y` is empty.
    CapExceededError
        If `|y|` exceeds the cap.
    """
    max_subset = config["max_subset"] if max_subset is None else max_subset
    threads = config["threads"] if threads is None else threads
    if not y:
        raise BadSubsetError("an elementary set must be nonempty")
    k = len(y)
    if k > max_subset:
        raise CapExceededError("candidate set", k, max_subset)
    if k == 1:
        return ElementaryVerdict(True)

    positions, rules = _local_rules(program.rules, y)
    full = (1 << k) - 1
    starts = list(range(1, full, CHUNK_SIZE))
    stops = [min(lo + CHUNK_SIZE, full) for lo in starts]
    scan = partial(_first_uncovered, rules=rules, deadline=deadline)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(scan, starts, stops))
    else:
        found = [scan(lo, hi) for lo, hi in zip(starts, stops)]
    found = [f for f in found if f is not None]
    if not found:
        return ElementaryVerdict(True)
    _, local = min(found)
    return ElementaryVerdict(False, AtomSet.of(positions[j] for j in iter_bits(local)))


def has_support(y, program):
    """
    Check the per-atom rule conditions every elementary set with more than
    one atom satisfies: each a in Y heads a rule with H∩Y={a}, a∉B, B∩Y≠∅,
    and is the only Y-atom in the body of a rule with a∉H, H∩Y≠∅.
    """
    if len(y) <= 1:
        return True
    headed = bodied = 0
    for rule in program.rules:
        head_y = rule.head.mask & y.mask
        pos_y = rule.pos.mask & y.mask
        if not head_y or not pos_y:
            continue
        if head_y & (head_y - 1) == 0 and not rule.pos.mask & head_y:
            headed |= head_y
        if pos_y & (pos_y - 1) == 0 and not rule.head.mask & pos_y:
            bodied |= pos_y
    return headed == y.mask and bodied == y.mask


def is_elementary_poly(y, program):
    """
    Polynomial elementary-set test for nondisjunctive programs.

    Grows the elementary subgraph over `y`: starting without edges, a rule
    `a <- B` with a in Y adds the edges (a, b) for b in B∩Y once B∩Y is
    nonempty and inside a single SCC of the current graph. `y` is elementary
    iff the graph at the fixpoint is strongly connected.

    Raises
    ------
    DisjunctiveInputError
        If some rule has more than one head atom.
    """
    if program.is_disjunctive:
        raise DisjunctiveInputError("the polynomial test needs a nondisjunctive program")
    if not y:
        raise BadSubsetError("an elementary set must be nonempty")
    k = len(y)
    if k == 1:
        return True

    _, rules = _local_rules(program.rules, y)
    arcs = [(head.bit_length() - 1, list(iter_bits(pos))) for head, pos in rules]
    adjacency = np.zeros((k, k), dtype=bool)
    changed = True
    while changed:
        _, labels = connected_components(adjacency, directed=True, connection="strong")
        changed = False
        for a, body in arcs:
            if len(set(labels[body])) == 1 and not adjacency[a, body].all():
                adjacency[a, body] = True
                changed = True
    count, _ = connected_components(adjacency, directed=True, connection="strong")
    return count == 1


def verify_witness(e, witness, program, *, max_subset=None):
    """
    Check that `witness` is a witness of `e` for `program`.

    Every witness rule must be the projection on `e` of some program rule
    (duplicates ignored) and `e` must be elementary for the witness. The
    polynomial test is used when the witness is nondisjunctive.

    Parameters
    ----------
    e : AtomSet
        Set over the atoms of `program`.
    witness : Program
        Matched to `program` by atom names.
    program : Program

    Returns
    -------
    WitnessCheck
        Falsy with a reason when any condition fails.
    """
    if not e:
        return WitnessCheck(False, "the set is empty")
    try:
        rebased = witness.rebase(program)
    except UnknownAtomError as err:
        return WitnessCheck(False, str(err))

    projections = {(r.head.mask, r.pos.mask) for r in project_rules(program.rules, e)}
    for i, rule in enumerate(rebased.rules):
        if rule.neg or (rule.head.mask, rule.pos.mask) not in projections:
            return WitnessCheck(
                False, f"witness rule {i} is not a projection of a program rule on the set"
            )

    if rebased.is_disjunctive:
        elementary = bool(is_elementary_bruteforce(e, rebased, max_subset=max_subset))
    else:
        elementary = is_elementary_poly(e, rebased)
    if not elementary:
        return WitnessCheck(False, "the set is not elementary for the witness")
    return WitnessCheck(True)
