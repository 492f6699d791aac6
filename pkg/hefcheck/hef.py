import logging
from math import comb
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import NamedTuple

from .depgraph import build_dep_graph, induced_strongly_connected, is_hcf
from .elementary import (
    WitnessCheck,
    has_support,
    is_elementary_bruteforce,
    verify_witness,
)
from .errors import (
    CapExceededError,
    DeadlineExceeded,
    NotDisjunctiveError,
    NotElementaryError,
)
from .program import (
    AtomSet,
    Program,
    check_capacity,
    check_deadline,
    first_disjunctive_rule,
    is_disjunctive_set,
    project_rules,
)
from .settings import Limits

logger = logging.getLogger(__name__)

# candidates surviving the pruning filters are decided in batches of this
# size; the first success of a batch in enumeration order wins
BATCH_SIZE = 64


class HefStatus(str, Enum):
    HEF = "hef"
    NOT_HEF = "not_hef"
    RESOURCE_LIMIT = "resource_limit"


@dataclass(frozen=True)
class HefCertificate:
    """
    Evidence that a program is not HEF.

    Attributes
    ----------
    elementary_set : AtomSet
        E, over the atoms of the analyzed program.
    witness : Program
        A nondisjunctive witness of E: projections on E of program rules for
        which E is elementary.
    violating_rule : int
        Index of a program rule whose head meets E in two or more atoms.
    """

    elementary_set: AtomSet
    witness: Program
    violating_rule: int


@dataclass
class SearchStats:
    pools: int = 0
    candidates: int = 0
    pruned_connectivity: int = 0
    pruned_support: int = 0
    elementary_checks: int = 0

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class HefVerdict:
    """
    Outcome of the HEF decision.

    `certificate` is present exactly when the status is `not_hef`;
    `elementary_set` is the candidate the search found, which contains the
    certificate's set. `resource_limit` means unknown, with `reason` set.
    """

    status: HefStatus
    certificate: HefCertificate | None = None
    elementary_set: AtomSet | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    reason: str = ""

    def __post_init__(self):
        if (self.status is HefStatus.NOT_HEF) != (self.certificate is not None):
            raise ValueError("a certificate accompanies exactly the not_hef status")

    @property
    def is_hef(self):
        """True or False, or None when the search hit a resource limit."""
        if self.status is HefStatus.RESOURCE_LIMIT:
            return None
        return self.status is HefStatus.HEF


class Witness(NamedTuple):
    elementary_set: AtomSet
    program: Program


def _masks_by_size(width, max_size):
    """Nonempty masks over `width` bits with at least two bits, by size then value."""
    for size in range(2, min(width, max_size) + 1):
        mask = (1 << size) - 1
        while mask < 1 << width:
            yield mask
            # next mask with the same popcount
            low = mask & -mask
            ripple = mask + low
            mask = ripple | (((ripple ^ mask) >> 2) // low)


def _size_bound(width, max_subset, max_candidates):
    """Largest size whose masks of sizes 2.. fit in `max_candidates`, at most `max_subset`."""
    if width <= max_subset:
        return width
    total = 0
    for size in range(2, max_subset + 1):
        total += comb(width, size)
        if total > max_candidates:
            return size - 1
    return max_subset


def _candidates(program, graph, pool, limits, stats):
    """
    Candidate sets inside `pool` that are disjunctive sets and pass pruning,
    in canonical order, paired with their first violating rule.
    """
    heads = [
        (i, rule.head.mask & pool.mask)
        for i, rule in enumerate(program.rules)
        if (rule.head.mask & pool.mask).bit_count() > 1
    ]
    if not heads:
        return
    stats.pools += 1
    positions = list(pool)
    bound = _size_bound(len(positions), limits.max_subset, limits.max_candidates)
    for n, local in enumerate(_masks_by_size(len(positions), bound)):
        if n % 1024 == 0:
            check_deadline(limits.deadline_at)
        y = 0
        for j, p in enumerate(positions):
            if (local >> j) & 1:
                y |= 1 << p
        rule = next((i for i, head in heads if (head & y).bit_count() > 1), None)
        if rule is None:
            continue
        stats.candidates += 1
        candidate = AtomSet(y)
        if limits.pruning:
            if not induced_strongly_connected(graph, candidate):
                stats.pruned_connectivity += 1
                continue
            if not has_support(candidate, program):
                stats.pruned_support += 1
                continue
        yield candidate, rule


class _Search:
    def __init__(self, program, limits, executor):
        self.program = program
        self.limits = limits
        self.executor = executor

    def decide(self, candidate):
        verdict = is_elementary_bruteforce(
            candidate,
            self.program,
            max_subset=self.limits.max_subset,
            threads=1,
            deadline=self.limits.deadline_at,
        )
        return bool(verdict)

    def first_elementary(self, batch, stats):
        stats.elementary_checks += len(batch)
        sets = [candidate for candidate, _ in batch]
        if self.executor is None:
            results = [self.decide(y) for y in sets]
        else:
            results = list(self.executor.map(self.decide, sets))
        for (candidate, rule), elementary in zip(batch, results):
            if elementary:
                return candidate, rule
        return None

    def run(self, pools, graph, stats):
        for pool in pools:
            batch = []
            for item in _candidates(self.program, graph, pool, self.limits, stats):
                batch.append(item)
                if len(batch) == BATCH_SIZE:
                    found = self.first_elementary(batch, stats)
                    if found:
                        return found
                    batch = []
            if batch:
                found = self.first_elementary(batch, stats)
                if found:
                    return found
        return None


@dataclass(frozen=True)
class _RunLimits:
    max_subset: int
    max_candidates: int
    pruning: bool
    deadline_at: float | None


def is_hef(program, limits=None):
    """
    Decide whether `program` is head-elementary-set-free.

    The search looks for a set that is both disjunctive and elementary.
    Head-cycle-free programs are accepted at once. Otherwise candidates are
    drawn from one SCC at a time (every elementary set induces a strongly
    connected subgraph), in ascending cardinality then bitmask order, pruned
    by induced strong connectivity and the per-atom rule conditions, and
    decided by the brute-force oracle. The first success is turned into a
    certificate by witness extraction.

    Parameters
    ----------
    program : Program
    limits : Limits, optional
        Caps, time budget, worker count and the pruning switch. Defaults to
        `Limits.from_config()`. Without pruning every subset of the atoms is
        a candidate.

    Returns
    -------
    HefVerdict
        `resource_limit` whenever a cap or the time budget stops the search
        before an answer is certain.
    """
    limits = Limits.from_config() if limits is None else limits
    stats = SearchStats()
    try:
        check_capacity(program, limits.max_atoms)
    except CapExceededError as e:
        return HefVerdict(HefStatus.RESOURCE_LIMIT, stats=stats, reason=str(e))
    if not program.is_disjunctive:
        return HefVerdict(HefStatus.HEF, stats=stats)

    graph = build_dep_graph(program)
    if limits.pruning:
        if is_hcf(program, graph):
            logger.debug("program is head-cycle-free")
            return HefVerdict(HefStatus.HEF, stats=stats)
        pools = list(graph.components)
    else:
        pools = [program.all_atoms]
    capped = [p for p in pools if len(p) > limits.max_subset]

    run_limits = _RunLimits(
        limits.max_subset, limits.max_candidates, limits.pruning, limits.deadline()
    )
    pool_context = (
        ThreadPoolExecutor(max_workers=limits.threads)
        if limits.threads > 1
        else nullcontext()
    )
    try:
        with pool_context as executor:
            found = _Search(program, run_limits, executor).run(pools, graph, stats)
            if found is None:
                if capped:
                    width = max(map(len, capped))
                    bound = _size_bound(width, limits.max_subset, limits.max_candidates)
                    reason = (
                        f"a candidate pool of {width} atoms exceeds "
                        f"the brute-force cap of {limits.max_subset}; "
                        f"sets of up to {bound} atoms were searched"
                    )
                    logger.warning("search incomplete: %s", reason)
                    return HefVerdict(
                        HefStatus.RESOURCE_LIMIT, stats=stats, reason=reason
                    )
                return HefVerdict(HefStatus.HEF, stats=stats)
            candidate, rule = found
            logger.debug(
                "elementary set %s meets the head of rule %d twice",
                program.names(candidate),
                rule,
            )
            certificate = _certify(program, candidate, run_limits)
    except DeadlineExceeded:
        logger.warning("time budget of %ss exhausted", limits.time_budget)
        return HefVerdict(
            HefStatus.RESOURCE_LIMIT,
            stats=stats,
            reason=f"time budget of {limits.time_budget}s exhausted",
        )
    logger.debug("search statistics: %s", stats.to_dict())
    return HefVerdict(
        HefStatus.NOT_HEF,
        certificate=certificate,
        elementary_set=candidate,
        stats=stats,
    )


def _certify(program, candidate, run_limits):
    s, witness = extract_witness(
        candidate,
        program,
        max_subset=run_limits.max_subset,
        deadline=run_limits.deadline_at,
    )
    return HefCertificate(s, witness, first_disjunctive_rule(s, program))


def _count_disjunctive(rules):
    return sum(rule.is_disjunctive for rule in rules)


def extract_witness(e, program, *, max_subset=None, deadline=None):
    """
    Shrink an elementary disjunctive set until it has a nondisjunctive witness.

    Starting from `S = e` and `W = P_e`, repeatedly pick the first disjunctive
    rule δ of W. If S stays elementary without δ, drop δ. Otherwise let S′ be
    the minimal subset of S that is not outbound without δ; S′ contains the
    head of δ, so it is again a disjunctive set, and W becomes the projection
    on S′ of W's rules. Each step removes at least one disjunctive rule.

    Parameters
    ----------
    e : AtomSet
        Elementary and disjunctive set for `program`.
    program : Program
    max_subset : int, optional
        Brute-force cap, see `is_elementary_bruteforce`.
    deadline : float, optional

    Returns
    -------
    Witness
        The final set S* and its nondisjunctive witness, over an atom table
        restricted to S*.

    Raises
    ------
    NotDisjunctiveError, NotElementaryError
        If `e` does not meet the preconditions.
    """
    if not is_disjunctive_set(e, program):
        raise NotDisjunctiveError(f"{program.names(e)} is not a disjunctive set")
    check = dict(max_subset=max_subset, threads=1, deadline=deadline)
    if not is_elementary_bruteforce(e, program, **check):
        raise NotElementaryError(f"{program.names(e)} is not elementary")

    s = e
    rules = project_rules(program.rules, e)
    while True:
        star = next((i for i, rule in enumerate(rules) if rule.is_disjunctive), None)
        if star is None:
            break
        before = _count_disjunctive(rules)
        rest = rules[:star] + rules[star + 1 :]
        verdict = is_elementary_bruteforce(s, program.with_rules(rest), **check)
        if verdict:
            rules = rest
        else:
            s = verdict.failing
            rules = project_rules(rules, s)
            logger.debug("witness extraction narrowed to %s", program.names(s))
        if _count_disjunctive(rules) >= before:
            raise RuntimeError("witness extraction did not remove a disjunctive rule")

    return Witness(s, program.with_rules(rules).restricted(s))


def verify_certificate(program, certificate, *, max_subset=None):
    """
    Check a non-HEF certificate against `program` in polynomial time.

    The violating rule's head must meet the set in two or more atoms, the
    witness must be nondisjunctive, and it must be a witness of the set.

    Returns
    -------
    WitnessCheck
        Truthy when the certificate is valid, otherwise carrying the reason.
    """
    e = certificate.elementary_set
    index = certificate.violating_rule
    if not 0 <= index < len(program):
        return WitnessCheck(False, f"rule index {index} is out of range")
    if (program[index].head.mask & e.mask).bit_count() < 2:
        return WitnessCheck(
            False, f"the head of rule {index} meets the set in fewer than two atoms"
        )
    if certificate.witness.is_disjunctive:
        return WitnessCheck(False, "the witness has a disjunctive rule")
    return verify_witness(e, certificate.witness, program, max_subset=max_subset)
