import logging

import numpy as np

from .errors import CapExceededError
from .program import AtomSet, Rule, check_deadline, iter_bits
from .settings import config

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 14


def reduct(program, interp):
    """
    The reduct P^I: rules with a negated atom true in `interp` are removed and
    the negative bodies of the remaining rules are dropped.
    """
    return program.with_rules(
        Rule(rule.head, rule.pos)
        for rule in program.rules
        if rule.neg.isdisjoint(interp)
    )


def is_model(program, interp):
    """
    Whether every rule is true in `interp`: some head atom is true, or the
    body (positive atoms true, negated atoms false) is not.
    """
    for rule in program.rules:
        applies = rule.pos <= interp and rule.neg.isdisjoint(interp)
        if applies and rule.head.isdisjoint(interp):
            return False
    return True


def _violations(z, rules):
    """Boolean mask of the interpretations in `z` that falsify some rule."""
    violated = np.zeros(z.shape, dtype=bool)
    for head, pos, neg in rules:
        violated |= ((z & pos) == pos) & ((z & neg) == 0) & ((z & head) == 0)
    return violated


def _compress(mask, positions):
    return sum(1 << j for j, p in enumerate(positions) if (mask >> p) & 1)


def is_minimal_model(program, interp):
    """
    Whether `interp` is a model of `program` and no proper subset of it is.

    Subsets are checked exhaustively over the atoms of `interp`; a rule whose
    positive body leaves `interp` can never fire inside it and is skipped.
    """
    if not is_model(program, interp):
        return False
    if not interp:
        return True
    positions = list(interp)
    rules = [
        (
            _compress(rule.head.mask, positions),
            _compress(rule.pos.mask, positions),
            _compress(rule.neg.mask, positions),
        )
        for rule in program.rules
        if rule.pos <= interp
    ]
    full = (1 << len(positions)) - 1
    for lo in range(0, full, CHUNK_SIZE):
        z = np.arange(lo, min(lo + CHUNK_SIZE, full), dtype=np.int64)
        if not _violations(z, rules).all():
            return False
    return True


def stable_models(program, *, max_atoms=None, deadline=None):
    """
    Enumerate the stable models of `program`.

    An interpretation I is stable when it is a minimal model of the reduct
    P^I. Since I models P^I exactly when it models P, the candidates are the
    models of P, found with a vectorised scan over all interpretations.

    Parameters
    ----------
    program : Program
    max_atoms : int, optional
        Cap on the atom count. Defaults to `config["max_stable_atoms"]`.
    deadline : float, optional
        Monotonic deadline polled between chunks.

    Returns
    -------
    list of AtomSet
        In ascending bitmask order. The empty program has the single stable
        model ∅.

    Raises
    ------
    CapExceededError
        If the program has more atoms than the cap.
    """
    max_atoms = config["max_stable_atoms"] if max_atoms is None else max_atoms
    n = program.num_atoms
    if n > max_atoms:
        raise CapExceededError("program atom table", n, max_atoms)

    rules = [(r.head.mask, r.pos.mask, r.neg.mask) for r in program.rules]
    found = []
    total = 1 << n
    for lo in range(0, total, CHUNK_SIZE):
        check_deadline(deadline)
        z = np.arange(lo, min(lo + CHUNK_SIZE, total), dtype=np.int64)
        for mask in z[~_violations(z, rules)]:
            interp = AtomSet(int(mask))
            if is_minimal_model(reduct(program, interp), interp):
                found.append(interp)
    logger.debug("%d stable models over %d atoms", len(found), n)
    return found


def shift(program):
    """
    Replace every disjunctive rule `h1 | ... | hk :- B, not F` by the k rules
    `hi :- B, not F, not hj (j != i)`, one per head atom in ascending id order.
    Nondisjunctive rules are kept as they are.
    """
    rules = []
    for rule in program.rules:
        if not rule.is_disjunctive:
            rules.append(rule)
            continue
        for h in iter_bits(rule.head.mask):
            single = AtomSet(1 << h)
            rules.append(Rule(single, rule.pos, rule.neg | (rule.head - single)))
    return program.with_rules(rules)


def shift_preserves_models(program, *, max_atoms=None, deadline=None):
    """Whether `program` and its shifted version have the same stable models."""
    kwargs = dict(max_atoms=max_atoms, deadline=deadline)
    return stable_models(program, **kwargs) == stable_models(shift(program), **kwargs)
