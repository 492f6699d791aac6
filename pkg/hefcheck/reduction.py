import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .elementary import is_elementary_bruteforce
from .errors import CapExceededError
from .hef import HefStatus, is_hef, verify_certificate
from .program import AtomSet, intern_program
from .settings import Limits, config

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 14


@dataclass(frozen=True)
class ReductionAtoms:
    """
    Atom ids of the program built from a 3-CNF formula.

    Attributes
    ----------
    phi : int
    c : tuple of int
        c_0 .. c_{n+1}.
    a, na : tuple of int
        `a[j - 1]` and `na[j - 1]` stand for variable A_j and its negation.
    clauses : tuple of tuple of int
        The formula's clauses, used to derive the clause atom sets.
    """

    phi: int
    c: tuple
    a: tuple
    na: tuple
    clauses: tuple

    def literal_atom(self, lit):
        return self.a[lit - 1] if lit > 0 else self.na[-lit - 1]

    def opposite(self, atom_id):
        """The atom of the other polarity of the same variable."""
        if atom_id in self.a:
            return self.na[self.a.index(atom_id)]
        if atom_id in self.na:
            return self.a[self.na.index(atom_id)]
        raise ValueError(f"atom {atom_id} is not a variable atom")

    def clause_atoms(self, i):
        """V(c_i): the atoms of the literals of clause `i` (1-based)."""
        return tuple(self.literal_atom(lit) for lit in self.clauses[i - 1])

    def opposite_atoms(self, i):
        """NV(c_i): the opposites of the clause atoms, in literal order."""
        return tuple(self.literal_atom(-lit) for lit in self.clauses[i - 1])


@dataclass(frozen=True)
class Assignment:
    """Total truth assignment; `values[j - 1]` is the value of A_j."""

    values: tuple

    @classmethod
    def from_index(cls, index, num_vars):
        """Decode an enumeration index; A_1 is the most significant bit."""
        return cls(tuple(bool((index >> (num_vars - j)) & 1) for j in range(1, num_vars + 1)))

    def value(self, var):
        return self.values[var - 1]

    def satisfies(self, formula):
        return all(
            any(self.value(abs(lit)) == (lit > 0) for lit in clause)
            for clause in formula.clauses
        )

    def to_dict(self):
        return {f"A{j}": v for j, v in enumerate(self.values, start=1)}

    def __str__(self):
        return " ".join(f"A{j}={'T' if v else 'F'}" for j, v in enumerate(self.values, start=1))


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    model: Assignment | None = None

    def __bool__(self):
        return self.satisfiable


def build_reduction(formula):
    """
    Build the disjunctive program whose non-HEF-ness encodes the
    satisfiability of `formula`.

    Rules are emitted family by family:

    1. ``c0 | c{n+1} :- phi.``
    2. ``c1 :- c0.``
    3. ``c{i+1} :- ci, x.`` for each clause i and each x in NV(c_i)
    4. ``a1 :- c{n+1}, na1.``
    5. ``na1 :- c{n+1}, a1.``
    6. ``a{i+1} :- ai, na{i+1}.`` for 1 <= i < m
    7. ``na{i+1} :- ai, a{i+1}.``
    8. ``a{i+1} :- nai, na{i+1}.``
    9. ``na{i+1} :- nai, a{i+1}.``
    10. ``c0 :- am, nam.``

    Parameters
    ----------
    formula : Cnf3

    Returns
    -------
    program : Program
        3n + 4m + 1 rules over 2m + n + 3 atoms.
    atoms : ReductionAtoms
    """
    m, n = formula.num_vars, formula.num_clauses
    c = [f"c{i}" for i in range(n + 2)]
    a = [f"a{j}" for j in range(1, m + 1)]
    na = [f"na{j}" for j in range(1, m + 1)]

    def name(lit):
        return a[lit - 1] if lit > 0 else na[-lit - 1]

    rules = [([c[0], c[n + 1]], ["phi"], []), ([c[1]], [c[0]], [])]
    for i, clause in enumerate(formula.clauses, start=1):
        rules += [([c[i + 1]], [c[i], name(-lit)], []) for lit in clause]
    rules += [([a[0]], [c[n + 1], na[0]], []), ([na[0]], [c[n + 1], a[0]], [])]
    for i in range(m - 1):
        rules.append(([a[i + 1]], [a[i], na[i + 1]], []))
    for i in range(m - 1):
        rules.append(([na[i + 1]], [a[i], a[i + 1]], []))
    for i in range(m - 1):
        rules.append(([a[i + 1]], [na[i], na[i + 1]], []))
    for i in range(m - 1):
        rules.append(([na[i + 1]], [na[i], a[i + 1]], []))
    rules.append(([c[0]], [a[m - 1], na[m - 1]], []))

    program = intern_program(rules)
    atoms = ReductionAtoms(
        phi=program.atom_id("phi"),
        c=tuple(program.atom_id(x) for x in c),
        a=tuple(program.atom_id(x) for x in a),
        na=tuple(program.atom_id(x) for x in na),
        clauses=formula.clauses,
    )
    logger.debug(
        "reduction of %d clauses over %d variables: %d rules, %d atoms",
        n,
        m,
        len(program),
        program.num_atoms,
    )
    return program, atoms


def sat_bruteforce(formula, *, max_vars=None):
    """
    Decide satisfiability by enumerating every assignment.

    Assignments are visited lexicographically with A_1 most significant and
    false before true, so the reported model is the first in that order.

    Raises
    ------
    CapExceededError
        If the formula has more variables than `max_vars`
        (default `config["max_sat_vars"]`).
    """
    max_vars = config["max_sat_vars"] if max_vars is None else max_vars
    m = formula.num_vars
    if m > max_vars:
        raise CapExceededError("formula variable count", m, max_vars)

    total = 1 << m
    for lo in range(0, total, CHUNK_SIZE):
        x = np.arange(lo, min(lo + CHUNK_SIZE, total), dtype=np.int64)
        sat = np.ones(x.shape, dtype=bool)
        for clause in formula.clauses:
            clause_sat = np.zeros(x.shape, dtype=bool)
            for lit in clause:
                bit = ((x >> (m - abs(lit))) & 1).astype(bool)
                clause_sat |= bit if lit > 0 else ~bit
            sat &= clause_sat
        hits = np.flatnonzero(sat)
        if hits.size:
            return SatResult(True, Assignment.from_index(int(x[hits[0]]), m))
    return SatResult(False)


def assignment_set(assignment, atoms):
    """{c_0..c_{n+1}} together with a_j for true and na_j for false variables."""
    chosen = [
        a if value else na
        for a, na, value in zip(atoms.a, atoms.na, assignment.values)
    ]
    return AtomSet.of([*atoms.c, *chosen])


def clause_condition(atoms, assignment):
    """
    Whether every clause keeps some atom of NV(c_i) outside the candidate set
    of `assignment`, the condition deciding if that set is elementary.
    """
    e = assignment_set(assignment, atoms)
    return all(
        any(x not in e for x in atoms.opposite_atoms(i))
        for i in range(1, len(atoms.clauses) + 1)
    )


def refute_all_shapes(atoms):
    """
    Whether every candidate set {c_0..c_{n+1}} ∪ Q^X, over all 2^m
    assignments X, violates the clause condition; then no elementary set
    contains both c_0 and c_{n+1}.
    """
    m = len(atoms.a)
    return not any(
        clause_condition(atoms, Assignment(values))
        for values in product((False, True), repeat=m)
    )


def claims_hold(e, atoms):
    """
    Whether `e` has the shape every elementary set containing c_0 and
    c_{n+1} must have: all clause atoms and exactly one atom per variable.
    """
    if not all(x in e for x in atoms.c):
        return False
    return all((a in e) != (na in e) for a, na in zip(atoms.a, atoms.na))


@dataclass
class CrossValidationReport:
    """
    Agreement between satisfiability and the HEF verdict of the reduction.

    `equivalence` is "consistent" when the formula is satisfiable exactly when
    the program is not HEF and every side check passes, "inconsistent" when
    something disagrees, and "inconclusive" when a cap or budget stopped one
    of the two sides.
    """

    num_vars: int
    num_clauses: int
    satisfiable: bool | None = None
    model: Assignment | None = None
    hef_status: HefStatus | None = None
    equivalence: str = "inconclusive"
    assignment_set_elementary: bool | None = None
    certificate_valid: bool | None = None
    claims_hold: bool | None = None
    shapes_refuted: bool | None = None
    reason: str = ""
    problems: list = field(default_factory=list)

    def to_dict(self):
        return {
            "num_vars": self.num_vars,
            "num_clauses": self.num_clauses,
            "satisfiable": self.satisfiable,
            "model": None if self.model is None else self.model.to_dict(),
            "hef_status": None if self.hef_status is None else self.hef_status.value,
            "equivalence": self.equivalence,
            "assignment_set_elementary": self.assignment_set_elementary,
            "certificate_valid": self.certificate_valid,
            "claims_hold": self.claims_hold,
            "shapes_refuted": self.shapes_refuted,
            "reason": self.reason,
            "problems": list(self.problems),
        }


def cross_validate(formula, limits=None):
    """
    Check that `formula` is satisfiable exactly when its reduction is not HEF.

    For a satisfiable formula the candidate set of the first model must be
    elementary and the certificate of the HEF search must verify. The set the
    search found is checked against the clause-shape properties. When the
    search stops on a limit for an unsatisfiable formula, `shapes_refuted`
    records whether the clause condition rules out every candidate shape.

    Parameters
    ----------
    formula : Cnf3
    limits : Limits, optional

    Returns
    -------
    CrossValidationReport
    """
    limits = Limits.from_config() if limits is None else limits
    report = CrossValidationReport(formula.num_vars, formula.num_clauses)
    try:
        sat = sat_bruteforce(formula, max_vars=limits.max_sat_vars)
    except CapExceededError as e:
        report.reason = str(e)
        return report
    report.satisfiable = sat.satisfiable
    report.model = sat.model

    program, atoms = build_reduction(formula)
    verdict = is_hef(program, limits)
    report.hef_status = verdict.status

    if sat:
        try:
            report.assignment_set_elementary = bool(
                is_elementary_bruteforce(
                    assignment_set(sat.model, atoms),
                    program,
                    max_subset=limits.max_subset,
                    threads=limits.threads,
                )
            )
        except CapExceededError as e:
            logger.warning("assignment set not checked: %s", e)
        if report.assignment_set_elementary is False:
            report.problems.append("the set of the first model is not elementary")

    if verdict.status is HefStatus.RESOURCE_LIMIT:
        report.reason = verdict.reason
        if not sat:
            report.shapes_refuted = refute_all_shapes(atoms)
        if report.problems:
            report.equivalence = "inconsistent"
        return report

    if verdict.status is HefStatus.NOT_HEF:
        report.certificate_valid = bool(
            verify_certificate(program, verdict.certificate, max_subset=limits.max_subset)
        )
        report.claims_hold = claims_hold(verdict.elementary_set, atoms)
        if not report.certificate_valid:
            report.problems.append("the certificate does not verify")
        if not report.claims_hold:
            report.problems.append("the elementary set found has an unexpected shape")

    if sat.satisfiable != (verdict.status is HefStatus.NOT_HEF):
        report.problems.append(
            f"satisfiable={sat.satisfiable} but the reduction is {verdict.status.value}"
        )
    report.equivalence = "inconsistent" if report.problems else "consistent"
    if report.problems:
        logger.warning("cross-validation failed: %s", "; ".join(report.problems))
    return report
