import re
import time
from dataclasses import dataclass, field
from functools import cached_property

from .errors import (
    BadAtomNameError,
    CapExceededError,
    DeadlineExceeded,
    EmptyHeadError,
    UnknownAtomError,
)

ATOM_NAME = re.compile(r"[a-z][A-Za-z0-9_]*")


def iter_bits(mask):
    """Yield the positions of the set bits of `mask` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded("time budget exhausted")


@dataclass(frozen=True)
class AtomSet:
    """
    Set of atom ids stored as a bitmask.

    Bit i is set when atom i is a member. Set algebra maps onto integer bit
    operations: `|` union, `&` intersection, `-` difference, `<=` subset.

    Parameters
    ----------
    mask : int
        Non-negative membership bitmask.
    """

    mask: int = 0

    @classmethod
    def of(cls, ids):
        mask = 0
        for i in ids:
            mask |= 1 << i
        return cls(mask)

    def __or__(self, other):
        return AtomSet(self.mask | other.mask)

    def __and__(self, other):
        return AtomSet(self.mask & other.mask)

    def __sub__(self, other):
        return AtomSet(self.mask & ~other.mask)

    def __le__(self, other):
        return self.mask & ~other.mask == 0

    def __lt__(self, other):
        return self <= other and self.mask != other.mask

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    def __len__(self):
        return self.mask.bit_count()

    def __bool__(self):
        return self.mask != 0

    def __iter__(self):
        return iter_bits(self.mask)

    def __contains__(self, atom_id):
        return (self.mask >> atom_id) & 1 == 1

    def isdisjoint(self, other):
        return self.mask & other.mask == 0

    def __repr__(self):
        return f"AtomSet({set(self) or '{}'})"


EMPTY = AtomSet()


@dataclass(frozen=True)
class Atom:
    id: int
    name: str


@dataclass(frozen=True)
class Rule:
    """
    A rule `B, not F -> H`.

    Attributes
    ----------
    head : AtomSet
        H, read as a disjunction. Never empty in a Program.
    pos : AtomSet
        B, the positive body.
    neg : AtomSet
        F, the atoms under negation in the body.
    """

    head: AtomSet
    pos: AtomSet = EMPTY
    neg: AtomSet = EMPTY

    @property
    def is_disjunctive(self):
        return len(self.head) > 1

    @property
    def is_fact(self):
        return not self.pos and not self.neg


@dataclass(frozen=True)
class Program:
    """
    Immutable propositional disjunctive program.

    Rules keep their textual order, which is the canonical iteration order of
    every analysis. Atom ids are dense: atom `i` is named `atoms[i]`.

    Parameters
    ----------
    rules : tuple of Rule
        Rules in source order. Duplicates are allowed.
    atoms : tuple of str
        The atom table, indexed by id.
    """

    rules: tuple = ()
    atoms: tuple = ()

    @cached_property
    def index(self):
        return {name: i for i, name in enumerate(self.atoms)}

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, i):
        return self.rules[i]

    @property
    def num_atoms(self):
        return len(self.atoms)

    @property
    def all_atoms(self):
        return AtomSet((1 << len(self.atoms)) - 1)

    @property
    def is_disjunctive(self):
        return any(rule.is_disjunctive for rule in self.rules)

    @property
    def is_positive(self):
        return all(not rule.neg for rule in self.rules)

    def atom(self, atom_id):
        return Atom(atom_id, self.atoms[atom_id])

    def atom_id(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise UnknownAtomError(name) from None

    def atom_set(self, names):
        """AtomSet of the given atom names; unknown names raise UnknownAtomError."""
        return AtomSet.of(self.atom_id(name) for name in names)

    def names(self, atoms):
        """Names of the members of `atoms`, in ascending id order."""
        return [self.atoms[i] for i in atoms]

    def with_rules(self, rules):
        return Program(tuple(rules), self.atoms)

    def without(self, rule_index):
        return self.with_rules(
            rule for i, rule in enumerate(self.rules) if i != rule_index
        )

    def restricted(self, x):
        """
        Re-express this program over the atoms of `x` only.

        Ids are renumbered densely in ascending order of the old ids, so the
        relative order of atoms is preserved. Every rule must lie within `x`.
        """
        kept = list(x)
        remap = {old: new for new, old in enumerate(kept)}

        def move(s):
            if s.mask & ~x.mask:
                raise ValueError("rule mentions atoms outside the restriction set")
            return AtomSet.of(remap[i] for i in s)

        rules = tuple(
            Rule(move(r.head), move(r.pos), move(r.neg)) for r in self.rules
        )
        return Program(rules, tuple(self.atoms[i] for i in kept))

    def rebase(self, target):
        """
        Re-express the rules of this program in the atom table of `target`.

        Atoms are matched by name. Raises UnknownAtomError if an atom of this
        program does not occur in `target`.
        """
        ids = [target.atom_id(name) for name in self.atoms]

        def move(s):
            return AtomSet.of(ids[i] for i in s)

        return target.with_rules(
            Rule(move(r.head), move(r.pos), move(r.neg)) for r in self.rules
        )


def intern_program(rules_raw):
    """
    Build a Program from rules given as atom names.

    Parameters
    ----------
    rules_raw : iterable of (heads, positives, negatives)
        Each entry lists the head atom names, the positive body atom names and
        the negated body atom names of one rule.

    Returns
    -------
    Program
        Atom ids follow first occurrence, scanning each rule's head, then its
        positive body, then its negative body. Rules keep the input order.

    Raises
    ------
    EmptyHeadError
        If a rule has no head atom.
    BadAtomNameError
        If a name does not match `[a-z][A-Za-z0-9_]*`.
    """
    table = {}

    def intern(names):
        mask = 0
        for name in names:
            if not isinstance(name, str) or ATOM_NAME.fullmatch(name) is None:
                raise BadAtomNameError(name)
            if name not in table:
                table[name] = len(table)
            mask |= 1 << table[name]
        return AtomSet(mask)

    rules = []
    for k, (heads, pos, neg) in enumerate(rules_raw):
        if not heads:
            raise EmptyHeadError(k)
        rules.append(Rule(intern(heads), intern(pos), intern(neg)))
    return Program(tuple(rules), tuple(table))


def is_disjunctive_set(s, program):
    """True iff some rule's head contains more than one atom of `s`."""
    return first_disjunctive_rule(s, program) is not None


def first_disjunctive_rule(s, program):
    """Index of the first rule whose head meets `s` in two or more atoms, or None."""
    for i, rule in enumerate(program.rules):
        if (rule.head.mask & s.mask).bit_count() > 1:
            return i
    return None


def project_rules(rules, x):
    """
    Positive projections of `rules` on `x`, in the program's own id space.

    A rule contributes `B∩x -> H∩x` when both parts are nonempty; negative
    bodies are dropped.
    """
    projected = []
    for rule in rules:
        head = rule.head.mask & x.mask
        pos = rule.pos.mask & x.mask
        if head and pos:
            projected.append(Rule(AtomSet(head), AtomSet(pos)))
    return projected


def project(program, x):
    """
    The projection P_X of `program` on the atom set `x`.

    Returns
    -------
    Program
        One rule `B∩X -> H∩X` per rule of `program` whose head and positive
        body both meet `x`, in source order, over an atom table restricted to
        `x`.
    """
    return Program(tuple(project_rules(program.rules, x)), program.atoms).restricted(x)


def check_capacity(program, max_atoms):
    """Refuse programs with more atoms than the configured cap."""
    if program.num_atoms > max_atoms:
        raise CapExceededError("program atom table", program.num_atoms, max_atoms)
