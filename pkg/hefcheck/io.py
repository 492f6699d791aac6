import bisect
import hashlib
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from .errors import (
    BadAtomNameError,
    CertificateFormatError,
    EmptyHeadError,
    NotThreeCnfError,
    ParseError,
)
from .hef import HefCertificate
from .program import ATOM_NAME, intern_program

logger = logging.getLogger(__name__)

CERTIFICATE_VERSION = 1

# NAME takes any identifier; _RuleBuilder.atom rejects the ones that are not atom names
PROGRAM_GRAMMAR = r"""
    start: rule*
    rule: head (_IF body)? _DOT
    head: atom (_OR atom)*
    body: lit (_COMMA lit)*
    ?lit: atom
        | _NOT atom -> neg
    atom: NAME

    _IF: ":-"
    _OR: "|" | ";"
    _COMMA: ","
    _DOT: "."
    _NOT: "not"
    NAME: /[A-Za-z0-9_]+/
    COMMENT: /%[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


@dataclass(frozen=True)
class SourceSpan:
    """1-based line and column plus the 0-based offset of a position in the source."""

    line: int
    column: int
    offset: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class _Locator:
    def __init__(self, text):
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, offset):
        line = bisect.bisect_right(self.starts, offset)
        return SourceSpan(line, offset - self.starts[line - 1] + 1, offset)


def _token_span(token):
    return SourceSpan(token.line, token.column, token.start_pos)


class _RuleBuilder(Transformer):
    """Turns the parse tree into `(heads, pos, neg)` name triples."""

    def atom(self, children):
        (token,) = children
        if ATOM_NAME.fullmatch(token) is None:
            raise BadAtomNameError(str(token), _token_span(token))
        return str(token)

    def neg(self, children):
        return ("not", children[0])

    def head(self, children):
        return list(children)

    def body(self, children):
        pos = [lit for lit in children if isinstance(lit, str)]
        neg = [lit[1] for lit in children if not isinstance(lit, str)]
        return pos, neg

    def rule(self, children):
        heads = children[0]
        pos, neg = children[1] if len(children) > 1 else ([], [])
        return heads, pos, neg

    def start(self, children):
        return list(children)


_program_parser = Lark(PROGRAM_GRAMMAR, parser="lalr", lexer="basic")

_WHAT = {
    "_NOT": "an atom after 'not'",
    "_IF": "a body literal",
    "_COMMA": "a body literal",
}


def _tokens_before(text, offset):
    tokens = []
    try:
        for token in _program_parser.lex(text):
            if token.start_pos >= offset:
                break
            tokens.append(token)
    except UnexpectedInput:
        pass
    return tokens


def _syntax_error(text, e):
    """Map a lark error onto ParseError or EmptyHeadError with a SourceSpan."""
    if isinstance(e, UnexpectedCharacters):
        span = SourceSpan(e.line, e.column, e.pos_in_stream)
        return ParseError(span, f"unexpected character {text[e.pos_in_stream]!r}")
    if not isinstance(e, UnexpectedToken):
        return ParseError(_Locator(text).span(len(text)), str(e).strip())

    token = e.token
    if token.type == "$END":
        span, found = _Locator(text).span(len(text)), "end of input"
    else:
        span, found = SourceSpan(e.line, e.column, e.pos_in_stream), repr(str(token))
    before = _tokens_before(text, span.offset)
    previous = before[-1].type if before else None
    what = _WHAT.get(previous, "a head atom")

    if token.type == "_NOT" and "NAME" in e.expected:
        return ParseError(span, f"'not' is reserved and cannot be {what}")
    if "$END" in e.expected and token.type in ("_IF", "_DOT"):
        return EmptyHeadError(sum(t.type == "_DOT" for t in before), span)
    if "_DOT" in e.expected:
        return ParseError(span, f"expected '.', found {found}")
    return ParseError(span, f"expected {what}, found {found}")


def parse_program(text):
    """
    Parse the program surface syntax.

    The grammar is `rule := head (":-" body)? "."` with `head := atom ("|" atom)*`
    and `body := lit ("," lit)*`, where `lit := atom | "not" atom`. `;` is accepted
    for `|` and `%` starts a line comment.

    Parameters
    ----------
    text : str
        Program source.

    Returns
    -------
    Program

    Raises
    ------
    ParseError
        On malformed input, with the offending SourceSpan.
    EmptyHeadError
        On a rule without head atoms.
    BadAtomNameError
        On identifiers that are not atom names.
    """
    try:
        tree = _program_parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None
    try:
        rules = _RuleBuilder().transform(tree)
    except VisitError as e:
        raise e.orig_exc from None
    return intern_program(rules)


def render_rule(rule, atoms):
    head = " | ".join(atoms[i] for i in rule.head)
    body = [atoms[i] for i in rule.pos] + [f"not {atoms[i]}" for i in rule.neg]
    if body:
        return f"{head} :- {', '.join(body)}."
    return f"{head}."


def render_program(program):
    """
    Canonical text of `program`: one rule per line, atoms in ascending id order
    inside heads and bodies, positive body before negative body.
    """
    return "\n".join(render_rule(rule, program.atoms) for rule in program.rules)


def load_program(file_path):
    """Read and parse a UTF-8 program file (`.lp`)."""
    return parse_program(Path(file_path).read_text(encoding="utf-8"))


def save_program(program, file_path):
    Path(file_path).write_text(render_program(program) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Cnf3:
    """
    A 3-CNF formula.

    Attributes
    ----------
    num_vars : int
        m, the variables are 1..m.
    clauses : tuple of tuple of int
        Each clause holds exactly three distinct nonzero literals; `-j` is the
        negation of variable `j`.
    """

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("a formula needs at least one variable")
        if not self.clauses:
            raise ValueError("a formula needs at least one clause")
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise NotThreeCnfError(i)
            if len(set(clause)) != 3:
                raise NotThreeCnfError(i, "clause repeats a literal")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise NotThreeCnfError(
                        i, f"literal {lit} outside 1..{self.num_vars}"
                    )

    @property
    def num_clauses(self):
        return len(self.clauses)

    def is_tautological(self, i):
        clause = self.clauses[i]
        return any(-lit in clause for lit in clause)


_HEADER = re.compile(r"p\s+cnf\s+(\d+)\s+(\d+)\s*")


def parse_dimacs(text):
    """
    Parse DIMACS CNF text into a Cnf3.

    Comment lines start with `c`; a line starting with `%` ends the clause
    section (SATLIB convention). Clauses may span lines and end with `0`.

    Raises
    ------
    ParseError
        Missing or malformed header, bad literal, unterminated clause, or a
        clause count that disagrees with the header.
    NotThreeCnfError
        A clause that does not have exactly three distinct literals.
    """
    locate = _Locator(text)
    header = None
    header_span = None
    clauses, current = [], []
    offset = 0
    for line in text.splitlines(keepends=True):
        line_offset = offset
        offset += len(line)
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if header is None:
            match = _HEADER.fullmatch(stripped)
            if match is None:
                raise ParseError(
                    locate.span(line_offset), "expected header 'p cnf <vars> <clauses>'"
                )
            header = int(match.group(1)), int(match.group(2))
            header_span = locate.span(line_offset)
            continue
        for token in re.finditer(r"\S+", line):
            span = locate.span(line_offset + token.start())
            try:
                lit = int(token.group())
            except ValueError:
                raise ParseError(span, f"expected a literal, found {token.group()!r}")
            if lit == 0:
                index = len(clauses)
                if len(current) != 3:
                    raise NotThreeCnfError(index, span=span)
                if len(set(current)) != 3:
                    raise NotThreeCnfError(index, "clause repeats a literal", span)
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(span, f"literal {lit} exceeds {header[0]} variables")
            else:
                current.append(lit)
    if header is None:
        raise ParseError(locate.span(len(text)), "missing 'p cnf' header")
    if current:
        raise ParseError(locate.span(len(text)), "last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(
            header_span,
            f"header announces {header[1]} clauses, found {len(clauses)}",
        )
    if not clauses:
        raise ParseError(header_span, "a formula needs at least one clause")

    formula = Cnf3(header[0], tuple(clauses))
    for i in range(formula.num_clauses):
        if formula.is_tautological(i):
            logger.warning("clause %d is tautological: %s", i, formula.clauses[i])
    return formula


def render_dimacs(formula):
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines += [" ".join(map(str, clause)) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


def load_cnf(file_path):
    """Read and parse a DIMACS file (`.cnf`)."""
    return parse_dimacs(Path(file_path).read_text(encoding="utf-8"))


def program_sha256(program):
    """SHA-256 of the canonical rendering, so layout and comments do not matter."""
    return hashlib.sha256(render_program(program).encode("utf-8")).hexdigest()


def certificate_to_dict(program, certificate):
    witness = certificate.witness
    return {
        "version": CERTIFICATE_VERSION,
        "program_sha256": program_sha256(program),
        "status": "not_hef",
        "elementary_set": sorted(program.names(certificate.elementary_set)),
        "witness": [render_rule(rule, witness.atoms) for rule in witness.rules],
        "violating_rule": certificate.violating_rule,
    }


def certificate_to_json(program, certificate):
    """Serialize a certificate for `program` to the versioned JSON schema."""
    return json.dumps(certificate_to_dict(program, certificate), indent=2)


def certificate_from_json(text, program):
    """
    Read a certificate for `program`.

    Returns
    -------
    certificate : HefCertificate
    digest : str
        The `program_sha256` recorded in the document; compare it with
        `program_sha256(program)` to detect certificates for another program.

    Raises
    ------
    CertificateFormatError
        Invalid JSON or a document that does not follow the schema.
    UnknownAtomError
        The elementary set names an atom missing from `program`.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateFormatError(f"certificate is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise CertificateFormatError("certificate must be a JSON object")
    if data.get("version") != CERTIFICATE_VERSION:
        raise CertificateFormatError(
            f"unsupported certificate version {data.get('version')!r}"
        )
    if data.get("status") != "not_hef":
        raise CertificateFormatError("certificate status must be 'not_hef'")
    names = data.get("elementary_set")
    witness = data.get("witness")
    violating = data.get("violating_rule")
    digest = data.get("program_sha256")
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise CertificateFormatError("elementary_set must be a list of atom names")
    if not isinstance(witness, list) or not all(isinstance(r, str) for r in witness):
        raise CertificateFormatError("witness must be a list of rules")
    if isinstance(violating, bool) or not isinstance(violating, int):
        raise CertificateFormatError("violating_rule must be an integer")
    if not isinstance(digest, str):
        raise CertificateFormatError("program_sha256 must be a string")
    try:
        witness_program = parse_program("\n".join(witness))
    except ValueError as e:
        raise CertificateFormatError(f"witness does not parse: {e}") from e

    certificate = HefCertificate(
        elementary_set=program.atom_set(names),
        witness=witness_program,
        violating_rule=violating,
    )
    return certificate, digest
