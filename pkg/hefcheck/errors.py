class HefcheckError(Exception):
    """Base class for every error raised by hefcheck."""


class ParseError(HefcheckError, ValueError):
    """
    Malformed program or DIMACS text.

    Parameters
    ----------
    span : SourceSpan
        Position of the offending token.
    message : str
        What was expected or found.
    """

    def __init__(self, span, message):
        self.span = span
        self.message = message
        super().__init__(f"{span}: {message}")


class EmptyHeadError(HefcheckError, ValueError):
    def __init__(self, rule_index, span=None):
        self.rule_index = rule_index
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(f"{where}rule {rule_index} has an empty head")


class BadAtomNameError(HefcheckError, ValueError):
    def __init__(self, token, span=None):
        self.token = token
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(
            f"{where}invalid atom name {token!r}, expected [a-z][A-Za-z0-9_]*"
        )


class UnknownAtomError(HefcheckError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"atom {name!r} does not occur in the program")


class NotThreeCnfError(HefcheckError, ValueError):
    def __init__(
        self, clause_index, reason="clause does not have exactly 3 literals", span=None
    ):
        self.clause_index = clause_index
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(f"{where}clause {clause_index}: {reason}")


class BadSubsetError(HefcheckError, ValueError):
    pass


class DisjunctiveInputError(HefcheckError, ValueError):
    pass


class NotElementaryError(HefcheckError, ValueError):
    pass


class NotDisjunctiveError(HefcheckError, ValueError):
    pass


class CapExceededError(HefcheckError):
    """A configured size cap was exceeded; the answer is unknown, not negative."""

    def __init__(self, what, size, cap):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what} has size {size}, above the cap of {cap}")


class DeadlineExceeded(HefcheckError):
    """The cooperative time budget ran out."""


class CertificateFormatError(HefcheckError, ValueError):
    """Certificate JSON that does not follow the versioned schema."""
