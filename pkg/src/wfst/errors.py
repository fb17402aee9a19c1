"""Exception hierarchy for the wfst package."""


class WfstError(Exception):
    """Base class for all domain errors raised by this package."""


class SemiringMismatch(WfstError):
    """Operands carry different weight semirings."""


class AlphabetMismatch(WfstError):
    """Operand symbol tables do not agree where they must."""


class EpsilonPresent(WfstError):
    """An epsilon label appears on a side that must be epsilon-free."""


class UnboundedCollection(WfstError):
    """A weight sum over infinitely many paths is not defined in this semiring."""


class NoAcceptingPath(WfstError):
    """The automaton accepts nothing (within the requested search)."""


class UnsupportedSemiring(WfstError):
    """The operation needs a semiring property (e.g. a total order) this one lacks."""


class UnknownSymbol(WfstError):
    """A symbol is not present in the relevant symbol table."""


class DuplicateWord(WfstError):
    """Two word models were supplied for the same word."""


class EmptyVocabulary(WfstError):
    """A language model cannot be built over an empty vocabulary."""


class ParseError(WfstError):
    """Malformed text-format input.

    Carries the 1-based line number when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
