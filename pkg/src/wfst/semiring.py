"""Weight algebras.

Every automaton, rational operation and search in this package is generic
over a commutative semiring: a weight set with a *collection* operation
(combining alternative paths), an *extension* operation (combining the
transitions along one path), their identities ``zero`` and ``one``, and
optionally a total order used for optimization.  Weights themselves are
plain Python values (floats, or bools for the boolean algebra), so all
operations are pure functions and instances are safe to share across
threads.
"""

import math

from .errors import UnsupportedSemiring

__all__ = [
    "Semiring",
    "PROBABILITY",
    "TROPICAL",
    "BOOLEAN",
    "probability_semiring",
    "tropical_semiring",
    "boolean_semiring",
    "by_name",
]


class Semiring:
    """A commutative semiring over plain weight values.

    Subclasses fix the carrier set and define:

    * ``collect(a, b)``: associative, commutative, with identity ``zero``;
    * ``extend(a, b)``: associative, commutative, with identity ``one``,
      distributing over ``collect`` and annihilated by ``zero``;
    * ``better(a, b)``: strict total order ("a is strictly better than b"),
      monotonic under both operations, when ``ordered`` is true.

    ``idempotent`` means ``collect(a, a) == a``; only idempotent (more
    generally, closed) semirings support collection over infinite path
    sets, so non-idempotent collection is used in this package only where
    the operand set is finite.
    """

    name = "abstract"
    zero = None
    one = None
    idempotent = False
    closed = False
    ordered = False
    # Only min-sum weights drive the shortest-path machinery in `search`.
    supports_shortest_path = False

    def collect(self, a, b):
        raise NotImplementedError

    def extend(self, a, b):
        raise NotImplementedError

    def better(self, a, b):
        """True when `a` is strictly better than `b` under the total order."""
        raise UnsupportedSemiring(f"{self.name} semiring has no total order")

    def better_or_equal(self, a, b):
        return a == b or self.better(a, b)

    def is_zero(self, w):
        return w == self.zero

    def is_member(self, w):
        raise NotImplementedError

    def sum(self, weights):
        """Collect a finite iterable of weights."""
        total = self.zero
        for w in weights:
            total = self.collect(total, w)
        return total

    def close_to(self, a, b, tol):
        """Weight comparison with absolute tolerance (exact for infinities)."""
        if a == b:
            return True
        if isinstance(a, bool) or isinstance(b, bool):
            return a == b
        if math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= tol

    def parse_weight(self, text):
        raise NotImplementedError

    def format_weight(self, w):
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name} semiring>"


class ProbabilitySemiring(Semiring):
    """Nonnegative reals with (+, *): per-path weights multiply, alternatives add."""

    name = "probability"
    zero = 0.0
    one = 1.0
    idempotent = False
    closed = False
    ordered = True

    def collect(self, a, b):
        return a + b

    def extend(self, a, b):
        return a * b

    def better(self, a, b):
        return a > b

    def is_member(self, w):
        return isinstance(w, float) and w >= 0.0 and not math.isinf(w)

    def parse_weight(self, text):
        return float(text)

    def format_weight(self, w):
        return repr(float(w))


class TropicalSemiring(Semiring):
    """Nonnegative reals plus infinity with (min, +).

    Models negative log-probabilities under the single-best-path
    approximation: path weights add, alternatives take the minimum.
    """

    name = "tropical"
    zero = math.inf
    one = 0.0
    idempotent = True
    closed = True
    ordered = True
    supports_shortest_path = True

    def collect(self, a, b):
        return a if a <= b else b

    def extend(self, a, b):
        return a + b

    def better(self, a, b):
        return a < b

    def is_member(self, w):
        return isinstance(w, float) and w >= 0.0

    def parse_weight(self, text):
        return float(text)

    def format_weight(self, w):
        return "inf" if math.isinf(w) else repr(float(w))


class BooleanSemiring(Semiring):
    """{False, True} with (or, and): plain unweighted acceptance."""

    name = "boolean"
    zero = False
    one = True
    idempotent = True
    closed = True
    ordered = True

    def collect(self, a, b):
        return a or b

    def extend(self, a, b):
        return a and b

    def better(self, a, b):
        return a and not b

    def is_member(self, w):
        return isinstance(w, bool)

    def parse_weight(self, text):
        if text in ("1", "true", "True"):
            return True
        if text in ("0", "false", "False"):
            return False
        return float(text) != 0.0

    def format_weight(self, w):
        return "1" if w else "0"


PROBABILITY = ProbabilitySemiring()
TROPICAL = TropicalSemiring()
BOOLEAN = BooleanSemiring()

_BY_NAME = {sr.name: sr for sr in (PROBABILITY, TROPICAL, BOOLEAN)}


def probability_semiring() -> Semiring:
    """The sum-times algebra over nonnegative reals."""
    return PROBABILITY


def tropical_semiring() -> Semiring:
    """The min-sum algebra over nonnegative reals with infinity."""
    return TROPICAL


def boolean_semiring() -> Semiring:
    """The or-and algebra over {False, True}."""
    return BOOLEAN


def by_name(name: str) -> Semiring:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnsupportedSemiring(f"unknown semiring {name!r}") from None
