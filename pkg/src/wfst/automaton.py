"""Core weighted finite automaton data model.

An :class:`Automaton` is a set of densely numbered states, one initial
state, weighted labelled transitions, and a final-weight function (absent
weight means non-final).  Every transition label is a pair of symbol ids
(input, output); id 0 is always epsilon.  An acceptor is simply an
automaton whose labels all have input == output, so the one type covers
both weighted languages and weighted transductions.

Automata are built mutably (``add_state`` / ``add_arc`` / ``set_final``)
and then frozen; frozen automata are immutable and safe to share between
threads.
"""

from typing import Iterable, Iterator, NamedTuple

from .errors import UnboundedCollection, UnknownSymbol, WfstError
from .semiring import Semiring

EPSILON = 0
EPSILON_SYMBOL = "<eps>"


class SymbolTable:
    """Bijection between symbol strings and dense nonnegative integer ids.

    Id 0 is reserved for epsilon, printed ``<eps>``.
    """

    def __init__(self, epsilon: str = EPSILON_SYMBOL):
        self._symbols = [epsilon]
        self._ids = {epsilon: 0}

    @classmethod
    def from_symbols(cls, symbols: Iterable[str]) -> "SymbolTable":
        table = cls()
        for sym in symbols:
            table.add_symbol(sym)
        return table

    @classmethod
    def numeric(cls, size: int) -> "SymbolTable":
        """Table whose symbols are the decimal ids themselves (``"0"`` is epsilon)."""
        table = cls(epsilon="0")
        for i in range(1, size):
            table.add_symbol(str(i))
        return table

    def add_symbol(self, symbol: str) -> int:
        if symbol in self._ids:
            return self._ids[symbol]
        idx = len(self._symbols)
        self._symbols.append(symbol)
        self._ids[symbol] = idx
        return idx

    def lookup(self, symbol: str) -> int:
        try:
            return self._ids[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} not in table") from None

    def symbol(self, idx: int) -> str:
        try:
            return self._symbols[idx]
        except IndexError:
            raise UnknownSymbol(f"id {idx} not in table") from None

    def symbols(self) -> Iterator[str]:
        return iter(self._symbols)

    def __len__(self) -> int:
        return len(self._symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._ids

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolTable) and self._symbols == other._symbols

    def __repr__(self):
        return f"SymbolTable({len(self)} symbols)"

    def copy(self) -> "SymbolTable":
        table = SymbolTable.__new__(SymbolTable)
        table._symbols = list(self._symbols)
        table._ids = dict(self._ids)
        return table

    def prefix_compatible(self, other: "SymbolTable") -> bool:
        """True when one table's mapping is a prefix of the other's.

        Prefix-compatible tables assign the same meaning to every shared
        id, so automata over them may be combined; the combined automaton
        carries the larger table.
        """
        a, b = self._symbols, other._symbols
        if len(a) > len(b):
            a, b = b, a
        return b[: len(a)] == a

    def merged(self, other: "SymbolTable") -> "SymbolTable":
        return self if len(self) >= len(other) else other


class Arc(NamedTuple):
    """One transition out of an implicit source state."""

    ilabel: int
    olabel: int
    weight: object
    dst: int


class Transition(NamedTuple):
    """An arc together with its source state, as yielded by full scans."""

    src: int
    ilabel: int
    olabel: int
    weight: object
    dst: int


class TransductionTable:
    """Finite map from (input string, output string) to weight.

    Strings are tuples of symbol ids; zero-weight entries are never
    stored.  ``bound`` records the maximum per-side string length the
    table was computed for, so two tables are only comparable at a common
    bound.
    """

    def __init__(self, entries=None, bound: int = 0):
        self.entries = dict(entries or {})
        self.bound = bound

    def __getitem__(self, key):
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def items(self):
        return self.entries.items()

    def truncated(self, bound: int) -> "TransductionTable":
        """Restriction to entries whose strings both fit within `bound`."""
        kept = {
            (u, v): w
            for (u, v), w in self.entries.items()
            if len(u) <= bound and len(v) <= bound
        }
        return TransductionTable(kept, min(self.bound, bound))

    def __repr__(self):
        return f"TransductionTable({self.entries!r}, bound={self.bound})"


class Automaton:
    """Weighted finite-state acceptor/transducer over a fixed semiring.

    States are the dense range ``0..num_states-1``.  Zero-weight arcs and
    zero final weights are represented by absence: ``add_arc`` silently
    drops an arc whose weight is the semiring zero, and ``set_final`` with
    zero removes finality.  Exactly one initial state exists (default 0).
    """

    def __init__(
        self,
        semiring: Semiring,
        isyms: SymbolTable | None = None,
        osyms: SymbolTable | None = None,
    ):
        self.semiring = semiring
        self.isyms = isyms if isyms is not None else SymbolTable()
        self.osyms = osyms if osyms is not None else self.isyms
        self._arcs: list = []
        self._final: dict = {}
        self._initial = 0
        self._frozen = False
        self.input_sorted = False
        self.output_sorted = False

    # -- construction -----------------------------------------------------

    def _check_mutable(self):
        if self._frozen:
            raise WfstError("automaton is frozen")

    def add_state(self) -> int:
        self._check_mutable()
        self._arcs.append([])
        return len(self._arcs) - 1

    def add_states(self, n: int) -> int:
        """Add `n` states, returning the id of the first."""
        first = len(self._arcs)
        for _ in range(n):
            self.add_state()
        return first

    def add_arc(self, src: int, ilabel: int, olabel: int, weight, dst: int) -> None:
        self._check_mutable()
        if not (0 <= src < len(self._arcs) and 0 <= dst < len(self._arcs)):
            raise WfstError(f"arc {src}->{dst} references a missing state")
        if not (0 <= ilabel < len(self.isyms)):
            raise WfstError(f"input label {ilabel} not in symbol table")
        if not (0 <= olabel < len(self.osyms)):
            raise WfstError(f"output label {olabel} not in symbol table")
        if self.semiring.is_zero(weight):
            return
        if not self.semiring.is_member(weight):
            raise WfstError(f"{weight!r} is not a {self.semiring.name} weight")
        self._arcs[src].append(Arc(ilabel, olabel, weight, dst))
        self.input_sorted = False
        self.output_sorted = False

    def set_final(self, state: int, weight=None) -> None:
        self._check_mutable()
        if not 0 <= state < len(self._arcs):
            raise WfstError(f"final state {state} missing")
        if weight is None:
            weight = self.semiring.one
        if self.semiring.is_zero(weight):
            self._final.pop(state, None)
            return
        if not self.semiring.is_member(weight):
            raise WfstError(f"{weight!r} is not a {self.semiring.name} weight")
        self._final[state] = weight

    def set_initial(self, state: int) -> None:
        self._check_mutable()
        if not 0 <= state < len(self._arcs):
            raise WfstError(f"initial state {state} missing")
        self._initial = state

    def freeze(self) -> "Automaton":
        if not self._frozen:
            if not self._arcs:
                raise WfstError("automaton has no states")
            self._arcs = tuple(tuple(arcs) for arcs in self._arcs)
            self._frozen = True
        return self

    def copy(self) -> "Automaton":
        """Mutable copy sharing the symbol tables."""
        out = Automaton(self.semiring, self.isyms, self.osyms)
        out._arcs = [list(arcs) for arcs in self._arcs]
        out._final = dict(self._final)
        out._initial = self._initial
        out.input_sorted = self.input_sorted
        out.output_sorted = self.output_sorted
        return out

    def with_tables(
        self,
        isyms: SymbolTable | None = None,
        osyms: SymbolTable | None = None,
    ) -> "Automaton":
        """Copy with replaced symbol tables; ids keep their meaning.

        The replacement tables must be prefix-compatible extensions of the
        current ones.
        """
        out = self.copy()
        if isyms is not None:
            if not self.isyms.prefix_compatible(isyms):
                raise WfstError("replacement input table is not an extension")
            out.isyms = isyms
        if osyms is not None:
            if not self.osyms.prefix_compatible(osyms):
                raise WfstError("replacement output table is not an extension")
            out.osyms = osyms
        return out.freeze() if self._frozen else out

    # -- inspection --------------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def initial(self) -> int:
        return self._initial

    @property
    def num_states(self) -> int:
        return len(self._arcs)

    @property
    def num_arcs(self) -> int:
        return sum(len(arcs) for arcs in self._arcs)

    def states(self) -> range:
        return range(len(self._arcs))

    def arcs(self, state: int):
        return self._arcs[state]

    def transitions(self) -> Iterator[Transition]:
        for src, arcs in enumerate(self._arcs):
            for arc in arcs:
                yield Transition(src, arc.ilabel, arc.olabel, arc.weight, arc.dst)

    def final_weight(self, state: int):
        return self._final.get(state, self.semiring.zero)

    def is_final(self, state: int) -> bool:
        return state in self._final

    def final_states(self):
        return self._final.items()

    def is_acceptor_form(self) -> bool:
        """True when every label has input == output (identity transduction)."""
        return all(arc.ilabel == arc.olabel for arcs in self._arcs for arc in arcs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automaton):
            return NotImplemented
        return (
            self.semiring is other.semiring
            and self._initial == other._initial
            and [list(a) for a in self._arcs] == [list(a) for a in other._arcs]
            and self._final == other._final
            and self.isyms == other.isyms
            and self.osyms == other.osyms
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"Automaton({self.semiring.name}, {self.num_states} states, "
            f"{self.num_arcs} arcs)"
        )

    def validate(self) -> None:
        """Check structural invariants, raising WfstError on violation."""
        if not self._arcs:
            raise WfstError("automaton has no states")
        if not 0 <= self._initial < len(self._arcs):
            raise WfstError("initial state out of range")
        for src, arcs in enumerate(self._arcs):
            for arc in arcs:
                if not 0 <= arc.dst < len(self._arcs):
                    raise WfstError(f"dangling destination {arc.dst} from {src}")
                if self.semiring.is_zero(arc.weight):
                    raise WfstError("zero-weight transition stored")
                if not self.semiring.is_member(arc.weight):
                    raise WfstError(f"bad weight {arc.weight!r}")
        for state, weight in self._final.items():
            if not 0 <= state < len(self._arcs):
                raise WfstError(f"dangling final state {state}")
            if self.semiring.is_zero(weight):
                raise WfstError("zero final weight stored")

    # -- reachability ------------------------------------------------------

    def accessible_states(self, root: int | None = None) -> list:
        """States reachable from `root` (default: initial), in BFS discovery order."""
        if root is None:
            root = self._initial
        seen = {root}
        order = [root]
        queue = [root]
        while queue:
            state = queue.pop(0)
            for arc in self._arcs[state]:
                if arc.dst not in seen:
                    seen.add(arc.dst)
                    order.append(arc.dst)
                    queue.append(arc.dst)
        return order

    def coaccessible_states(self) -> set:
        """States from which some final state can be reached."""
        reverse = [[] for _ in self._arcs]
        for src, arcs in enumerate(self._arcs):
            for arc in arcs:
                reverse[arc.dst].append(src)
        seen = set(self._final)
        queue = list(self._final)
        while queue:
            state = queue.pop()
            for src in reverse[state]:
                if src not in seen:
                    seen.add(src)
                    queue.append(src)
        return seen


def trim(automaton: Automaton) -> Automaton:
    """Keep only states on some accepting path (plus the initial state).

    Surviving states are renumbered in BFS discovery order from the
    initial state, so output numbering is deterministic.
    """
    useful = set(automaton.accessible_states()) & automaton.coaccessible_states()
    useful.add(automaton.initial)

    out = Automaton(automaton.semiring, automaton.isyms, automaton.osyms)
    renumber = {}
    queue = [automaton.initial]
    renumber[automaton.initial] = out.add_state()
    while queue:
        state = queue.pop(0)
        for arc in automaton.arcs(state):
            if arc.dst in useful and arc.dst not in renumber:
                renumber[arc.dst] = out.add_state()
                queue.append(arc.dst)
    for state, new in renumber.items():
        for arc in automaton.arcs(state):
            if arc.dst in renumber:
                out.add_arc(new, arc.ilabel, arc.olabel, arc.weight, renumber[arc.dst])
        if automaton.is_final(state):
            out.set_final(new, automaton.final_weight(state))
    out.set_initial(0)
    return out.freeze()


def sort_transitions(automaton: Automaton, side: str) -> Automaton:
    """Copy with each state's arcs ordered by the chosen side's symbol id.

    The sort is stable, so arcs with equal keys keep their relative order
    and the automaton's transduction is unchanged.
    """
    if side not in ("input", "output"):
        raise ValueError("side must be 'input' or 'output'")
    key = (lambda a: a.ilabel) if side == "input" else (lambda a: a.olabel)
    out = automaton.copy()
    out._arcs = [sorted(arcs, key=key) for arcs in out._arcs]
    if side == "input":
        out.input_sorted = True
    else:
        out.output_sorted = True
    return out.freeze()


def _has_blocking_epsilon_cycle(automaton: Automaton, root: int) -> bool:
    """Detect an (eps, eps)-labelled cycle that lies on some accepting route.

    Such a cycle gives infinitely many accepting paths per bounded label
    pair, which a non-idempotent semiring cannot collect.
    """
    relevant = set(automaton.accessible_states(root)) & automaton.coaccessible_states()
    eps_next = {
        s: [
            a.dst
            for a in automaton.arcs(s)
            if a.ilabel == EPSILON and a.olabel == EPSILON and a.dst in relevant
        ]
        for s in relevant
    }
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(relevant, WHITE)
    for start in relevant:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(eps_next[start]))]
        color[start] = GREY
        while stack:
            state, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GREY:
                    return True
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, iter(eps_next[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[state] = BLACK
                stack.pop()
    return False


def state_language(automaton: Automaton, state: int, max_len: int) -> TransductionTable:
    """Weighted transduction defined by `state`, restricted to short strings.

    Returns the collection, over all accepting paths starting at `state`
    whose input and output strings are both at most `max_len` long, of the
    paths' acceptance weights, keyed by label-string pair.

    Computed as a fixpoint of the one-transition unrolling, so cyclic
    automata are handled whenever the sum is defined: an (eps,eps) cycle
    on an accepting route makes the path set infinite, which is an error
    unless collection is idempotent.
    """
    if not 0 <= state < automaton.num_states:
        raise WfstError(f"state {state} out of range")
    sr = automaton.semiring
    if not sr.idempotent and _has_blocking_epsilon_cycle(automaton, state):
        raise UnboundedCollection(
            "epsilon cycle on an accepting path under non-idempotent collection"
        )

    n = automaton.num_states
    base = [dict() for _ in range(n)]
    for s, w in automaton.final_states():
        base[s][(), ()] = w
    tables = [dict(b) for b in base]

    # Any path longer than this revisits a (state, lengths) configuration,
    # so the fixpoint must have stabilized by then.
    cap = n * (max_len + 1) * (max_len + 1) + 2
    for _ in range(cap):
        new = []
        for s in range(n):
            acc = dict(base[s])
            for arc in automaton.arcs(s):
                for (u, v), w in tables[arc.dst].items():
                    u2 = (arc.ilabel,) + u if arc.ilabel != EPSILON else u
                    v2 = (arc.olabel,) + v if arc.olabel != EPSILON else v
                    if len(u2) > max_len or len(v2) > max_len:
                        continue
                    contrib = sr.extend(arc.weight, w)
                    prev = acc.get((u2, v2))
                    acc[u2, v2] = contrib if prev is None else sr.collect(prev, contrib)
            new.append(acc)
        if new == tables:
            break
        tables = new
    else:
        raise UnboundedCollection("path collection did not stabilize")
    return TransductionTable(tables[state], max_len)


def language_of(automaton: Automaton, max_len: int) -> TransductionTable:
    """The automaton's transduction: the language of its initial state."""
    return state_language(automaton, automaton.initial, max_len)
