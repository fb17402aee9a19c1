"""Transducer composition: epsilon-free, filtered, single-pass and lazy.

The epsilon-free product pairs transitions whose middle symbols agree.
With epsilons on the matched sides, a pair of operand paths would be
paired once per interleaving of their independent epsilon moves, which
overcounts weights under non-idempotent collection.  The classic fix is
applied here: epsilons on the matched sides are renamed to reserved
"pause" symbols (``<tau1>`` for the right operand's input side,
``<tau2>`` for the left's output side), weight-one self-loops let the
opposite operand idle on those symbols, and a two-state filter transducer
between the operands admits, in each gap between real matches, only the
canonical ordering: all right-alone moves before all left-alone moves,
i.e. it blocks the substring tau2-tau1.  That keeps exactly one composed
path per compatible path pair.

``compose`` runs the same restriction on the fly, tracking the filter
state inside the product state, so the tau relabelling is never
materialized.  ``compose_lazy`` defers expansion entirely, memoizing
product states as a search asks for them.
"""

import threading
from bisect import bisect_left, bisect_right

from .automaton import EPSILON, Arc, Automaton, SymbolTable, sort_transitions
from .errors import AlphabetMismatch, EpsilonPresent, SemiringMismatch, WfstError

__all__ = [
    "TAU1_SYMBOL",
    "TAU2_SYMBOL",
    "mark",
    "skip",
    "filter_automaton",
    "compose_eps_free",
    "compose_via_filter",
    "compose",
    "compose_lazy",
    "LazyComposition",
]

TAU1_SYMBOL = "<tau1>"
TAU2_SYMBOL = "<tau2>"

# Filter states of the on-the-fly composition: after the left operand has
# moved alone, the right operand may not move alone until a real match.
_FILTER_FREE = 0
_FILTER_LEFT_MOVED = 1


def _check_composable(a, b) -> None:
    if a.semiring is not b.semiring:
        raise SemiringMismatch(
            f"cannot compose {a.semiring.name} with {b.semiring.name}"
        )
    if not a.osyms.prefix_compatible(b.isyms):
        raise AlphabetMismatch("left output table does not match right input table")


def _extended_table(gamma: SymbolTable):
    """Copy of `gamma` with the two reserved tau symbols appended."""
    if TAU1_SYMBOL in gamma or TAU2_SYMBOL in gamma:
        raise WfstError("tau symbols are reserved and may not appear in user tables")
    ext = gamma.copy()
    tau1 = ext.add_symbol(TAU1_SYMBOL)
    tau2 = ext.add_symbol(TAU2_SYMBOL)
    return ext, tau1, tau2


def mark(t: Automaton, side: str) -> Automaton:
    """Replace epsilon on the chosen side with a reserved tau symbol.

    Input-side epsilons become ``<tau1>``, output-side epsilons become
    ``<tau2>``; everything else (including the opposite side of each
    label) is untouched, so marking is invertible.
    """
    if side not in ("input", "output"):
        raise ValueError("side must be 'input' or 'output'")
    if side == "input":
        ext, tau1, _ = _extended_table(t.isyms)
        out = Automaton(t.semiring, ext, t.osyms)
    else:
        ext, _, tau2 = _extended_table(t.osyms)
        out = Automaton(t.semiring, t.isyms, ext)
    out.add_states(t.num_states)
    for state in t.states():
        for arc in t.arcs(state):
            ilabel, olabel = arc.ilabel, arc.olabel
            if side == "input" and ilabel == EPSILON:
                ilabel = tau1
            if side == "output" and olabel == EPSILON:
                olabel = tau2
            out.add_arc(state, ilabel, olabel, arc.weight, arc.dst)
    for state, fw in t.final_states():
        out.set_final(state, fw)
    out.set_initial(t.initial)
    return out.freeze()


def skip(t: Automaton, which: str) -> Automaton:
    """Add a weight-one tau self-loop at every state.

    ``tau1-loops`` (for the left operand) emit ``<tau1>`` on the output
    side against input epsilon; ``tau2-loops`` (for the right operand)
    absorb ``<tau2>`` on the input side against output epsilon.
    """
    if which not in ("tau1-loops", "tau2-loops"):
        raise ValueError("which must be 'tau1-loops' or 'tau2-loops'")
    if which == "tau1-loops":
        if TAU1_SYMBOL in t.osyms:
            ext = t.osyms
        else:
            ext, _, _ = _extended_table(t.osyms)
        out = t.with_tables(osyms=ext).copy()
        tau1 = ext.lookup(TAU1_SYMBOL)
        for state in out.states():
            out.add_arc(state, EPSILON, tau1, t.semiring.one, state)
    else:
        if TAU2_SYMBOL in t.isyms:
            ext = t.isyms
        else:
            ext, _, _ = _extended_table(t.isyms)
        out = t.with_tables(isyms=ext).copy()
        tau2 = ext.lookup(TAU2_SYMBOL)
        for state in out.states():
            out.add_arc(state, tau2, EPSILON, t.semiring.one, state)
    return out.freeze()


def filter_automaton(gamma: SymbolTable, semiring=None) -> Automaton:
    """The two-state filter transducer over `gamma` plus the tau symbols.

    Real symbols map to themselves from either state and reset to the
    unrestricted state; ``<tau1>`` is admitted only there; ``<tau2>``
    moves to (or stays in) the restricted state.  Both states are final,
    so the filter's only effect is to block middle strings containing
    tau2 immediately followed by tau1.  All weights are one.
    """
    from .semiring import TROPICAL

    if semiring is None:
        semiring = TROPICAL
    ext, tau1, tau2 = _extended_table(gamma)
    out = Automaton(semiring, ext, ext)
    out.add_states(2)
    one = semiring.one
    for x in range(1, len(gamma)):
        out.add_arc(0, x, x, one, 0)
    out.add_arc(0, tau1, tau1, one, 0)
    out.add_arc(0, tau2, tau2, one, 1)
    for x in range(1, len(gamma)):
        out.add_arc(1, x, x, one, 0)
    out.add_arc(1, tau2, tau2, one, 1)
    out.set_final(0, one)
    out.set_final(1, one)
    return out.freeze()


def _input_sorted(b: Automaton) -> Automaton:
    return b if b.input_sorted else sort_transitions(b, "input")


def compose_eps_free(a: Automaton, b: Automaton) -> Automaton:
    """Product composition for operands with epsilon-free matched sides.

    States are reachable pairs (numbered in BFS discovery order), the
    initial state is the pair of initials, final weights multiply, and an
    arc exists per pair of operand arcs agreeing on the middle symbol.
    """
    _check_composable(a, b)
    for state in a.states():
        for arc in a.arcs(state):
            if arc.olabel == EPSILON:
                raise EpsilonPresent("left operand has epsilon output labels")
    for state in b.states():
        for arc in b.arcs(state):
            if arc.ilabel == EPSILON:
                raise EpsilonPresent("right operand has epsilon input labels")
    bs = _input_sorted(b)
    bkeys = [[arc.ilabel for arc in bs.arcs(q)] for q in bs.states()]
    sr = a.semiring

    out = Automaton(sr, a.isyms, b.osyms)
    start = (a.initial, bs.initial)
    ids = {start: out.add_state()}
    queue = [start]
    while queue:
        qa, qb = key = queue.pop(0)
        src = ids[key]
        barcs, keys = bs.arcs(qb), bkeys[qb]
        for x in a.arcs(qa):
            lo = bisect_left(keys, x.olabel)
            hi = bisect_right(keys, x.olabel)
            for y in barcs[lo:hi]:
                nkey = (x.dst, y.dst)
                if nkey not in ids:
                    ids[nkey] = out.add_state()
                    queue.append(nkey)
                out.add_arc(src, x.ilabel, y.olabel, sr.extend(x.weight, y.weight),
                            ids[nkey])
        fa, fb = a.final_weight(qa), bs.final_weight(qb)
        if not (sr.is_zero(fa) or sr.is_zero(fb)):
            out.set_final(src, sr.extend(fa, fb))
    return out.freeze()


def compose_via_filter(a: Automaton, b: Automaton, filtered: bool = True) -> Automaton:
    """Composition by literally building the marked/skipped operands.

    With ``filtered`` false the filter transducer is omitted, which
    produces one composed path per interleaving of independent epsilon
    moves; useful only to demonstrate why the filter is needed.
    """
    _check_composable(a, b)
    middle = a.osyms.merged(b.isyms)
    left = skip(mark(a.with_tables(osyms=middle), "output"), "tau1-loops")
    right = skip(mark(b.with_tables(isyms=middle), "input"), "tau2-loops")
    if filtered:
        flt = filter_automaton(middle, a.semiring)
        return compose_eps_free(compose_eps_free(left, flt), right)
    return compose_eps_free(left, right)


def _composite_arcs(left, right, right_ikeys, qa, qb, f):
    """Arcs of the on-the-fly filtered product state (qa, qb, f).

    Yields (ilabel, olabel, weight, successor-key) tuples.  The left
    operand may always advance alone on its epsilon-output arcs (moving
    the filter to the restricted state); the right operand may advance
    alone on its epsilon-input arcs only in the unrestricted state; real
    middle symbols must match and reset the filter.
    """
    sr = left.semiring
    barcs = right.arcs(qb)
    keys = right_ikeys(qb)
    for x in left.arcs(qa):
        if x.olabel == EPSILON:
            yield x.ilabel, EPSILON, x.weight, (x.dst, qb, _FILTER_LEFT_MOVED)
            continue
        lo = bisect_left(keys, x.olabel)
        hi = bisect_right(keys, x.olabel)
        for y in barcs[lo:hi]:
            yield (x.ilabel, y.olabel, sr.extend(x.weight, y.weight),
                   (x.dst, y.dst, _FILTER_FREE))
    if f == _FILTER_FREE:
        hi = bisect_right(keys, EPSILON)
        for y in barcs[:hi]:
            yield EPSILON, y.olabel, y.weight, (qa, y.dst, _FILTER_FREE)


def compose(a: Automaton, b: Automaton) -> Automaton:
    """Eager single-pass filtered composition.

    Table-equivalent to :func:`compose_via_filter`, but the product is
    built directly over states (left state, right state, filter state)
    reachable from the initial triple, in BFS discovery order.
    """
    _check_composable(a, b)
    bs = _input_sorted(b)
    bkeys = [[arc.ilabel for arc in bs.arcs(q)] for q in bs.states()]
    ikeys = bkeys.__getitem__
    sr = a.semiring

    out = Automaton(sr, a.isyms, b.osyms)
    start = (a.initial, bs.initial, _FILTER_FREE)
    ids = {start: out.add_state()}
    queue = [start]
    while queue:
        key = queue.pop(0)
        qa, qb, f = key
        src = ids[key]
        for ilabel, olabel, weight, nkey in _composite_arcs(a, bs, ikeys, qa, qb, f):
            if nkey not in ids:
                ids[nkey] = out.add_state()
                queue.append(nkey)
            out.add_arc(src, ilabel, olabel, weight, ids[nkey])
        fa, fb = a.final_weight(qa), bs.final_weight(qb)
        if not (sr.is_zero(fa) or sr.is_zero(fb)):
            out.set_final(src, sr.extend(fa, fb))
    return out.freeze()


class LazyComposition:
    """On-demand view of the filtered composition of two operands.

    States are created and memoized only when a traversal asks for them,
    so any search over the handle explores a subgraph of the eager
    product.  The left operand may itself be a handle, which is how whole
    cascades are decoded without materializing intermediate products.
    Expansion is idempotent and internally locked, so concurrent queries
    behave as if serialized.
    """

    def __init__(self, left, right: Automaton):
        _check_composable(left, right)
        self.left = left
        self.right = _input_sorted(right)
        self.semiring = left.semiring
        self.isyms = left.isyms
        self.osyms = right.osyms
        self._rkeys = [[arc.ilabel for arc in self.right.arcs(q)]
                       for q in self.right.states()]
        self._ids = {}
        self._keys = []
        self._arc_cache = []
        self._final_cache = {}
        self._lock = threading.RLock()
        self._intern((left.initial, self.right.initial, _FILTER_FREE))

    def _intern(self, key) -> int:
        # Only called under the expansion lock (or from __init__), so the
        # three structures stay consistent without their own locking.
        state = self._ids.get(key)
        if state is None:
            state = len(self._keys)
            self._ids[key] = state
            self._keys.append(key)
            self._arc_cache.append(None)
        return state

    @property
    def initial(self) -> int:
        return 0

    @property
    def num_known_states(self) -> int:
        return len(self._keys)

    @property
    def num_expanded_states(self) -> int:
        """States whose outgoing arcs have been computed."""
        return sum(1 for arcs in self._arc_cache if arcs is not None)

    def arcs(self, state: int):
        """Outgoing arcs, expanding and memoizing on first query."""
        cached = self._arc_cache[state]
        if cached is not None:
            return cached
        with self._lock:
            cached = self._arc_cache[state]
            if cached is not None:
                return cached
            qa, qb, f = self._keys[state]
            arcs = tuple(
                Arc(ilabel, olabel, weight, self._intern(nkey))
                for ilabel, olabel, weight, nkey in _composite_arcs(
                    self.left, self.right, self._rkeys.__getitem__, qa, qb, f)
            )
            self._arc_cache[state] = arcs
            return arcs

    def final_weight(self, state: int):
        fw = self._final_cache.get(state)
        if fw is None:
            qa, qb, _ = self._keys[state]
            fa = self.left.final_weight(qa)
            fb = self.right.final_weight(qb)
            if self.semiring.is_zero(fa) or self.semiring.is_zero(fb):
                fw = self.semiring.zero
            else:
                fw = self.semiring.extend(fa, fb)
            self._final_cache[state] = fw
        return fw

    def expand_all(self) -> "LazyComposition":
        """Force every reachable state; afterwards the view is the eager product."""
        state = 0
        while state < len(self._keys):
            self.arcs(state)
            state += 1
        return self

    def to_automaton(self) -> Automaton:
        """Materialize the currently explored subgraph as a frozen automaton."""
        out = Automaton(self.semiring, self.isyms, self.osyms)
        out.add_states(len(self._keys))
        for state, arcs in enumerate(self._arc_cache):
            for arc in arcs or ():
                out.add_arc(state, arc.ilabel, arc.olabel, arc.weight, arc.dst)
            fw = self.final_weight(state)
            if not self.semiring.is_zero(fw):
                out.set_final(state, fw)
        return out.freeze()

    def __repr__(self):
        return (f"LazyComposition({self.num_expanded_states} expanded / "
                f"{self.num_known_states} known states)")


def compose_lazy(a, b: Automaton) -> LazyComposition:
    """Handle over the filtered composition, expanded on demand."""
    return LazyComposition(a, b)
