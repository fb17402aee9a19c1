"""Brute-force reference implementations used as ground truth in tests.

Everything here folds the defining equations directly over explicitly
enumerated paths.  Nothing in this module calls the optimized rational,
composition or search code, and the graph utilities it needs (epsilon
cycle detection, reachability) are reimplemented locally, so a bug in an
optimized module cannot hide inside its own oracle.
"""

from typing import NamedTuple

from .automaton import EPSILON, Automaton, Transition, TransductionTable
from .errors import UnboundedCollection

__all__ = [
    "AcceptingPath",
    "enumerate_paths",
    "oracle_table",
    "oracle_compose",
    "tables_equal",
]


class AcceptingPath(NamedTuple):
    """One accepting path with its label strings and acceptance weight."""

    transitions: tuple
    inputs: tuple
    outputs: tuple
    weight: object


def _sorted_arcs(automaton, state):
    return sorted(
        automaton.arcs(state), key=lambda a: (a.ilabel, a.olabel, a.dst)
    )


def _weights_close(a, b, tol):
    if a == b:
        return True
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if a == float("inf") or b == float("inf"):
        return a == b
    return abs(a - b) <= tol


def _accepting_route_states(automaton):
    """States that are both reachable from the initial state and co-accessible."""
    forward = {automaton.initial}
    queue = [automaton.initial]
    while queue:
        for arc in automaton.arcs(queue.pop()):
            if arc.dst not in forward:
                forward.add(arc.dst)
                queue.append(arc.dst)
    reverse = {}
    for src in automaton.states():
        for arc in automaton.arcs(src):
            reverse.setdefault(arc.dst, []).append(src)
    backward = {s for s, _ in automaton.final_states()}
    queue = list(backward)
    while queue:
        for src in reverse.get(queue.pop(), ()):
            if src not in backward:
                backward.add(src)
                queue.append(src)
    return forward & backward


def _has_epsilon_cycle(automaton) -> bool:
    """(eps, eps) cycle among states on some accepting route?

    Uses iterative leaf stripping on the epsilon subgraph: repeatedly
    delete states with no outgoing epsilon edge; a nonempty residue is a
    cycle.
    """
    states = _accepting_route_states(automaton)
    out_edges = {
        s: {
            a.dst
            for a in automaton.arcs(s)
            if a.ilabel == EPSILON and a.olabel == EPSILON and a.dst in states
        }
        for s in states
    }
    in_edges = {s: set() for s in states}
    for s, dsts in out_edges.items():
        for d in dsts:
            in_edges[d].add(s)
    leaves = [s for s in states if not out_edges[s]]
    remaining = set(states)
    while leaves:
        s = leaves.pop()
        remaining.discard(s)
        for p in in_edges[s]:
            out_edges[p].discard(s)
            if not out_edges[p] and p in remaining:
                leaves.append(p)
    return bool(remaining)


def enumerate_paths(automaton: Automaton, max_transitions: int) -> list:
    """All accepting paths from the initial state with at most `max_transitions` arcs.

    Path weights and acceptance weights are computed by direct folding,
    and the empty path at a final initial state is included.  Order is
    deterministic: depth-first with arcs sorted by label then target.
    """
    sr = automaton.semiring
    found = []

    def visit(state, steps, inputs, outputs, weight):
        fw = automaton.final_weight(state)
        if not sr.is_zero(fw):
            found.append(
                AcceptingPath(tuple(steps), tuple(inputs), tuple(outputs),
                              sr.extend(weight, fw))
            )
        if len(steps) == max_transitions:
            return
        for arc in _sorted_arcs(automaton, state):
            steps.append(Transition(state, arc.ilabel, arc.olabel, arc.weight, arc.dst))
            if arc.ilabel != EPSILON:
                inputs.append(arc.ilabel)
            if arc.olabel != EPSILON:
                outputs.append(arc.olabel)
            visit(arc.dst, steps, inputs, outputs, sr.extend(weight, arc.weight))
            steps.pop()
            if arc.ilabel != EPSILON:
                inputs.pop()
            if arc.olabel != EPSILON:
                outputs.pop()

    visit(automaton.initial, [], [], [], sr.one)
    return found


def oracle_table(automaton: Automaton, max_len: int) -> TransductionTable:
    """Ground-truth transduction table by exhaustive path enumeration.

    Groups accepting paths by their (input, output) label strings, both
    restricted to `max_len` symbols, and collects the acceptance weights.

    A path that revisits a (state, input-length, output-length)
    configuration has looped over (eps, eps) transitions; such loops are
    pruned, which is exact for idempotent semirings (the loop-free path
    is never worse) and raises UnboundedCollection otherwise, since the
    grouped path set would be infinite.
    """
    sr = automaton.semiring
    if not sr.idempotent and _has_epsilon_cycle(automaton):
        raise UnboundedCollection(
            "epsilon cycle on an accepting path under non-idempotent collection"
        )
    entries = {}

    def visit(state, inputs, outputs, weight, seen):
        fw = automaton.final_weight(state)
        if not sr.is_zero(fw):
            key = (inputs, outputs)
            acc = sr.extend(weight, fw)
            entries[key] = sr.collect(entries[key], acc) if key in entries else acc
        for arc in _sorted_arcs(automaton, state):
            inext = inputs + (arc.ilabel,) if arc.ilabel != EPSILON else inputs
            onext = outputs + (arc.olabel,) if arc.olabel != EPSILON else outputs
            if len(inext) > max_len or len(onext) > max_len:
                continue
            config = (arc.dst, len(inext), len(onext))
            if config in seen:
                continue
            visit(arc.dst, inext, onext, sr.extend(weight, arc.weight), seen | {config})

    start = automaton.initial
    visit(start, (), (), sr.one, frozenset({(start, 0, 0)}))
    return TransductionTable(entries, max_len)


def oracle_compose(sa: TransductionTable, sb: TransductionTable, semiring) -> TransductionTable:
    """Relational composition of two tables, summing over middle strings.

    For every (r, s) in `sa` and (s, t) in `sb`, the result entry (r, t)
    collects extend(sa[r, s], sb[s, t]).
    """
    by_middle = {}
    for (s, t), w in sb.items():
        by_middle.setdefault(s, []).append((t, w))
    entries = {}
    for (r, s), w1 in sa.items():
        for t, w2 in by_middle.get(s, ()):
            key = (r, t)
            w = semiring.extend(w1, w2)
            entries[key] = semiring.collect(entries[key], w) if key in entries else w
    return TransductionTable(entries, min(sa.bound, sb.bound))


def tables_equal(x: TransductionTable, y: TransductionTable, tol: float) -> bool:
    """Same key set and weights within `tol` (exact for booleans and infinities)."""
    if x.entries.keys() != y.entries.keys():
        return False
    return all(_weights_close(x[k], y[k], tol) for k in x)
