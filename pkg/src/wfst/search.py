"""Best-path extraction and beam-pruned lattice generation.

These run over anything exposing the automaton read protocol (``initial``,
``arcs(q)``, ``final_weight(q)``, ``semiring``), which includes frozen
automata and lazy composition handles; a search over a handle expands
only the product states it actually visits.

Requires the min-sum semiring: path weights are nonnegative and add, so
Dijkstra expansion in weight order is exact.
"""

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .automaton import EPSILON, Automaton, Transition
from .errors import NoAcceptingPath, UnsupportedSemiring, WfstError

__all__ = ["SearchResult", "Lattice", "best_path", "beam_prune", "shortest_distance"]


@dataclass(frozen=True)
class SearchResult:
    """An optimal accepting path with its label strings and weight."""

    input_ids: tuple
    output_ids: tuple
    weight: float
    path: tuple

    def input_symbols(self, table) -> tuple:
        return tuple(table.symbol(i) for i in self.input_ids)

    def output_symbols(self, table) -> tuple:
        return tuple(table.symbol(i) for i in self.output_ids)


@dataclass(frozen=True)
class Lattice:
    """Beam-pruned acyclic sub-automaton around the best path."""

    automaton: Automaton
    beam: float
    best_weight: float


def _check_searchable(t, beam=None) -> None:
    if not t.semiring.supports_shortest_path:
        raise UnsupportedSemiring(
            f"best-path search needs the min-sum order, not {t.semiring.name}"
        )
    if beam is not None and beam < 0.0:
        raise WfstError("beam must be nonnegative")


def _reconstruct(t, parent, state):
    steps = []
    while parent[state] is not None:
        prev, arc = parent[state]
        steps.append(Transition(prev, arc.ilabel, arc.olabel, arc.weight, arc.dst))
        state = prev
    steps.reverse()
    inputs = tuple(s.ilabel for s in steps if s.ilabel != EPSILON)
    outputs = tuple(s.olabel for s in steps if s.olabel != EPSILON)
    return inputs, outputs, tuple(steps)


def best_path(t, beam: float | None = None) -> SearchResult:
    """Cheapest accepting path; exact for nonnegative min-sum weights.

    With a `beam`, partial paths are pruned once their weight exceeds, by
    more than the beam, the best settled weight among paths that have
    consumed the same number of input symbols (and also once it exceeds
    the best accepting total found so far plus the beam).  This is what
    makes decoding over a large lazy product practical, but like any beam
    search it can drop the optimum when the beam is too tight, in the
    extreme raising NoAcceptingPath; ``beam=None`` or an infinite beam is
    exact.

    Among equal-weight accepting paths ending in distinct states, the one
    with the lexicographically smallest output string (then input string)
    is returned; interior ties keep the first-discovered parent.
    """
    _check_searchable(t, beam)
    dist = {t.initial: 0.0}
    level = {t.initial: 0}
    parent = {t.initial: None}
    settled = set()
    best_at = {}
    heap = [(0.0, 0, t.initial)]
    counter = 0
    best_total = math.inf
    candidates = []

    while heap:
        d, _, q = heappop(heap)
        if q in settled:
            continue
        if d > best_total:
            break
        lvl = level[q]
        if beam is not None and d > best_at.get(lvl, math.inf) + beam:
            continue
        best_at.setdefault(lvl, d)
        settled.add(q)
        fw = t.final_weight(q)
        if not math.isinf(fw):
            total = d + fw
            if total < best_total:
                best_total = total
                candidates = [q]
            elif total == best_total:
                candidates.append(q)
        for arc in t.arcs(q):
            nd = d + arc.weight
            nlvl = lvl + (arc.ilabel != EPSILON)
            if beam is not None:
                if nd > best_total + beam:
                    continue
                if nd > best_at.get(nlvl, math.inf) + beam:
                    continue
            old = dist.get(arc.dst)
            if old is None or nd < old:
                dist[arc.dst] = nd
                level[arc.dst] = nlvl
                parent[arc.dst] = (q, arc)
                counter += 1
                heappush(heap, (nd, counter, arc.dst))

    if not candidates:
        raise NoAcceptingPath("no accepting path found")
    best = min(
        (_reconstruct(t, parent, q) for q in candidates),
        key=lambda rec: (rec[1], rec[0]),
    )
    return SearchResult(best[0], best[1], best_total, best[2])


def _dijkstra(initial_dists, adjacency):
    dist = dict(initial_dists)
    heap = [(d, q) for q, d in initial_dists.items()]
    heap.sort()
    settled = set()
    while heap:
        d, q = heappop(heap)
        if q in settled:
            continue
        settled.add(q)
        for w, nxt in adjacency(q):
            nd = d + w
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                heappush(heap, (nd, nxt))
    return dist


def _toposort(t: Automaton):
    indeg = [0] * t.num_states
    for q in t.states():
        for arc in t.arcs(q):
            indeg[arc.dst] += 1
    order = [q for q in t.states() if indeg[q] == 0]
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for arc in t.arcs(q):
            indeg[arc.dst] -= 1
            if indeg[arc.dst] == 0:
                order.append(arc.dst)
    if len(order) != t.num_states:
        raise WfstError("automaton is cyclic")
    return order


def shortest_distance(t: Automaton, reverse: bool = False,
                      method: str = "auto") -> list:
    """Per-state optimal path weight.

    Forward: cheapest path from the initial state to each state (infinity
    when unreachable).  Reverse: cheapest continuation from each state to
    acceptance, final weight included.  ``method`` is ``"dijkstra"``,
    ``"topological"`` (acyclic only) or ``"auto"``; both algorithms must
    and do return identical weights on acyclic input.
    """
    _check_searchable(t)
    if method == "auto":
        try:
            order = _toposort(t)
        except WfstError:
            method = "dijkstra"
        else:
            return _topological_distance(t, reverse, order)
    if method == "topological":
        return _topological_distance(t, reverse, _toposort(t))
    if method != "dijkstra":
        raise ValueError("method must be 'auto', 'dijkstra' or 'topological'")

    if not reverse:
        adjacency = [[(arc.weight, arc.dst) for arc in t.arcs(q)] for q in t.states()]
        dist = _dijkstra({t.initial: 0.0}, lambda q: adjacency[q])
    else:
        radj = [[] for _ in t.states()]
        for q in t.states():
            for arc in t.arcs(q):
                radj[arc.dst].append((arc.weight, q))
        seeds = {q: fw for q, fw in t.final_states()}
        dist = _dijkstra(seeds, lambda q: radj[q])
    return [dist.get(q, math.inf) for q in t.states()]


def _topological_distance(t: Automaton, reverse: bool, order) -> list:
    dist = [math.inf] * t.num_states
    if not reverse:
        dist[t.initial] = 0.0
        for q in order:
            if math.isinf(dist[q]):
                continue
            for arc in t.arcs(q):
                nd = dist[q] + arc.weight
                if nd < dist[arc.dst]:
                    dist[arc.dst] = nd
    else:
        for q, fw in t.final_states():
            dist[q] = fw
        for q in reversed(order):
            for arc in t.arcs(q):
                nd = arc.weight + dist[arc.dst]
                if nd < dist[q]:
                    dist[q] = nd
    return dist


def beam_prune(t, beam: float) -> Lattice:
    """Sub-automaton of everything within `beam` of the best accepting path.

    Retains exactly the states with forward + backward distance within
    best + beam, and the arcs (and final weights) whose cheapest
    completion through them fits the same bound, so every accepting path
    of the operand within the bound survives.  States are renumbered in
    BFS discovery order.  With an infinite beam this is accessible +
    coaccessible trimming.
    """
    _check_searchable(t, beam)
    best = best_path(t).weight
    bound = best + beam

    # Bounded forward expansion; on a lazy handle this only touches states
    # that can possibly fall inside the beam.
    dist_f = {t.initial: 0.0}
    arcs_of = {}
    settled = set()
    heap = [(0.0, 0, t.initial)]
    counter = 0
    while heap:
        d, _, q = heappop(heap)
        if q in settled:
            continue
        if d > bound:
            break
        settled.add(q)
        arcs_of[q] = tuple(t.arcs(q))
        for arc in arcs_of[q]:
            nd = d + arc.weight
            if nd > bound:
                continue
            if nd < dist_f.get(arc.dst, math.inf):
                dist_f[arc.dst] = nd
                counter += 1
                heappush(heap, (nd, counter, arc.dst))

    radj = {}
    seeds = {}
    for q in settled:
        fw = t.final_weight(q)
        if not math.isinf(fw):
            seeds[q] = fw
        for arc in arcs_of[q]:
            if arc.dst in settled:
                radj.setdefault(arc.dst, []).append((arc.weight, q))
    dist_b = _dijkstra(seeds, lambda q: radj.get(q, ()))

    def keep_state(q):
        return (q in settled and q in dist_b
                and dist_f[q] + dist_b[q] <= bound)

    out = Automaton(t.semiring, t.isyms, t.osyms)
    renumber = {t.initial: out.add_state()}
    queue = [t.initial]
    while queue:
        q = queue.pop(0)
        for arc in arcs_of.get(q, ()):
            if not keep_state(arc.dst):
                continue
            if dist_f[q] + arc.weight + dist_b[arc.dst] > bound:
                continue
            if arc.dst not in renumber:
                renumber[arc.dst] = out.add_state()
                queue.append(arc.dst)
            out.add_arc(renumber[q], arc.ilabel, arc.olabel, arc.weight,
                        renumber[arc.dst])
        fw = t.final_weight(q)
        if not math.isinf(fw) and dist_f[q] + fw <= bound:
            out.set_final(renumber[q], fw)
    return Lattice(out.freeze(), beam, best)
