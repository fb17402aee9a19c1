"""Rational operations: the constructors closed over weighted transductions.

Each function builds a new frozen automaton whose transduction is defined
pointwise from its operands: singletons, scaling, union (pointwise
collection), concatenation (collection over splits), bounded powers,
closure, inversion and projection.  Union, concatenation and closure glue
operand copies with (eps, eps) weight-one arcs rather than merging
states; general composition already copes with epsilons, and correctness
is stated at the level of transduction tables, not state graphs.
"""

from typing import Sequence

from .automaton import EPSILON, Automaton, SymbolTable
from .errors import AlphabetMismatch, SemiringMismatch

__all__ = [
    "singleton",
    "scale",
    "union",
    "concat",
    "power",
    "closure",
    "invert",
    "project",
]


def _to_ids(seq, table: SymbolTable) -> tuple:
    return tuple(table.lookup(s) if isinstance(s, str) else s for s in seq)


def _check_binary(s: Automaton, t: Automaton):
    if s.semiring is not t.semiring:
        raise SemiringMismatch(
            f"cannot combine {s.semiring.name} with {t.semiring.name}"
        )
    if not s.isyms.prefix_compatible(t.isyms):
        raise AlphabetMismatch("input symbol tables disagree")
    if not s.osyms.prefix_compatible(t.osyms):
        raise AlphabetMismatch("output symbol tables disagree")
    return s.isyms.merged(t.isyms), s.osyms.merged(t.osyms)


def _copy_states(out: Automaton, src: Automaton) -> int:
    """Append a copy of `src` into `out`; returns the state-id offset."""
    offset = out.add_states(src.num_states)
    for state in src.states():
        for arc in src.arcs(state):
            out.add_arc(offset + state, arc.ilabel, arc.olabel, arc.weight,
                        offset + arc.dst)
    return offset


def singleton(u: Sequence, v: Sequence, weight, semiring,
              isyms: SymbolTable, osyms: SymbolTable | None = None) -> Automaton:
    """Linear automaton mapping exactly `u` to `v` with the given weight.

    The shorter string is padded with epsilons; symbols may be given as
    table entries or raw ids.
    """
    if osyms is None:
        osyms = isyms
    u = _to_ids(u, isyms)
    v = _to_ids(v, osyms)
    out = Automaton(semiring, isyms, osyms)
    n = max(len(u), len(v))
    out.add_states(n + 1)
    for i in range(n):
        ilabel = u[i] if i < len(u) else EPSILON
        olabel = v[i] if i < len(v) else EPSILON
        out.add_arc(i, ilabel, olabel, semiring.one, i + 1)
    out.set_final(n, weight)
    return out.freeze()


def scale(weight, t: Automaton) -> Automaton:
    """Extend every table entry of `t` by `weight` (zero empties the language)."""
    out = Automaton(t.semiring, t.isyms, t.osyms)
    out.add_state()
    offset = _copy_states(out, t)
    out.add_arc(0, EPSILON, EPSILON, weight, offset + t.initial)
    for state, fw in t.final_states():
        out.set_final(offset + state, fw)
    return out.freeze()


def union(s: Automaton, t: Automaton, *rest: Automaton) -> Automaton:
    """Pointwise collection: result(u, v) = collect(s(u, v), t(u, v)).

    Extra operands are unioned in the same construction (one shared fresh
    initial state), which keeps epsilon chains flat when summing many
    machines.
    """
    operands = [s, t, *rest]
    isyms, osyms = s.isyms, s.osyms
    for other in operands[1:]:
        i2, o2 = _check_binary(operands[0], other)
        isyms, osyms = isyms.merged(i2), osyms.merged(o2)
    out = Automaton(s.semiring, isyms, osyms)
    out.add_state()
    one = s.semiring.one
    for operand in operands:
        offset = _copy_states(out, operand)
        out.add_arc(0, EPSILON, EPSILON, one, offset + operand.initial)
        for state, fw in operand.final_states():
            out.set_final(offset + state, fw)
    return out.freeze()


def concat(s: Automaton, t: Automaton) -> Automaton:
    """Concatenation: collect over all input/output splits of extend(s, t)."""
    isyms, osyms = _check_binary(s, t)
    out = Automaton(s.semiring, isyms, osyms)
    off_s = _copy_states(out, s)
    off_t = _copy_states(out, t)
    # s's acceptance weight moves onto the glue arc.
    for state, fw in s.final_states():
        out.add_arc(off_s + state, EPSILON, EPSILON, fw, off_t + t.initial)
    for state, fw in t.final_states():
        out.set_final(off_t + state, fw)
    out.set_initial(off_s + s.initial)
    return out.freeze()


def power(t: Automaton, n: int) -> Automaton:
    """n-fold concatenation; the 0th power accepts only (eps, eps) with weight one."""
    if n < 0:
        raise ValueError("power requires n >= 0")
    out = singleton((), (), t.semiring.one, t.semiring, t.isyms, t.osyms)
    for _ in range(n):
        out = concat(t, out)
    return out


def closure(t: Automaton) -> Automaton:
    """Collection of all powers of `t`.

    A fresh state is both initial and final (the 0th power) with weight-one
    epsilon arcs into `t` and from `t`'s finals back, realizing repetition.
    """
    out = Automaton(t.semiring, t.isyms, t.osyms)
    out.add_state()
    offset = _copy_states(out, t)
    out.set_final(0, t.semiring.one)
    out.add_arc(0, EPSILON, EPSILON, t.semiring.one, offset + t.initial)
    for state, fw in t.final_states():
        out.add_arc(offset + state, EPSILON, EPSILON, fw, 0)
    return out.freeze()


def invert(t: Automaton) -> Automaton:
    """Swap the two sides of every label: result(v, u) = t(u, v)."""
    out = Automaton(t.semiring, t.osyms, t.isyms)
    out.add_states(t.num_states)
    for state in t.states():
        for arc in t.arcs(state):
            out.add_arc(state, arc.olabel, arc.ilabel, arc.weight, arc.dst)
    for state, fw in t.final_states():
        out.set_final(state, fw)
    out.set_initial(t.initial)
    return out.freeze()


def project(t: Automaton, side: str) -> Automaton:
    """Acceptor over one side: collects t's weights over the other side.

    Realized by copying the chosen side of each label onto both sides.
    """
    if side not in ("first", "second"):
        raise ValueError("side must be 'first' or 'second'")
    table = t.isyms if side == "first" else t.osyms
    out = Automaton(t.semiring, table, table)
    out.add_states(t.num_states)
    for state in t.states():
        for arc in t.arcs(state):
            label = arc.ilabel if side == "first" else arc.olabel
            out.add_arc(state, label, label, arc.weight, arc.dst)
    for state, fw in t.final_states():
        out.set_final(state, fw)
    out.set_initial(t.initial)
    return out.freeze()
