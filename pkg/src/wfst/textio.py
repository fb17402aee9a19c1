"""Line-oriented text format for automata and symbol tables.

Transition lines are ``src<TAB>dst<TAB>ilabel<TAB>olabel<TAB>weight``
(acceptor files drop the olabel column), final lines are
``state<TAB>weight`` or just ``state``, and the first line's first field
names the initial state.  An omitted weight means the semiring one;
``<eps>`` denotes epsilon in symbolic files.  Without symbol tables,
labels are the integer ids themselves.  Formatting is canonical (tabs,
shortest round-trip floats, arcs of the initial state first, finals
last), so parse-then-format is byte-stable and suitable for golden
tests.
"""

from .automaton import Automaton, SymbolTable
from .errors import ParseError, WfstError
from .semiring import Semiring

__all__ = [
    "format_automaton",
    "parse_automaton",
    "format_symbols",
    "parse_symbols",
    "format_dot",
]


def format_automaton(a: Automaton, acceptor: bool = False) -> str:
    """Canonical text form; state ids are printed exactly as stored."""
    if acceptor and not a.is_acceptor_form():
        raise WfstError("automaton is not in acceptor form")
    sr = a.semiring
    lines = []
    initial_final_emitted = False
    if not a.arcs(a.initial):
        # The initial state must own the first line; a zero final weight
        # on input merely registers the state.
        weight = a.final_weight(a.initial)
        lines.append(f"{a.initial}\t{sr.format_weight(weight)}")
        initial_final_emitted = True

    def arc_lines(state):
        for arc in a.arcs(state):
            isym = a.isyms.symbol(arc.ilabel)
            w = sr.format_weight(arc.weight)
            if acceptor:
                lines.append(f"{state}\t{arc.dst}\t{isym}\t{w}")
            else:
                osym = a.osyms.symbol(arc.olabel)
                lines.append(f"{state}\t{arc.dst}\t{isym}\t{osym}\t{w}")

    arc_lines(a.initial)
    for state in a.states():
        if state != a.initial:
            arc_lines(state)
    for state in sorted(dict(a.final_states())):
        if state == a.initial and initial_final_emitted:
            continue
        lines.append(f"{state}\t{sr.format_weight(a.final_weight(state))}")
    return "".join(line + "\n" for line in lines)


def _parse_state(token, lineno):
    try:
        state = int(token)
    except ValueError:
        raise ParseError(f"bad state id {token!r}", lineno) from None
    if state < 0:
        raise ParseError(f"negative state id {token!r}", lineno)
    return state


def _parse_weight(token, semiring, lineno):
    try:
        return semiring.parse_weight(token)
    except ValueError:
        raise ParseError(f"bad weight {token!r}", lineno) from None


def parse_automaton(text: str, semiring: Semiring,
                    isyms: SymbolTable | None = None,
                    osyms: SymbolTable | None = None,
                    acceptor: bool = False) -> Automaton:
    """Parse the text format; symbol tables default to numeric labels."""
    arc_rows = []
    final_rows = []
    initial = None
    max_state = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.rstrip("\n").split("\t")
        n = len(fields)
        arc_width = 4 if acceptor else 5
        if n in (arc_width, arc_width - 1):
            src = _parse_state(fields[0], lineno)
            dst = _parse_state(fields[1], lineno)
            if acceptor:
                ilabel, olabel = fields[2], fields[2]
            else:
                ilabel, olabel = fields[2], fields[3]
            wtok = fields[arc_width - 1] if n == arc_width else None
            arc_rows.append((src, dst, ilabel, olabel, wtok, lineno))
            max_state = max(max_state, src, dst)
        elif n in (1, 2):
            state = _parse_state(fields[0], lineno)
            final_rows.append((state, fields[1] if n == 2 else None, lineno))
            max_state = max(max_state, state)
        else:
            raise ParseError(f"malformed line with {n} fields", lineno)
        if initial is None:
            initial = _parse_state(fields[0], lineno)
    if initial is None:
        raise ParseError("empty automaton file")

    def resolve(token, table, lineno):
        if table is not None:
            return table.lookup(token)
        try:
            label = int(token)
        except ValueError:
            raise ParseError(
                f"non-numeric label {token!r} without a symbol table", lineno
            ) from None
        if label < 0:
            raise ParseError(f"negative label {token!r}", lineno)
        return label

    if isyms is None:
        hi = max((resolve(r[2], None, r[5]) for r in arc_rows), default=0)
        isyms = SymbolTable.numeric(hi + 1)
    if osyms is None:
        hi = max((resolve(r[3], None, r[5]) for r in arc_rows), default=0)
        osyms = SymbolTable.numeric(hi + 1)

    out = Automaton(semiring, isyms, osyms)
    out.add_states(max_state + 1)
    for src, dst, itok, otok, wtok, lineno in arc_rows:
        ilabel = resolve(itok, isyms, lineno)
        olabel = resolve(otok, osyms, lineno)
        weight = semiring.one if wtok is None else _parse_weight(wtok, semiring, lineno)
        out.add_arc(src, ilabel, olabel, weight, dst)
    for state, wtok, lineno in final_rows:
        weight = semiring.one if wtok is None else _parse_weight(wtok, semiring, lineno)
        out.set_final(state, weight)
    out.set_initial(initial)
    return out.freeze()


def format_symbols(table: SymbolTable) -> str:
    lines = [f"{sym}\t{i}" for i, sym in enumerate(table.symbols())]
    return "".join(line + "\n" for line in lines)


def parse_symbols(text: str) -> SymbolTable:
    """Sidecar format: one ``symbol<TAB>id`` line per symbol, ids dense from 0."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 2:
            raise ParseError("expected 'symbol<TAB>id'", lineno)
        try:
            idx = int(fields[1])
        except ValueError:
            raise ParseError(f"bad id {fields[1]!r}", lineno) from None
        pairs.append((fields[0], idx, lineno))
    if not pairs:
        raise ParseError("empty symbol table")
    pairs.sort(key=lambda p: p[1])
    table = SymbolTable(epsilon=pairs[0][0])
    if pairs[0][1] != 0:
        raise ParseError("symbol ids must start at 0", pairs[0][2])
    for sym, idx, lineno in pairs[1:]:
        if idx != table.add_symbol(sym):
            raise ParseError(f"symbol ids must be dense, got {idx}", lineno)
    return table


def format_dot(a: Automaton) -> str:
    """Best-effort DOT rendering for eyeballing; layout untested."""
    sr = a.semiring
    lines = ["digraph wfst {", "  rankdir = LR;", "  node [shape = circle];"]
    for state, _ in a.final_states():
        lines.append(f"  {state} [shape = doublecircle];")
    lines.append(f"  start [shape = point];")
    lines.append(f"  start -> {a.initial};")
    for state in a.states():
        for arc in a.arcs(state):
            label = f"{a.isyms.symbol(arc.ilabel)}:{a.osyms.symbol(arc.olabel)}"
            w = sr.format_weight(arc.weight)
            lines.append(f'  {state} -> {arc.dst} [label = "{label}/{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
