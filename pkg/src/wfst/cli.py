"""Pipe-composable shell commands over the text format.

One subcommand per library operation; automata flow between processes as
text on stdin/stdout (``-`` names a stream), so transducer pipelines are
ordinary shell pipelines.  Exit codes: 0 success, 1 domain error (one
diagnostic line on stderr), 2 usage error.  The default semiring comes
from the ``WFST_SEMIRING`` environment variable, falling back to
tropical.
"""

import argparse
import contextlib
import os
import sys
from pathlib import Path

from . import cascade
from .compose import LazyComposition, compose, compose_lazy, compose_via_filter
from .errors import NoAcceptingPath, WfstError
from .oracle import enumerate_paths, oracle_table
from .rational import closure, concat, invert, power, project, scale, union
from .search import beam_prune, best_path
from .semiring import by_name
from .automaton import Automaton
from .textio import (
    format_automaton,
    format_dot,
    format_symbols,
    parse_automaton,
    parse_symbols,
)

SUBCOMMANDS = (
    "compile", "print", "compose", "union", "concat", "closure", "power",
    "invert", "project", "scale", "bestpath", "prune", "info",
    "cascade-demo", "oracle-table",
)


def _read(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    return Path(path).read_text()


def _table(args, name, stdin):
    path = getattr(args, name, None)
    return parse_symbols(_read(path, stdin)) if path else None


def _load(args, path, stdin, isyms_flag="isyms", osyms_flag="osyms"):
    return parse_automaton(
        _read(path, stdin),
        by_name(args.semiring),
        isyms=_table(args, isyms_flag, stdin),
        osyms=_table(args, osyms_flag, stdin),
        acceptor=getattr(args, "acceptor", False),
    )


def _emit(args, automaton, stdout) -> int:
    stdout.write(format_automaton(automaton, acceptor=getattr(args, "acceptor", False)))
    return 0


def _cmd_compile(args, stdin, stdout, stderr):
    return _emit(args, _load(args, args.fst, stdin), stdout)


def _cmd_print(args, stdin, stdout, stderr):
    a = _load(args, args.fst, stdin)
    if args.dot:
        stdout.write(format_dot(a))
        return 0
    return _emit(args, a, stdout)


def _cmd_compose(args, stdin, stdout, stderr):
    a = _load(args, args.left, stdin, "isyms", "msyms")
    b = _load(args, args.right, stdin, "msyms", "osyms")
    if args.filter == "auto":
        if args.lazy:
            result = LazyComposition(a, b).expand_all().to_automaton()
        else:
            result = compose(a, b)
    else:
        result = compose_via_filter(a, b, filtered=(args.filter == "trivial"))
    return _emit(args, result, stdout)


def _cmd_union(args, stdin, stdout, stderr):
    return _emit(args, union(_load(args, args.left, stdin),
                             _load(args, args.right, stdin)), stdout)


def _cmd_concat(args, stdin, stdout, stderr):
    return _emit(args, concat(_load(args, args.left, stdin),
                              _load(args, args.right, stdin)), stdout)


def _cmd_closure(args, stdin, stdout, stderr):
    return _emit(args, closure(_load(args, args.fst, stdin)), stdout)


def _cmd_power(args, stdin, stdout, stderr):
    return _emit(args, power(_load(args, args.fst, stdin), args.n), stdout)


def _cmd_invert(args, stdin, stdout, stderr):
    return _emit(args, invert(_load(args, args.fst, stdin)), stdout)


def _cmd_project(args, stdin, stdout, stderr):
    return _emit(args, project(_load(args, args.fst, stdin), args.side), stdout)


def _cmd_scale(args, stdin, stdout, stderr):
    sr = by_name(args.semiring)
    return _emit(args, scale(sr.parse_weight(args.weight),
                             _load(args, args.fst, stdin)), stdout)


def _path_automaton(t, result) -> Automaton:
    """The witness path as a linear automaton in t's alphabets."""
    out = Automaton(t.semiring, t.isyms, t.osyms)
    out.add_states(len(result.path) + 1)
    for i, step in enumerate(result.path):
        out.add_arc(i, step.ilabel, step.olabel, step.weight, i + 1)
    last = result.path[-1].dst if result.path else t.initial
    out.set_final(len(result.path), t.final_weight(last))
    return out.freeze()


def _cmd_bestpath(args, stdin, stdout, stderr):
    t = _load(args, args.fst[0], stdin)
    for path in args.fst[1:]:
        t = compose_lazy(t, parse_automaton(_read(path, stdin), by_name(args.semiring)))
    result = best_path(t, beam=args.beam)
    return _emit(args, _path_automaton(t, result), stdout)


def _cmd_prune(args, stdin, stdout, stderr):
    lattice = beam_prune(_load(args, args.fst, stdin), args.beam)
    return _emit(args, lattice.automaton, stdout)


def _cmd_info(args, stdin, stdout, stderr):
    a = _load(args, args.fst, stdin)
    paths = enumerate_paths(a, args.max_transitions)
    rows = [
        ("states", a.num_states),
        ("arcs", a.num_arcs),
        ("initial", a.initial),
        ("final states", sum(1 for _ in a.final_states())),
        ("semiring", a.semiring.name),
        ("acceptor", "true" if a.is_acceptor_form() else "false"),
        (f"accepting paths (<={args.max_transitions} transitions)", len(paths)),
    ]
    for key, value in rows:
        stdout.write(f"{key}\t{value}\n")
    return 0


def _cmd_oracle_table(args, stdin, stdout, stderr):
    a = _load(args, args.fst, stdin)
    table = oracle_table(a, args.max_len)
    eps = a.isyms.symbol(0)
    for (u, v), w in sorted(table.items()):
        us = " ".join(a.isyms.symbol(i) for i in u) or eps
        vs = " ".join(a.osyms.symbol(i) for i in v) or a.osyms.symbol(0)
        stdout.write(f"{us}\t{vs}\t{a.semiring.format_weight(w)}\n")
    return 0


def _cmd_cascade_demo(args, stdin, stdout, stderr):
    phones = cascade.parse_phone_models(_read(args.phones, stdin))
    lexicon = cascade.parse_lexicon(_read(args.lexicon, stdin))
    counts = cascade.parse_bigram_counts(_read(args.bigrams, stdin))
    models = cascade.build_cascade(phones, lexicon, counts)
    utterances = cascade.sample_utterances(
        phones, lexicon, counts, args.utterances, args.seed, noise=args.noise)
    correct = 0
    for i, utt in enumerate(utterances):
        try:
            result = cascade.recognize(utt.observations, models, beam=args.beam)
            hyp = result.output_symbols(models.word_table)
        except NoAcceptingPath:
            hyp = ()
        ok = hyp == utt.words
        correct += ok
        stdout.write(
            f"utt {i}\tref: {' '.join(utt.words)}\thyp: {' '.join(hyp)}\t"
            f"{'ok' if ok else 'err'}\n"
        )
    stdout.write(f"exact-match\t{correct}/{len(utterances)}\n")
    return 0


def _build_parser(default_semiring: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfst", description="weighted finite-state transducer toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name, handler, **kwargs):
        p = subs.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--semiring", default=default_semiring,
                       choices=["tropical", "probability", "boolean"])
        return p

    def io_flags(p, msyms=False):
        p.add_argument("--isyms", help="input symbol table file")
        p.add_argument("--osyms", help="output symbol table file")
        if msyms:
            p.add_argument("--msyms", help="middle (shared) symbol table file")
        p.add_argument("--acceptor", action="store_true",
                       help="read/write the one-label-per-line acceptor format")

    p = sub("compile", _cmd_compile, help="parse text and reprint canonically")
    io_flags(p)
    p.add_argument("fst")

    p = sub("print", _cmd_print, help="print an automaton (or DOT with --dot)")
    io_flags(p)
    p.add_argument("--dot", action="store_true")
    p.add_argument("fst")

    p = sub("compose", _cmd_compose, help="filtered composition of two automata")
    io_flags(p, msyms=True)
    p.add_argument("--filter", default="auto", choices=["auto", "trivial", "none"],
                   help="auto: on-the-fly; trivial: materialized two-state filter; "
                        "none: unfiltered marked product (demonstrates duplicates)")
    p.add_argument("--lazy", action="store_true",
                   help="expand through the lazy handle (same result)")
    p.add_argument("left")
    p.add_argument("right")

    for name, handler in (("union", _cmd_union), ("concat", _cmd_concat)):
        p = sub(name, handler, help=f"{name} of two automata")
        io_flags(p)
        p.add_argument("left")
        p.add_argument("right")

    p = sub("closure", _cmd_closure, help="Kleene closure")
    io_flags(p)
    p.add_argument("fst")

    p = sub("power", _cmd_power, help="n-fold concatenation")
    io_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("fst")

    p = sub("invert", _cmd_invert, help="swap input and output labels")
    io_flags(p)
    p.add_argument("fst")

    p = sub("project", _cmd_project, help="project onto one side")
    io_flags(p)
    p.add_argument("--side", required=True, choices=["first", "second"])
    p.add_argument("fst")

    p = sub("scale", _cmd_scale, help="extend every weight by a constant")
    io_flags(p)
    p.add_argument("--weight", required=True)
    p.add_argument("fst")

    p = sub("bestpath", _cmd_bestpath,
            help="best accepting path; extra files are composed lazily")
    io_flags(p)
    p.add_argument("--beam", type=float, default=None)
    p.add_argument("fst", nargs="+")

    p = sub("prune", _cmd_prune, help="beam-pruned lattice around the best path")
    io_flags(p)
    p.add_argument("--beam", type=float, required=True)
    p.add_argument("fst")

    p = sub("info", _cmd_info, help="summary statistics")
    io_flags(p)
    p.add_argument("--max-transitions", type=int, default=12)
    p.add_argument("fst")

    p = sub("oracle-table", _cmd_oracle_table,
            help="brute-force transduction table (debugging)")
    io_flags(p)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("fst")

    p = sub("cascade-demo", _cmd_cascade_demo,
            help="synthetic recognition cascade round trip")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--phones", required=True)
    p.add_argument("--bigrams", required=True)
    p.add_argument("--utterances", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--beam", type=float, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    return parser


def dispatch(argv, stdin=None, stdout=None, stderr=None) -> int:
    """Run one subcommand; returns the process exit code."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = _build_parser(os.environ.get("WFST_SEMIRING", "tropical"))
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args, stdin, stdout, stderr)
    except WfstError as exc:
        stderr.write(f"wfst {args.command}: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        stderr.write(f"wfst {args.command}: {exc}\n")
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
