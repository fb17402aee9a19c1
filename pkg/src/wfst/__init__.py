"""Semiring-generic weighted finite-state acceptor/transducer toolkit.

The pieces: weight algebras (`semiring`), the automaton data model
(`automaton`), rational constructors (`rational`), epsilon-filtered and
lazy composition (`compose`), best-path search and beam pruning
(`search`), brute-force reference implementations (`oracle`), a synthetic
speech-recognition cascade (`cascade`), and a text format plus
pipe-composable command line (`textio`, `cli`).
"""

from .automaton import (
    EPSILON,
    Arc,
    Automaton,
    SymbolTable,
    Transition,
    TransductionTable,
    language_of,
    sort_transitions,
    state_language,
    trim,
)
from .compose import (
    LazyComposition,
    compose,
    compose_eps_free,
    compose_lazy,
    compose_via_filter,
    filter_automaton,
    mark,
    skip,
)
from .errors import (
    AlphabetMismatch,
    DuplicateWord,
    EmptyVocabulary,
    EpsilonPresent,
    NoAcceptingPath,
    ParseError,
    SemiringMismatch,
    UnboundedCollection,
    UnknownSymbol,
    UnsupportedSemiring,
    WfstError,
)
from .rational import (
    closure,
    concat,
    invert,
    power,
    project,
    scale,
    singleton,
    union,
)
from .search import Lattice, SearchResult, beam_prune, best_path, shortest_distance
from .semiring import (
    BOOLEAN,
    PROBABILITY,
    TROPICAL,
    Semiring,
    boolean_semiring,
    by_name,
    probability_semiring,
    tropical_semiring,
)

__version__ = "0.1.0"
