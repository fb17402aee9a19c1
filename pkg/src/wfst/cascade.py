"""Synthetic speech-recognition cascade at desk scale.

Builds the classic decoding chain — an utterance acceptor over quantized
observation symbols, an acoustic transducer from observations to
context-dependent units, a context transducer from those units to plain
phones, a pronunciation dictionary from phones to words, and a bigram
language model — then decodes by lazy composition and best-path search.
All weights are negative log-probabilities over the min-sum semiring.
"""

import math
import random
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

from .automaton import EPSILON, Automaton, SymbolTable, trim
from .compose import LazyComposition, compose, compose_lazy
from .errors import DuplicateWord, EmptyVocabulary, ParseError, WfstError
from .rational import closure, union
from .search import SearchResult, best_path
from .semiring import TROPICAL

__all__ = [
    "PhoneModelSpec",
    "WordModelSpec",
    "ContextSpec",
    "CascadeModels",
    "Utterance",
    "build_observations",
    "build_acoustic",
    "build_dictionary",
    "build_context_transducer",
    "build_ngram",
    "build_cascade",
    "expand_context_models",
    "decoding_chain",
    "full_lazy_chain",
    "recognize",
    "demo_inventory",
    "sample_utterances",
    "parse_phone_models",
    "format_phone_models",
    "parse_lexicon",
    "format_lexicon",
    "parse_bigram_counts",
    "format_bigram_counts",
]

START_TOKEN = "<s>"
END_TOKEN = "</s>"

_NORM_TOL = 1e-6


@dataclass(frozen=True)
class PhoneModelSpec:
    """Left-to-right model of one phone (or context-dependent unit).

    Per emitting state: a self-loop weight, an advance weight, and an
    emission distribution over observation symbols, all as negative log
    probabilities (``inf`` means probability zero).  Each state's loop
    plus advance mass and its emission mass must both normalize.
    """

    unit: str
    loop: tuple
    advance: tuple
    emissions: tuple

    @property
    def num_states(self) -> int:
        return len(self.advance)

    def validate(self) -> None:
        if not (len(self.loop) == len(self.advance) == len(self.emissions) >= 1):
            raise WfstError(f"model {self.unit!r}: inconsistent state count")
        for j in range(self.num_states):
            trans = math.exp(-self.loop[j]) + math.exp(-self.advance[j])
            if abs(trans - 1.0) > _NORM_TOL:
                raise WfstError(
                    f"model {self.unit!r} state {j}: transition mass {trans}"
                )
            emis = sum(math.exp(-w) for w in self.emissions[j].values())
            if abs(emis - 1.0) > _NORM_TOL:
                raise WfstError(
                    f"model {self.unit!r} state {j}: emission mass {emis}"
                )


@dataclass(frozen=True)
class WordModelSpec:
    """A word with one or more weighted pronunciations (phone strings)."""

    word: str
    pronunciations: tuple

    def validate(self) -> None:
        if not self.pronunciations:
            raise WfstError(f"word {self.word!r} has no pronunciations")
        for phones, _ in self.pronunciations:
            if not phones:
                raise WfstError(f"word {self.word!r} has an empty pronunciation")


@dataclass(frozen=True)
class ContextSpec:
    """Phone inventory plus the boundary marker used at sentence edges."""

    phones: tuple
    boundary: str = "#"

    def __post_init__(self):
        if self.boundary in self.phones:
            raise WfstError("boundary marker must not be a phone")

    def contexts(self) -> tuple:
        return self.phones + (self.boundary,)

    def unit_name(self, phone: str, left: str, right: str) -> str:
        return f"{phone}/{left}_{right}"

    def unit_names(self) -> list:
        """All context-dependent unit symbols: |P| * (|P|+1)^2 of them."""
        return [
            self.unit_name(p, l, r)
            for p in self.phones
            for l in self.contexts()
            for r in self.contexts()
        ]


class CascadeModels(NamedTuple):
    """The built decoding chain plus its shared symbol tables.

    ``cdm`` is the observation-independent tail of the cascade (context
    transducer, dictionary and language model composed in advance and
    trimmed); decoding composes it lazily against each utterance.
    """

    acoustic: Automaton
    context_transducer: Automaton
    dictionary: Automaton
    ngram: Automaton
    cdm: Automaton
    obs_table: SymbolTable
    unit_table: SymbolTable
    phone_table: SymbolTable
    word_table: SymbolTable
    context: ContextSpec


def build_observations(observations: Sequence[str], obs_table: SymbolTable,
                       semiring=TROPICAL) -> Automaton:
    """Linear acceptor assigning weight one to exactly this sequence."""
    if not observations:
        raise WfstError("observation sequence must be nonempty")
    out = Automaton(semiring, obs_table, obs_table)
    out.add_states(len(observations) + 1)
    for i, obs in enumerate(observations):
        sym = obs_table.lookup(obs)
        out.add_arc(i, sym, sym, semiring.one, i + 1)
    out.set_final(len(observations), semiring.one)
    return out.freeze()


def _model_automaton(model: PhoneModelSpec, obs_table, unit_table) -> Automaton:
    out = Automaton(TROPICAL, obs_table, unit_table)
    n = model.num_states
    out.add_states(n + 1)
    unit = unit_table.lookup(model.unit)
    for j in range(n):
        emissions = sorted(model.emissions[j].items(),
                           key=lambda kv: obs_table.lookup(kv[0]))
        for obs, ew in emissions:
            sym = obs_table.lookup(obs)
            if not math.isinf(model.loop[j]):
                out.add_arc(j, sym, EPSILON, model.loop[j] + ew, j)
            olabel = unit if j == n - 1 else EPSILON
            out.add_arc(j, sym, olabel, model.advance[j] + ew, j + 1)
    out.set_final(n, TROPICAL.one)
    return out.freeze()


def build_acoustic(models: Sequence[PhoneModelSpec], obs_table: SymbolTable,
                   unit_table: SymbolTable | None = None) -> Automaton:
    """Observation-to-unit transducer: closure of the union of the models.

    Each path through one model consumes one observation per transition
    and emits the model's unit exactly once, on the final advance.
    """
    if not models:
        raise WfstError("need at least one phone model")
    if unit_table is None:
        unit_table = SymbolTable.from_symbols(m.unit for m in models)
    for m in models:
        m.validate()
    parts = [_model_automaton(m, obs_table, unit_table) for m in models]
    return closure(parts[0] if len(parts) == 1 else union(*parts))


def _pronunciation_automaton(word: str, phones, weight, phone_table,
                             word_table) -> Automaton:
    # Word symbol and pronunciation weight ride on the last phone arc, so
    # during decoding a hypothesis pays its word and language-model costs
    # only once the whole pronunciation is supported; that keeps the best
    # path within a small margin of every live prefix, which is what lets
    # a narrow beam work.
    out = Automaton(TROPICAL, phone_table, word_table)
    out.add_states(len(phones) + 1)
    wid = word_table.lookup(word)
    last = len(phones) - 1
    for i, phone in enumerate(phones):
        olabel = wid if i == last else EPSILON
        w = weight if i == last else TROPICAL.one
        out.add_arc(i, phone_table.lookup(phone), olabel, w, i + 1)
    out.set_final(len(phones), TROPICAL.one)
    return out.freeze()


def build_dictionary(words: Sequence[WordModelSpec], phone_table: SymbolTable,
                     word_table: SymbolTable | None = None) -> Automaton:
    """Phone-to-word transducer: closure of the union of the word models.

    The word symbol and the pronunciation weight ride on the first phone
    arc of each pronunciation.
    """
    if not words:
        raise EmptyVocabulary("need at least one word model")
    seen = set()
    for w in words:
        if w.word in seen:
            raise DuplicateWord(f"word {w.word!r} given twice")
        seen.add(w.word)
        w.validate()
    if word_table is None:
        word_table = SymbolTable.from_symbols(w.word for w in words)
    parts = []
    for w in words:
        prons = [
            _pronunciation_automaton(w.word, phones, weight, phone_table, word_table)
            for phones, weight in w.pronunciations
        ]
        parts.append(prons[0] if len(prons) == 1 else union(*prons))
    return closure(parts[0] if len(parts) == 1 else union(*parts))


def build_context_transducer(spec: ContextSpec,
                             unit_table: SymbolTable | None = None,
                             phone_table: SymbolTable | None = None) -> Automaton:
    """Map context-dependent units to phones, enforcing their neighborhoods.

    A unit ``p/l_r`` is accepted only where the previous phone was ``l``
    (the boundary marker at the sentence start) and the next phone will
    be ``r`` (boundary at the end).  Each non-start state is a pair
    (previous phone, committed next phone or boundary); committing to the
    boundary makes the state final and closes the string.  Works the same
    across word boundaries, which is the point.
    """
    if unit_table is None:
        unit_table = SymbolTable.from_symbols(spec.unit_names())
    if phone_table is None:
        phone_table = SymbolTable.from_symbols(spec.phones)
    contexts = spec.contexts()
    out = Automaton(TROPICAL, unit_table, phone_table)
    out.add_state()  # 0: start, nothing consumed yet
    state_of = {}
    for p in spec.phones:
        for r in contexts:
            state_of[p, r] = out.add_state()
    one = TROPICAL.one

    def arcs_consuming(src, prev, phone):
        pid = phone_table.lookup(phone)
        for r in contexts:
            uid = unit_table.lookup(spec.unit_name(phone, prev, r))
            out.add_arc(src, uid, pid, one, state_of[phone, r])

    for p in spec.phones:
        arcs_consuming(0, spec.boundary, p)
    for (prev, expect), src in state_of.items():
        if expect == spec.boundary:
            continue
        arcs_consuming(src, prev, expect)
    out.set_final(0, one)
    for p in spec.phones:
        out.set_final(state_of[p, spec.boundary], one)
    return out.freeze()


def build_ngram(counts: dict, vocabulary: Sequence[str],
                word_table: SymbolTable | None = None) -> Automaton:
    """Bigram acceptor with add-one smoothing.

    One state per history word plus a start state; arc weights are
    negative log conditional probabilities, and end-of-sentence mass sits
    in the final weights, so each state's outgoing mass (arcs plus final)
    normalizes.  No back-off arcs: every event gets its smoothed count.
    """
    vocabulary = list(vocabulary)
    if not vocabulary:
        raise EmptyVocabulary("bigram model needs a vocabulary")
    if word_table is None:
        word_table = SymbolTable.from_symbols(vocabulary)
    out = Automaton(TROPICAL, word_table, word_table)
    out.add_states(1 + len(vocabulary))
    state_of = {w: i + 1 for i, w in enumerate(vocabulary)}

    for history, src in [(START_TOKEN, 0)] + [(w, state_of[w]) for w in vocabulary]:
        total = sum(counts.get((history, w), 0) for w in vocabulary)
        total += counts.get((history, END_TOKEN), 0)
        denom = total + len(vocabulary) + 1
        for w in vocabulary:
            p = (counts.get((history, w), 0) + 1) / denom
            wid = word_table.lookup(w)
            out.add_arc(src, wid, wid, -math.log(p), state_of[w])
        p_end = (counts.get((history, END_TOKEN), 0) + 1) / denom
        out.set_final(src, -math.log(p_end))
    return out.freeze()


def expand_context_models(models: Sequence[PhoneModelSpec],
                          spec: ContextSpec) -> list:
    """One model per context-dependent unit, cloning each base phone model.

    Emission and duration parameters are shared across contexts; only the
    emitted unit symbol differs.
    """
    by_phone = {m.unit: m for m in models}
    missing = [p for p in spec.phones if p not in by_phone]
    if missing:
        raise WfstError(f"no phone model for {missing}")
    return [
        replace(by_phone[p], unit=spec.unit_name(p, l, r))
        for p in spec.phones
        for l in spec.contexts()
        for r in spec.contexts()
    ]


def build_cascade(phone_models: Sequence[PhoneModelSpec],
                  word_models: Sequence[WordModelSpec],
                  bigram_counts: dict,
                  context: ContextSpec | None = None) -> CascadeModels:
    """Build the full chain with shared symbol tables.

    `phone_models` are base (context-independent) phones; they are cloned
    across all contexts to form the acoustic transducer's units.
    """
    if context is None:
        context = ContextSpec(tuple(m.unit for m in phone_models))
    obs_symbols = []
    for m in phone_models:
        for emis in m.emissions:
            for obs in emis:
                if obs not in obs_symbols:
                    obs_symbols.append(obs)
    obs_table = SymbolTable.from_symbols(obs_symbols)
    unit_table = SymbolTable.from_symbols(context.unit_names())
    phone_table = SymbolTable.from_symbols(context.phones)
    word_table = SymbolTable.from_symbols(w.word for w in word_models)

    acoustic = build_acoustic(expand_context_models(phone_models, context),
                              obs_table, unit_table)
    ctx = build_context_transducer(context, unit_table, phone_table)
    dictionary = build_dictionary(word_models, phone_table, word_table)
    ngram = build_ngram(bigram_counts, [w.word for w in word_models], word_table)
    # Compose the static tail in advance; composition is associative, so
    # decoding over (O o A) o (C o D o M) equals the one-shot cascade, but
    # the precomposed (and trimmed) tail avoids re-deriving its epsilon
    # bookkeeping inside every utterance's product.
    cdm = trim(compose(compose(ctx, dictionary), ngram))
    return CascadeModels(acoustic, ctx, dictionary, ngram, cdm,
                         obs_table, unit_table, phone_table, word_table, context)


def decoding_chain(observations_automaton: Automaton,
                   models: CascadeModels) -> LazyComposition:
    """Lazy composition of the cascade for one utterance."""
    return compose_lazy(compose_lazy(observations_automaton, models.acoustic),
                        models.cdm)


def full_lazy_chain(observations_automaton: Automaton,
                    models: CascadeModels) -> LazyComposition:
    """The unstaged five-way lazy chain; table-equivalent to decoding_chain."""
    chain = compose_lazy(observations_automaton, models.acoustic)
    chain = compose_lazy(chain, models.context_transducer)
    chain = compose_lazy(chain, models.dictionary)
    return compose_lazy(chain, models.ngram)


def recognize(observations: Sequence[str], models: CascadeModels,
              beam: float | None = None) -> SearchResult:
    """Best word sequence for an observation sequence.

    Decodes over the lazily composed cascade; the output ids of the
    returned path are word ids in ``models.word_table``.  Raises
    NoAcceptingPath when the observations fit no word sequence.
    """
    o = build_observations(observations, models.obs_table)
    return best_path(decoding_chain(o, models), beam)


# -- synthetic corpus --------------------------------------------------------


@dataclass(frozen=True)
class Utterance:
    words: tuple
    phones: tuple
    observations: tuple


def demo_inventory():
    """Fixed desk-scale inventory: 4 phones, 10 words of 3 or 4 phones.

    Emissions put mass 0.88 on the phone's own observation symbol and
    0.04 on each other symbol; every phone model has one emitting state
    with self-loop probability 0.4.  The lexicon is built so clean
    utterances decode exactly: every word starts with the only 'a' it
    contains and no valid sentence ever repeats a phone adjacently, so
    observation runs map one-to-one onto phones and the phone string
    parses into words uniquely.  Bigram counts are kept in {0, 1}: their
    log-2 spread per event is far below one mismatched-run emission cost,
    so the generating sentence is always the argmin on clean input.
    """
    phones = ("a", "b", "c", "d")
    obs = tuple(f"o{p}" for p in phones)
    own, other = -math.log(0.88), -math.log(0.04)
    phone_models = []
    for p in phones:
        emis = {o: (own if o == f"o{p}" else other) for o in obs}
        phone_models.append(PhoneModelSpec(
            unit=p,
            loop=(-math.log(0.4),),
            advance=(-math.log(0.6),),
            emissions=(emis,),
        ))
    pron_strings = ["abc", "abd", "acb", "acd", "adb", "adc",
                    "abcb", "abdb", "acbc", "adcd"]
    word_models = [
        WordModelSpec(word=s, pronunciations=((tuple(s), 0.0),))
        for s in pron_strings
    ]
    counts = {}
    for i, w1 in enumerate(pron_strings):
        counts[START_TOKEN, w1] = i % 3
        counts[w1, END_TOKEN] = 1
        for j, w2 in enumerate(pron_strings):
            counts[w1, w2] = (i + j) % 3
    return phone_models, word_models, counts


def _sample_event(rng, weighted_events):
    """Draw one event from [(event, probability), ...]."""
    x = rng.random()
    acc = 0.0
    for event, p in weighted_events:
        acc += p
        if x < acc:
            return event
    return weighted_events[-1][0]


def sample_utterances(phone_models: Sequence[PhoneModelSpec],
                      word_models: Sequence[WordModelSpec],
                      bigram_counts: dict,
                      count: int, seed: int,
                      noise: float = 0.0,
                      max_words: int = 3) -> list:
    """Draw utterances from the generative cascade with a fixed seed.

    Word sequences follow the add-one-smoothed bigram model (resampling
    an immediate end so every utterance has at least one word), and
    pronunciations follow their dictionary weights.  Observations are
    each state's modal symbol, held for a model-distributed number of
    frames; `noise` is the per-frame probability of replacing the frame
    with a uniformly random observation symbol.  Noiseless utterances
    are therefore exactly decodable by construction.
    """
    rng = random.Random(seed)
    vocab = [w.word for w in word_models]
    by_word = {w.word: w for w in word_models}
    by_phone = {m.unit: m for m in phone_models}
    obs_symbols = sorted({o for m in phone_models for e in m.emissions for o in e})

    def next_word(history, allow_end):
        total = sum(bigram_counts.get((history, w), 0) for w in vocab)
        total += bigram_counts.get((history, END_TOKEN), 0)
        denom = total + len(vocab) + 1
        events = [(w, (bigram_counts.get((history, w), 0) + 1) / denom)
                  for w in vocab]
        if allow_end:
            events.append(
                (END_TOKEN, (bigram_counts.get((history, END_TOKEN), 0) + 1) / denom))
        else:
            scale = sum(p for _, p in events)
            events = [(w, p / scale) for w, p in events]
        return _sample_event(rng, events)

    utterances = []
    for _ in range(count):
        words = []
        history = START_TOKEN
        while len(words) < max_words:
            w = next_word(history, allow_end=bool(words))
            if w == END_TOKEN:
                break
            words.append(w)
            history = w
        phones = []
        for w in words:
            prons = by_word[w].pronunciations
            probs = [math.exp(-wt) for _, wt in prons]
            norm = sum(probs)
            choice = _sample_event(
                rng, [(ph, p / norm) for (ph, _), p in zip(prons, probs)])
            phones.extend(choice)
        observations = []
        for phone in phones:
            model = by_phone[phone]
            for j in range(model.num_states):
                modal = min(model.emissions[j], key=lambda o: model.emissions[j][o])
                p_loop = math.exp(-model.loop[j])
                while True:
                    if noise > 0.0 and rng.random() < noise:
                        observations.append(rng.choice(obs_symbols))
                    else:
                        observations.append(modal)
                    if rng.random() >= p_loop:
                        break
        utterances.append(Utterance(tuple(words), tuple(phones), tuple(observations)))
    return utterances


# -- line-oriented spec files ------------------------------------------------


def _fmt(w: float) -> str:
    return "inf" if math.isinf(w) else repr(float(w))


def parse_phone_models(text: str) -> list:
    """Lines ``unit state loop_w adv_w obs:weight,...`` grouped into models."""
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ParseError("expected 'unit state loop adv obs:w,...'", lineno)
        unit, state, loop, adv, emis = fields
        try:
            state = int(state)
            loop = float(loop)
            adv = float(adv)
            emissions = {}
            for item in emis.split(","):
                obs, w = item.rsplit(":", 1)
                emissions[obs] = float(w)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        rows.setdefault(unit, {})[state] = (loop, adv, emissions)
    models = []
    for unit, states in rows.items():
        if sorted(states) != list(range(len(states))):
            raise ParseError(f"model {unit!r}: states must be 0..n-1")
        ordered = [states[j] for j in range(len(states))]
        models.append(PhoneModelSpec(
            unit=unit,
            loop=tuple(loop for loop, _, _ in ordered),
            advance=tuple(adv for _, adv, _ in ordered),
            emissions=tuple(emis for _, _, emis in ordered),
        ))
    return models


def format_phone_models(models: Iterable[PhoneModelSpec]) -> str:
    lines = []
    for m in models:
        for j in range(m.num_states):
            emis = ",".join(f"{o}:{_fmt(w)}" for o, w in sorted(m.emissions[j].items()))
            lines.append(f"{m.unit} {j} {_fmt(m.loop[j])} {_fmt(m.advance[j])} {emis}")
    return "\n".join(lines) + "\n"


def parse_lexicon(text: str) -> list:
    """Lines ``word phone+ weight``; repeated words add pronunciations."""
    prons = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 3:
            raise ParseError("expected 'word phone+ weight'", lineno)
        try:
            weight = float(fields[-1])
        except ValueError:
            raise ParseError(f"bad weight {fields[-1]!r}", lineno) from None
        prons.setdefault(fields[0], []).append((tuple(fields[1:-1]), weight))
    return [WordModelSpec(word=w, pronunciations=tuple(ps))
            for w, ps in prons.items()]


def format_lexicon(words: Iterable[WordModelSpec]) -> str:
    lines = []
    for w in words:
        for phones, weight in w.pronunciations:
            lines.append(f"{w.word} {' '.join(phones)} {_fmt(weight)}")
    return "\n".join(lines) + "\n"


def parse_bigram_counts(text: str) -> dict:
    """Lines ``w1 w2 count``; ``<s>`` and ``</s>`` mark sentence edges."""
    counts = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError("expected 'w1 w2 count'", lineno)
        try:
            n = int(fields[2])
        except ValueError:
            raise ParseError(f"bad count {fields[2]!r}", lineno) from None
        if n < 0:
            raise ParseError("counts must be nonnegative", lineno)
        counts[fields[0], fields[1]] = n
    return counts


def format_bigram_counts(counts: dict) -> str:
    lines = [f"{w1} {w2} {n}" for (w1, w2), n in counts.items()]
    return "\n".join(lines) + "\n"
