"""Constrained lyric generation.

Rhyme words are chosen by look-ahead scoring, rhyme lines are built
backward from their final word by mask infilling, non-rhyme lines are
sampled forward under a syllable budget, and one candidate per segment
is picked in proportion to its model likelihood.  All randomness flows
through a single seeded PCG64 generator, so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace, asdict
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .lm.base import LanguageModel, detokenize, word_tokenize
from .phonetics import PhoneticDictionary, syllable_count_text, syllable_count_word
from .postprocess import apply_macros
from .rhyme import RhymeDictionary, RhymeError, rhyming_candidates, words_near_rhyme
from .scheme import (
    NoRhyme,
    RhymeIndex,
    RhymeLiteral,
    RhymeMap,
    Scheme,
    Segment,
    validate_scheme,
)


class GenerationError(RuntimeError):
    pass


class GenerationExhausted(GenerationError):
    """No candidate line survived the attempt budget."""


@dataclass
class GenerationConfig:
    n: int = 10                 # candidate attempts per line
    m: int = 8                  # look-ahead length for rhyme selection
    rhyme_targets_j: int = 2    # rhyme words tried per segment
    top_k: int = 40             # forward sampling pool
    temperature: float = 1.0
    seed: int = 0
    recontextualize: bool = False
    allow_fewer_syllables_fallback: bool = True
    interactive: bool = False
    infill_top_k: int = 32      # entries scanned per mask slot

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1 or self.rhyme_targets_j < 1 or self.top_k < 1:
            raise ValueError("n, m, rhyme_targets_j and top_k must all be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.infill_top_k < 1:
            raise ValueError("infill_top_k must be >= 1")

    @classmethod
    def from_key_value_text(cls, text: str) -> "GenerationConfig":
        """Parse a plain ``key=value`` config file."""
        ints = {"n", "m", "rhyme_targets_j", "top_k", "seed", "infill_top_k"}
        floats = {"temperature"}
        bools = {"recontextualize", "allow_fewer_syllables_fallback", "interactive"}
        kwargs: Dict[str, object] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ValueError(f"config line {line_no}: expected key=value")
            if key in ints:
                kwargs[key] = int(value)
            elif key in floats:
                kwargs[key] = float(value)
            elif key in bools:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"config line {line_no}: bad boolean {value!r}")
                kwargs[key] = value.lower() in ("true", "1", "yes")
            else:
                raise ValueError(f"config line {line_no}: unknown key {key!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class CandidateLine:
    text: str
    tokens: Tuple[str, ...]
    syllable_count: int
    end_word: str
    ends_sentence: bool
    score: float            # length-normalized log-likelihood once picked
    origin: str             # backward | forward | literal

    def to_dict(self) -> Dict:
        return {
            "text": self.text,
            "tokens": list(self.tokens),
            "syllable_count": self.syllable_count,
            "end_word": self.end_word,
            "ends_sentence": self.ends_sentence,
            "score": self.score,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CandidateLine":
        return cls(
            text=data["text"],
            tokens=tuple(data["tokens"]),
            syllable_count=data["syllable_count"],
            end_word=data["end_word"],
            ends_sentence=data["ends_sentence"],
            score=data["score"],
            origin=data["origin"],
        )


@dataclass
class SegmentRecord:
    candidates: List[CandidateLine]
    chosen_index: int
    target_words: List[str] = field(default_factory=list)
    degraded: bool = False
    shortfall: bool = False

    def to_dict(self) -> Dict:
        return {
            "candidates": [c.to_dict() for c in self.candidates],
            "chosen_index": self.chosen_index,
            "target_words": list(self.target_words),
            "degraded": self.degraded,
            "shortfall": self.shortfall,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SegmentRecord":
        return cls(
            candidates=[CandidateLine.from_dict(c) for c in data["candidates"]],
            chosen_index=data["chosen_index"],
            target_words=list(data["target_words"]),
            degraded=data["degraded"],
            shortfall=data["shortfall"],
        )


@dataclass
class LyricsResult:
    lines: List[str]
    raw_lines: List[str]
    rhyme_map: RhymeMap
    records: List[List[SegmentRecord]]
    config: GenerationConfig
    degraded: bool
    notes: List[str]

    def to_dict(self) -> Dict:
        return {
            "lines": list(self.lines),
            "raw_lines": list(self.raw_lines),
            "rhyme_map": {str(k): v for k, v in self.rhyme_map.as_dict().items()},
            "records": [[r.to_dict() for r in line] for line in self.records],
            "config": asdict(self.config),
            "degraded": self.degraded,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "LyricsResult":
        return cls(
            lines=list(data["lines"]),
            raw_lines=list(data["raw_lines"]),
            rhyme_map=RhymeMap({int(k): v for k, v in data["rhyme_map"].items()}),
            records=[
                [SegmentRecord.from_dict(r) for r in line] for line in data["records"]
            ],
            config=GenerationConfig(**data["config"]),
            degraded=data["degraded"],
            notes=list(data["notes"]),
        )


def _token_allowed(token: str, used: Iterable[str]) -> bool:
    """Reject repeats, punctuation, numbers, line breaks, non-letters."""
    if "\n" in token or "\r" in token:
        return False
    if not any(ch.isalpha() for ch in token):
        return False
    return token.lower() not in used


def _sample_index(rng: np.random.Generator, logits: Sequence[float], temperature: float) -> int:
    """Softmax-sample an index; temperatures below 1e-6 mean argmax."""
    scores = np.asarray(logits, dtype=np.float64)
    if temperature < 1e-6:
        return int(np.argmax(scores))
    z = scores / temperature
    z = z - z.max()
    probs = np.exp(z)
    probs = probs / probs.sum()
    return int(rng.choice(len(probs), p=probs))


def _make_rng(config: GenerationConfig) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(config.seed))


def _end_word(tokens: Sequence[str]) -> str:
    for tok in reversed(tokens):
        if any(ch.isalpha() for ch in tok):
            return tok.lower()
    return ""


def _make_candidate(
    dictionary: PhoneticDictionary,
    tokens: Sequence[str],
    text: str,
    origin: str,
) -> CandidateLine:
    return CandidateLine(
        text=text,
        tokens=tuple(tokens),
        syllable_count=syllable_count_text(dictionary, text),
        end_word=_end_word(tokens),
        ends_sentence=text.endswith("."),
        score=float("nan"),
        origin=origin,
    )


def recontextualize(context: str, prompt: str) -> str:
    """Splice the prompt into the context just after its last period.

    With no period present the prompt is prepended.  Splices steer the
    model back on topic and never appear in output lines.
    """
    if not prompt:
        return context
    idx = context.rfind(".")
    if idx < 0:
        return (prompt + " " + context).strip()
    after = context[idx + 1 :].strip()
    parts = [context[: idx + 1], prompt]
    if after:
        parts.append(after)
    return " ".join(parts)


def select_rhyme_words(
    model: LanguageModel,
    context: str,
    anchor: str,
    rdict: RhymeDictionary,
    config: GenerationConfig,
    rng: Optional[np.random.Generator] = None,
    exclude: Iterable[str] = (),
) -> List[str]:
    """Rank rhyme candidates for ``anchor`` by look-ahead mean logit.

    Samples n continuations of m tokens; at every position each pool
    word's logit in the (full, where available) distribution is recorded,
    with absent words floored at one below the distribution minimum.
    Returns the top ``rhyme_targets_j`` words by mean logit.
    """
    rng = rng if rng is not None else _make_rng(config)
    pool = rhyming_candidates(rdict, anchor)
    pool -= {w.lower() for w in exclude}
    pool.discard(anchor.lower())
    if not pool:
        raise GenerationError(f"no rhymes available for {anchor!r}")
    pool_words = sorted(pool)
    sums = {w: 0.0 for w in pool_words}
    context_tokens = word_tokenize(context)
    for _ in range(config.n):
        sequence = list(context_tokens)
        for _ in range(config.m):
            dist = model.full_forward_distribution(sequence)
            if dist is None:
                dist = model.next_token_distribution(sequence, config.top_k)
            floor = min(dist.logits) - 1.0
            lookup = dict(dist.entries)
            for word in pool_words:
                logit = lookup.get(word)
                sums[word] += logit if logit is not None else floor
            top = dist.entries[: config.top_k]
            idx = _sample_index(rng, [lg for _, lg in top], config.temperature)
            sequence.append(top[idx][0])
    positions = config.n * config.m
    ranked = sorted(pool_words, key=lambda w: (-(sums[w] / positions), w))
    return ranked[: config.rhyme_targets_j]


def _fill_masks(
    model: LanguageModel,
    context_tokens: List[str],
    mask_count: int,
    suffix_tokens: List[str],
    config: GenerationConfig,
) -> Optional[List[str]]:
    """Fill mask slots last-to-first, taking the most likely legal token."""
    filled: Dict[int, str] = {}
    used = {t.lower() for t in suffix_tokens if any(ch.isalpha() for ch in t)}
    for slot in range(mask_count - 1, -1, -1):
        dist = model.infill_distribution(
            context_tokens,
            mask_count,
            slot,
            filled,
            suffix_tokens,
            top_k=config.infill_top_k,
        )
        chosen = None
        for token, _ in dist.entries:
            if _token_allowed(token, used):
                chosen = token
                break
        if chosen is None:
            return None
        filled[slot] = chosen
        used.add(chosen.lower())
    return [filled[i] for i in range(mask_count)]


def generate_rhyme_lines(
    model: LanguageModel,
    target: str,
    context: str,
    syllables: int,
    end_sentence: bool,
    config: GenerationConfig,
    dictionary: PhoneticDictionary,
    on_mask_attempt: Optional[Callable[[int], None]] = None,
) -> List[CandidateLine]:
    """Backward-generate lines that end with ``target``.

    Each of the 2n attempts tries mask counts 1..ceil(syllables*1.5);
    half the attempts suffix the target with a period (all of them when
    the segment ends a sentence).  Only exact syllable counts are kept,
    unless none exist and the fewer-syllables fallback is on.
    """
    if not model.capabilities.infill:
        raise GenerationError("backend does not support infill")
    target_text = target.strip()
    target_tokens = word_tokenize(target_text)
    if not target_tokens:
        raise GenerationError("empty rhyme target")
    target_syllables = syllable_count_text(dictionary, target_text)
    if target_syllables > syllables:
        raise GenerationError(
            f"target {target_text!r} has {target_syllables} syllables, "
            f"segment allows {syllables}"
        )
    context_tokens = word_tokenize(context)
    budget = math.ceil(syllables * 1.5)

    exact: List[Tuple[List[str], bool]] = []
    below: List[Tuple[int, List[str], bool]] = []
    fill_cache: Dict[Tuple[bool, int], Optional[List[str]]] = {}
    for attempt in range(config.n * 2):
        with_period = end_sentence or attempt >= config.n
        suffix_tokens = target_tokens + ["."] if with_period else list(target_tokens)
        for mask_count in range(1, budget + 1):
            if on_mask_attempt is not None:
                on_mask_attempt(mask_count)
            key = (with_period, mask_count)
            if key not in fill_cache:
                fill_cache[key] = _fill_masks(
                    model, context_tokens, mask_count, suffix_tokens, config
                )
            fill = fill_cache[key]
            if fill is None:
                continue
            count = target_syllables + syllable_count_text(dictionary, detokenize(fill))
            if count == syllables:
                exact.append((fill, with_period))
            elif count < syllables:
                below.append((count, fill, with_period))

    kept: List[Tuple[List[str], bool]]
    shortfall = False
    if exact:
        kept = exact
    elif below and config.allow_fewer_syllables_fallback:
        best = max(count for count, _, _ in below)
        kept = [(fill, wp) for count, fill, wp in below if count == best]
        shortfall = True
    else:
        raise GenerationExhausted(
            f"backward generation exhausted for target {target_text!r}"
        )

    candidates = []
    for fill, with_period in kept:
        keep_period = with_period and end_sentence
        text = detokenize(fill) + " " + target_text if fill else target_text
        tokens = list(fill) + list(target_tokens)
        if keep_period:
            text += "."
            tokens.append(".")
        candidate = _make_candidate(dictionary, tokens, text, "backward")
        if shortfall:
            candidate = replace(candidate, origin="backward")
        candidates.append(candidate)
    return candidates


def generate_non_rhyme_lines(
    model: LanguageModel,
    context: str,
    syllables: int,
    config: GenerationConfig,
    dictionary: PhoneticDictionary,
    rng: Optional[np.random.Generator] = None,
    terminal: bool = False,
) -> List[CandidateLine]:
    """Sample lines forward, one token at a time, to an exact syllable count.

    Attempts that overshoot the budget are discarded; every returned
    candidate counts exactly ``syllables``.
    """
    rng = rng if rng is not None else _make_rng(config)
    context_tokens = word_tokenize(context)
    candidates = []
    for _ in range(config.n):
        tokens: List[str] = []
        used: set = set()
        count = 0
        completed = False
        while True:
            dist = model.next_token_distribution(context_tokens + tokens, config.top_k)
            allowed = [(t, lg) for t, lg in dist.entries if _token_allowed(t, used)]
            if not allowed:
                break
            idx = _sample_index(rng, [lg for _, lg in allowed], config.temperature)
            token = allowed[idx][0]
            token_syllables = syllable_count_word(dictionary, token)
            if count + token_syllables > syllables:
                break  # overshot: the whole line is discarded
            tokens.append(token)
            used.add(token.lower())
            count += token_syllables
            if count == syllables:
                completed = True
                break
        if not completed:
            continue
        if terminal:
            text = detokenize(tokens) + "."
            tokens = tokens + ["."]
        else:
            text = detokenize(tokens)
        candidates.append(_make_candidate(dictionary, tokens, text, "forward"))
    if not candidates:
        raise GenerationExhausted("forward generation exhausted")
    return candidates


def generate_terminal_non_rhyme_lines(
    model: LanguageModel,
    context: str,
    syllables: int,
    config: GenerationConfig,
    dictionary: PhoneticDictionary,
    rng: Optional[np.random.Generator] = None,
) -> List[CandidateLine]:
    """Forward generation that closes the sentence with a period."""
    return generate_non_rhyme_lines(
        model, context, syllables, config, dictionary, rng=rng, terminal=True
    )


def _normalized_scores(
    model: LanguageModel, candidates: Sequence[CandidateLine], context: str
) -> np.ndarray:
    context_tokens = word_tokenize(context)
    return np.array(
        [
            model.sequence_log_likelihood(context_tokens, list(c.tokens))
            / len(c.tokens)
            for c in candidates
        ],
        dtype=np.float64,
    )


def pick_best_candidate(
    model: LanguageModel,
    candidates: Sequence[CandidateLine],
    context: str,
    config: GenerationConfig,
    rng: Optional[np.random.Generator] = None,
) -> CandidateLine:
    """Sample a candidate proportionally to its normalized likelihood."""
    if not candidates:
        raise GenerationError("no candidates to pick from")
    rng = rng if rng is not None else _make_rng(config)
    scores = _normalized_scores(model, candidates, context)
    idx = _sample_index(rng, scores, config.temperature)
    return replace(candidates[idx], score=float(scores[idx]))


class GenerationSession:
    """Stepwise engine over one scheme: produce candidates, take choices.

    Batch generation is the same machine auto-choosing its own sampled
    pick, so an interactive session that always accepts ``sampled_index``
    reproduces ``generate_lyrics`` byte for byte.
    """

    def __init__(
        self,
        model: LanguageModel,
        prompt: str,
        scheme: Scheme,
        seeds: Optional[RhymeMap],
        config: GenerationConfig,
        dictionary: PhoneticDictionary,
        rdict: RhymeDictionary,
    ):
        violations = validate_scheme(scheme, dictionary)
        if violations:
            raise GenerationError(
                "invalid scheme: " + "; ".join(str(v) for v in violations)
            )
        self.model = model
        self.prompt = prompt
        self.scheme = scheme
        self.config = config
        self.dictionary = dictionary
        self.rdict = rdict
        self.rng = _make_rng(config)
        self.context = prompt
        self.rhyme_map = seeds.copy() if seeds is not None else RhymeMap()
        self.line_index = 0
        self.segment_index = 0
        self.records: List[List[SegmentRecord]] = [[] for _ in scheme.lines]
        self._segment_texts: List[List[str]] = [[] for _ in scheme.lines]
        self.raw_lines: List[str] = []
        self.status = "running"
        self.pending: List[CandidateLine] = []
        self.sampled_index: Optional[int] = None
        self._pending_meta: Dict = {}
        self.notes: List[str] = []
        self.degraded = False
        self.result: Optional[LyricsResult] = None

    @property
    def cursor(self) -> Tuple[int, int]:
        return (self.line_index, self.segment_index)

    def _current_segment(self) -> Segment:
        return self.scheme.lines[self.line_index][self.segment_index]

    def _forward_candidates(self, syllables: int, end: bool) -> List[CandidateLine]:
        return generate_non_rhyme_lines(
            self.model,
            self.context,
            syllables,
            self.config,
            self.dictionary,
            rng=self.rng,
            terminal=end,
        )

    def _rhyme_candidates_for_targets(
        self, targets: List[str], syllables: int, end: bool
    ) -> List[CandidateLine]:
        pooled: List[CandidateLine] = []
        errors: List[str] = []
        for target in targets:
            try:
                pooled.extend(
                    generate_rhyme_lines(
                        self.model,
                        target,
                        self.context,
                        syllables,
                        end,
                        self.config,
                        self.dictionary,
                    )
                )
            except GenerationExhausted as exc:
                errors.append(str(exc))
        if not pooled:
            raise GenerationExhausted("; ".join(errors) or "no rhyme candidates")
        return pooled

    def _degraded_rhyme_fallback(
        self, syllables: int, end: bool, anchor: Optional[str]
    ) -> List[CandidateLine]:
        """Forward generation when backward generation is unavailable;
        candidates that happen to rhyme with the anchor are preferred."""
        candidates = self._forward_candidates(syllables, end)
        if anchor:
            rhyming = []
            for candidate in candidates:
                try:
                    if words_near_rhyme(
                        self.dictionary, candidate.end_word, anchor, self.rdict.table
                    ):
                        rhyming.append(candidate)
                except RhymeError:
                    continue
            if rhyming:
                return rhyming
        return candidates

    def _prepare_segment(self) -> None:
        """Generate the pending candidate set for the cursor segment."""
        segment = self._current_segment()
        spec = segment.rhyme
        syllables, end = segment.syllables, segment.end_sentence
        meta: Dict = {"bind": None, "degraded": False, "targets": []}

        if isinstance(spec, RhymeLiteral):
            phrase_syllables = syllable_count_text(self.dictionary, spec.phrase)
            if phrase_syllables == syllables:
                # emitted verbatim, no generation and no choice
                text = spec.phrase + "." if end else spec.phrase
                self._apply_verbatim(
                    _make_candidate(self.dictionary, word_tokenize(text), text, "literal")
                )
                return
            meta["targets"] = [spec.phrase]
            if self.model.capabilities.infill:
                candidates = self._rhyme_candidates_for_targets(
                    [spec.phrase], syllables, end
                )
            else:
                candidates = self._degraded_literal_fallback(spec.phrase, syllables, end)
                meta["degraded"] = True
        elif isinstance(spec, RhymeIndex) and spec.index in self.rhyme_map:
            anchor = self.rhyme_map.anchor(spec.index)
            bound = self.rhyme_map.words(spec.index)
            meta["bind"] = ["append", spec.index]
            if not self.model.capabilities.infill:
                candidates = self._degraded_rhyme_fallback(syllables, end, anchor)
                meta["degraded"] = True
            else:
                try:
                    targets = select_rhyme_words(
                        self.model,
                        self.context,
                        anchor,
                        self.rdict,
                        self.config,
                        rng=self.rng,
                        exclude=bound,
                    )
                    targets = [
                        t
                        for t in targets
                        if syllable_count_text(self.dictionary, t) <= syllables
                    ]
                except GenerationError:
                    targets = []
                if targets:
                    meta["targets"] = targets
                    candidates = self._rhyme_candidates_for_targets(
                        targets, syllables, end
                    )
                else:
                    # empty rhyme pool: fall back to forward generation
                    candidates = self._forward_candidates(syllables, end)
                    meta["degraded"] = True
        else:
            if isinstance(spec, RhymeIndex):
                meta["bind"] = ["anchor", spec.index]
            candidates = self._forward_candidates(syllables, end)

        scores = _normalized_scores(self.model, candidates, self.context)
        sampled = _sample_index(self.rng, scores, self.config.temperature)
        self.pending = [
            replace(c, score=float(s)) for c, s in zip(candidates, scores)
        ]
        self.sampled_index = sampled
        self._pending_meta = meta
        self.status = "awaiting_choice"

    def _degraded_literal_fallback(
        self, phrase: str, syllables: int, end: bool
    ) -> List[CandidateLine]:
        """Without infill, forward-generate the remainder then append the
        literal phrase so the constraint still holds."""
        remainder = syllables - syllable_count_text(self.dictionary, phrase)
        lead_candidates = self._forward_candidates(remainder, end=False)
        out = []
        for lead in lead_candidates:
            text = lead.text + " " + phrase + ("." if end else "")
            tokens = list(lead.tokens) + word_tokenize(phrase) + (["."] if end else [])
            out.append(_make_candidate(self.dictionary, tokens, text, "backward"))
        return out

    def _apply_verbatim(self, candidate: CandidateLine) -> None:
        record = SegmentRecord(
            candidates=[candidate], chosen_index=0, target_words=[], degraded=False
        )
        self._commit(candidate, record, meta={"bind": None, "degraded": False})

    def _commit(self, candidate: CandidateLine, record: SegmentRecord, meta: Dict) -> None:
        self.records[self.line_index].append(record)
        self._segment_texts[self.line_index].append(candidate.text)
        self.context = (self.context + " " + candidate.text).strip()
        bind = meta.get("bind")
        if bind is not None and candidate.end_word:
            self.rhyme_map.bind(bind[1], candidate.end_word)
        if meta.get("degraded"):
            self.degraded = True
            self.notes.append(
                f"line {self.line_index + 1} segment {self.segment_index + 1}: degraded generation"
            )
        self._advance_cursor()

    def _advance_cursor(self) -> None:
        self.segment_index += 1
        if self.segment_index >= len(self.scheme.lines[self.line_index]):
            self.raw_lines.append(" ".join(self._segment_texts[self.line_index]))
            self.segment_index = 0
            self.line_index += 1
        if self.line_index >= len(self.scheme.lines):
            self._finalize()
        else:
            self.status = "running"

    def _finalize(self) -> None:
        lines = apply_macros(self.raw_lines, self.scheme.macros)
        self.result = LyricsResult(
            lines=lines,
            raw_lines=list(self.raw_lines),
            rhyme_map=self.rhyme_map,
            records=self.records,
            config=self.config,
            degraded=self.degraded,
            notes=list(self.notes),
        )
        self.status = "complete"

    def step(self) -> None:
        """Run until a candidate choice is pending or generation is done."""
        if self.status in ("complete", "failed"):
            return
        try:
            while self.status == "running":
                if self.segment_index == 0 and self.config.recontextualize:
                    before = self.context
                    self.context = recontextualize(self.context, self.prompt)
                    if self.context != before:
                        self.notes.append(
                            f"recontextualized before line {self.line_index + 1}"
                        )
                self._prepare_segment()
        except GenerationError as exc:
            self.status = "failed"
            raise GenerationError(
                f"line {self.line_index + 1}, segment {self.segment_index + 1}: {exc}"
            ) from exc

    def choose(self, index: int) -> None:
        """Apply a pending candidate and continue to the next choice."""
        if self.status != "awaiting_choice":
            raise GenerationError(f"session is not awaiting a choice ({self.status})")
        if not 0 <= index < len(self.pending):
            raise GenerationError(
                f"choice {index} out of range (0..{len(self.pending) - 1})"
            )
        candidate = self.pending[index]
        record = SegmentRecord(
            candidates=list(self.pending),
            chosen_index=index,
            target_words=list(self._pending_meta.get("targets", [])),
            degraded=bool(self._pending_meta.get("degraded")),
        )
        self.pending = []
        self.sampled_index = None
        self._commit(candidate, record, self._pending_meta)
        if self.status == "running":
            self.step()

    def run_auto(self) -> LyricsResult:
        """Drive the session by always accepting the sampled pick."""
        self.step()
        while self.status == "awaiting_choice":
            assert self.sampled_index is not None
            self.choose(self.sampled_index)
        if self.status != "complete" or self.result is None:
            raise GenerationError(f"generation did not complete: {self.status}")
        return self.result

    def snapshot(self) -> Dict:
        """JSON-safe dump of the full session state, PRNG included."""
        from .scheme import serialize_scheme

        return {
            "prompt": self.prompt,
            "scheme": serialize_scheme(self.scheme),
            "config": asdict(self.config),
            "context": self.context,
            "rhyme_map": {str(k): v for k, v in self.rhyme_map.as_dict().items()},
            "line_index": self.line_index,
            "segment_index": self.segment_index,
            "records": [[r.to_dict() for r in line] for line in self.records],
            "segment_texts": [list(texts) for texts in self._segment_texts],
            "raw_lines": list(self.raw_lines),
            "status": self.status,
            "pending": [c.to_dict() for c in self.pending],
            "sampled_index": self.sampled_index,
            "pending_meta": self._pending_meta,
            "notes": list(self.notes),
            "degraded": self.degraded,
            "result": self.result.to_dict() if self.result else None,
            "rng_state": self.rng.bit_generator.state,
        }

    @classmethod
    def restore(
        cls,
        data: Dict,
        model: LanguageModel,
        dictionary: PhoneticDictionary,
        rdict: RhymeDictionary,
    ) -> "GenerationSession":
        from .scheme import parse_scheme

        scheme = parse_scheme(data["scheme"])
        config = GenerationConfig(**data["config"])
        session = cls(model, data["prompt"], scheme, None, config, dictionary, rdict)
        session.context = data["context"]
        session.rhyme_map = RhymeMap(
            {int(k): v for k, v in data["rhyme_map"].items()}
        )
        session.line_index = data["line_index"]
        session.segment_index = data["segment_index"]
        session.records = [
            [SegmentRecord.from_dict(r) for r in line] for line in data["records"]
        ]
        session._segment_texts = [list(texts) for texts in data["segment_texts"]]
        session.raw_lines = list(data["raw_lines"])
        session.status = data["status"]
        session.pending = [CandidateLine.from_dict(c) for c in data["pending"]]
        session.sampled_index = data["sampled_index"]
        session._pending_meta = data["pending_meta"]
        session.notes = list(data["notes"])
        session.degraded = data["degraded"]
        if data["result"]:
            session.result = LyricsResult.from_dict(data["result"])
        session.rng.bit_generator.state = data["rng_state"]
        return session


def generate_lyrics(
    model: LanguageModel,
    prompt: str,
    scheme: Scheme,
    seeds: Optional[RhymeMap],
    config: GenerationConfig,
    dictionary: PhoneticDictionary,
    rdict: RhymeDictionary,
) -> LyricsResult:
    """Run the full generation loop over a scheme and return the lyrics."""
    session = GenerationSession(
        model, prompt, scheme, seeds, config, dictionary, rdict
    )
    return session.run_auto()
