"""Pronunciation dictionary loading and syllable counting."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

# The 39 ARPABET phonemes.  Vowels carry a stress digit (0/1/2) in
# dictionary files; consonants never do.
ARPABET_VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
ARPABET_CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
ARPABET = ARPABET_VOWELS | ARPABET_CONSONANTS

_VOWEL_LETTERS = frozenset("aeiouy")


class PhoneticsError(ValueError):
    """Raised for malformed phonetic data."""


@dataclass(frozen=True)
class Phoneme:
    """A single ARPABET phoneme; stress is present only on vowels."""

    symbol: str
    stress: Optional[int] = None

    def __post_init__(self) -> None:
        if self.symbol not in ARPABET:
            raise PhoneticsError(f"unknown phoneme symbol: {self.symbol!r}")
        if self.is_vowel:
            if self.stress not in (0, 1, 2):
                raise PhoneticsError(
                    f"vowel {self.symbol} requires stress 0/1/2, got {self.stress!r}"
                )
        elif self.stress is not None:
            raise PhoneticsError(
                f"consonant {self.symbol} cannot carry stress {self.stress!r}"
            )

    @property
    def is_vowel(self) -> bool:
        return self.symbol in ARPABET_VOWELS

    @classmethod
    def parse(cls, text: str) -> "Phoneme":
        """Parse a dictionary token such as ``IY1`` or ``T``."""
        text = text.strip().upper()
        if text and text[-1].isdigit():
            return cls(text[:-1], int(text[-1]))
        return cls(text)

    def __str__(self) -> str:
        if self.stress is None:
            return self.symbol
        return f"{self.symbol}{self.stress}"


@dataclass(frozen=True)
class Pronunciation:
    """An ordered, non-empty phoneme sequence for one word."""

    phonemes: Tuple[Phoneme, ...]

    def __post_init__(self) -> None:
        if not self.phonemes:
            raise PhoneticsError("pronunciation must contain at least one phoneme")

    @property
    def syllable_count(self) -> int:
        return sum(1 for p in self.phonemes if p.is_vowel)

    @classmethod
    def parse(cls, text: str) -> "Pronunciation":
        """Parse a space-separated phoneme string such as ``B IY1 T``."""
        return cls(tuple(Phoneme.parse(tok) for tok in text.split()))

    def __str__(self) -> str:
        return " ".join(str(p) for p in self.phonemes)

    def __iter__(self):
        return iter(self.phonemes)

    def __len__(self) -> int:
        return len(self.phonemes)


class PhoneticDictionary:
    """Word -> pronunciation variants, primary variant first.

    Immutable after load; safe for concurrent reads.
    """

    def __init__(self, entries: Dict[str, List[Pronunciation]], skipped_lines: int = 0):
        for word, prons in entries.items():
            if not word or word != word.lower():
                raise PhoneticsError(f"dictionary key must be non-empty lowercase: {word!r}")
            if not prons:
                raise PhoneticsError(f"dictionary entry {word!r} has no pronunciations")
        self._entries = {w: tuple(ps) for w, ps in entries.items()}
        self.skipped_lines = skipped_lines

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def words(self) -> Iterable[str]:
        return self._entries.keys()

    def get(self, word: str) -> Tuple[Pronunciation, ...]:
        return self._entries.get(word.lower(), ())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhoneticDictionary):
            return NotImplemented
        return self._entries == other._entries


@dataclass(frozen=True)
class WordFrequencyList:
    """Words ordered most-frequent first, no duplicates."""

    words: Tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.words)) != len(self.words):
            raise PhoneticsError("frequency list contains duplicates")

    def __iter__(self):
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)


def load_pronunciation_dictionary(source: TextIO) -> PhoneticDictionary:
    """Load a CMU-format dictionary: ``WORD  PH1 PH2 ...`` lines.

    Variant entries are marked ``WORD(n)`` and grouped under the base word
    in file order.  Comment lines begin with ``;;;``.  Lines with unknown
    phoneme symbols are skipped and counted in ``skipped_lines``.
    """
    entries: Dict[str, List[Pronunciation]] = {}
    skipped = 0
    saw_content = False
    for raw in source:
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        saw_content = True
        parts = line.split()
        if len(parts) < 2:
            skipped += 1
            continue
        word = parts[0].lower()
        if word.endswith(")") and "(" in word:
            word = word[: word.index("(")]
        if not word:
            skipped += 1
            continue
        try:
            pron = Pronunciation.parse(" ".join(parts[1:]))
        except PhoneticsError:
            skipped += 1
            continue
        entries.setdefault(word, []).append(pron)
    if not saw_content:
        raise PhoneticsError("empty pronunciation dictionary source")
    if not entries:
        raise PhoneticsError("no valid entries in pronunciation dictionary source")
    return PhoneticDictionary(entries, skipped_lines=skipped)


def load_word_frequencies(source: TextIO) -> WordFrequencyList:
    """Load a frequency list: one word per line, most frequent first."""
    seen = set()
    words: List[str] = []
    for raw in source:
        word = raw.strip().lower()
        if not word or word.startswith("#"):
            continue
        if word in seen:
            continue
        seen.add(word)
        words.append(word)
    return WordFrequencyList(tuple(words))


def _strip_edge_punctuation(token: str) -> str:
    """Strip Unicode punctuation from both ends; interior marks survive."""
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def _heuristic_syllables(word: str) -> int:
    """Estimate syllables for out-of-vocabulary words.

    Counts maximal vowel-letter groups (aeiouy), subtracts one for a
    terminal silent "e" preceded by a consonant (never below 1), and
    returns at least 1 for any word containing a letter.
    """
    word = word.lower()
    count = 0
    prev_vowel = False
    for ch in word:
        is_vowel = ch in _VOWEL_LETTERS
        if is_vowel and not prev_vowel:
            count += 1
        prev_vowel = is_vowel
    if (
        count > 1
        and len(word) >= 2
        and word.endswith("e")
        and word[-2].isalpha()
        and word[-2] not in _VOWEL_LETTERS
    ):
        count -= 1
    if count == 0 and any(ch.isalpha() for ch in word):
        return 1
    return count


def syllable_count_word(dictionary: PhoneticDictionary, word: str) -> int:
    """Count syllables for one word; total function, 0 for empty input.

    In-vocabulary words use the vowel-phoneme count of the primary
    pronunciation; hyphenated words sum their parts; anything else falls
    back to the vowel-group heuristic.
    """
    word = _strip_edge_punctuation(word.strip()).lower()
    if not word:
        return 0
    prons = dictionary.get(word)
    if prons:
        return prons[0].syllable_count
    if "-" in word:
        return sum(syllable_count_word(dictionary, part) for part in word.split("-"))
    return _heuristic_syllables(word)


def syllable_count_text(dictionary: PhoneticDictionary, text: str) -> int:
    """Sum syllable counts over whitespace-separated tokens."""
    return sum(syllable_count_word(dictionary, tok) for tok in text.split())


def pronunciations(dictionary: PhoneticDictionary, word: str) -> List[Pronunciation]:
    """All pronunciation variants in stored order; empty list if unknown."""
    return list(dictionary.get(word.strip().lower()))


def default_dictionary() -> PhoneticDictionary:
    """Load the lexicon bundled with the package."""
    ref = resources.files("parodist.data").joinpath("lexicon.dict")
    with ref.open("r", encoding="utf-8") as fh:
        return load_pronunciation_dictionary(fh)


def default_frequencies() -> WordFrequencyList:
    """Load the word-frequency list bundled with the package."""
    ref = resources.files("parodist.data").joinpath("word_frequencies.txt")
    with ref.open("r", encoding="utf-8") as fh:
        return load_word_frequencies(fh)
