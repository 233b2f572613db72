"""Near-rhyme detection and rhyme dictionary construction.

Rhyme equality here is looser than perfect rhyme: final consonant
clusters are free to differ (sung endings blur them), and a configurable
phoneme-similarity table lets near misses count.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, TextIO, Tuple

from .phonetics import (
    ARPABET,
    Phoneme,
    PhoneticDictionary,
    Pronunciation,
    WordFrequencyList,
)


class RhymeError(ValueError):
    """Raised for unpronounceable words or vowel-less pronunciations."""


@dataclass(frozen=True)
class RhymeDecomposition:
    """Split of a pronunciation around its last stressed vowel (v) and
    last vowel (w): a v x w c.  When v is w, x is empty and the vowel is
    stored once (``v_is_w``)."""

    a: Tuple[Phoneme, ...]
    v: Phoneme
    x: Tuple[Phoneme, ...]
    w: Phoneme
    c: Tuple[Phoneme, ...]
    v_is_w: bool

    def reconstruct(self) -> Pronunciation:
        if self.v_is_w:
            return Pronunciation(self.a + (self.v,) + self.c)
        return Pronunciation(self.a + (self.v,) + self.x + (self.w,) + self.c)


class PhonemeSimilarityTable:
    """Symmetric, reflexive "sounds similar" relation over phoneme symbols."""

    def __init__(self, pairs: Iterable[Tuple[str, str]] = ()):
        marked: Set[FrozenSet[str]] = set()
        for p, q in pairs:
            p, q = p.upper(), q.upper()
            if p not in ARPABET or q not in ARPABET:
                raise RhymeError(f"unknown phoneme in similarity pair: {p} {q}")
            marked.add(frozenset((p, q)))
        self._pairs = frozenset(marked)

    def similar(self, p: str, q: str) -> bool:
        p, q = p.upper(), q.upper()
        return p == q or frozenset((p, q)) in self._pairs

    def pairs(self) -> List[Tuple[str, str]]:
        return sorted(tuple(sorted(pair)) for pair in self._pairs)

    @classmethod
    def load(cls, source: TextIO) -> "PhonemeSimilarityTable":
        """Load "P Q" lines; "#" starts a comment, blank lines ignored."""
        pairs = []
        for raw in source:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise RhymeError(f"malformed similarity line: {raw.rstrip()!r}")
            pairs.append((parts[0], parts[1]))
        return cls(pairs)


def default_similarity_table() -> PhonemeSimilarityTable:
    ref = resources.files("parodist.data").joinpath("phoneme_similarity.txt")
    with ref.open("r", encoding="utf-8") as fh:
        return PhonemeSimilarityTable.load(fh)


def phonemes_similar(table: PhonemeSimilarityTable, p: Phoneme, q: Phoneme) -> bool:
    """True when the symbols match (stress ignored) or the table marks them."""
    return table.similar(p.symbol, q.symbol)


def normalize_er(pron: Pronunciation) -> Pronunciation:
    """Replace each ER with UH R, the UH inheriting ER's stress."""
    out: List[Phoneme] = []
    for p in pron.phonemes:
        if p.symbol == "ER":
            out.append(Phoneme("UH", p.stress))
            out.append(Phoneme("R"))
        else:
            out.append(p)
    return Pronunciation(tuple(out))


def decompose(pron: Pronunciation) -> RhymeDecomposition:
    """Locate the last stressed vowel and last vowel and split around them.

    A word with no stressed vowel uses its last vowel for both positions,
    so function words still take part in rhyming.
    """
    phonemes = pron.phonemes
    vowel_positions = [i for i, p in enumerate(phonemes) if p.is_vowel]
    if not vowel_positions:
        raise RhymeError("no vowel")
    stressed = [i for i in vowel_positions if phonemes[i].stress in (1, 2)]
    v_idx = stressed[-1] if stressed else vowel_positions[-1]
    w_idx = vowel_positions[-1]
    if v_idx == w_idx:
        return RhymeDecomposition(
            a=phonemes[:v_idx],
            v=phonemes[v_idx],
            x=(),
            w=phonemes[w_idx],
            c=phonemes[w_idx + 1 :],
            v_is_w=True,
        )
    return RhymeDecomposition(
        a=phonemes[:v_idx],
        v=phonemes[v_idx],
        x=phonemes[v_idx + 1 : w_idx],
        w=phonemes[w_idx],
        c=phonemes[w_idx + 1 :],
        v_is_w=False,
    )


def _symbols(phonemes: Tuple[Phoneme, ...]) -> Tuple[str, ...]:
    return tuple(p.symbol for p in phonemes)


def _rhyme_from_decompositions(
    d1: RhymeDecomposition, d2: RhymeDecomposition, table: PhonemeSimilarityTable
) -> bool:
    if d1.v.symbol != d2.v.symbol:
        return False
    if d1.w.symbol != d2.w.symbol:
        return False
    # Identical onset with identical coda would just be the same sound
    # again, not a rhyme.  (Codas alone may differ freely.)
    if (
        d1.a
        and d2.a
        and _symbols(d1.a) == _symbols(d2.a)
        and _symbols(d1.c) == _symbols(d2.c)
    ):
        return False
    x1, x2 = d1.x, d2.x
    if not x1 and not x2:
        return True
    if not x1 or not x2:
        return False
    if len(x1) == 1 and len(x2) == 1:
        return phonemes_similar(table, x1[0], x2[0])
    if sum(p.is_vowel for p in x1) != sum(p.is_vowel for p in x2):
        return False
    if x1[0].symbol == x2[0].symbol and phonemes_similar(table, x1[-1], x2[-1]):
        return True
    if phonemes_similar(table, x1[0], x2[0]) and x1[-1].symbol == x2[-1].symbol:
        return True
    return False


def near_rhyme(
    p1: Pronunciation, p2: Pronunciation, table: PhonemeSimilarityTable
) -> bool:
    """Decide whether two pronunciations near-rhyme."""
    d1 = decompose(normalize_er(p1))
    d2 = decompose(normalize_er(p2))
    return _rhyme_from_decompositions(d1, d2, table)


def words_near_rhyme(
    dictionary: PhoneticDictionary,
    word1: str,
    word2: str,
    table: PhonemeSimilarityTable,
) -> bool:
    """True when any pronunciation-variant pair of the words near-rhymes."""
    prons1 = dictionary.get(word1)
    prons2 = dictionary.get(word2)
    if not prons1:
        raise RhymeError(f"unpronounceable: {word1!r}")
    if not prons2:
        raise RhymeError(f"unpronounceable: {word2!r}")
    for p1 in prons1:
        for p2 in prons2:
            try:
                if near_rhyme(p1, p2, table):
                    return True
            except RhymeError:
                continue
    return False


def _safe_decompositions(prons: Iterable[Pronunciation]) -> List[RhymeDecomposition]:
    out = []
    for pron in prons:
        try:
            out.append(decompose(normalize_er(pron)))
        except RhymeError:
            continue
    return out


class RhymeDictionary:
    """Precomputed near-rhyme classes over a fixed vocabulary."""

    def __init__(
        self,
        vocabulary: Tuple[str, ...],
        classes: Dict[str, FrozenSet[str]],
        dictionary: PhoneticDictionary,
        table: PhonemeSimilarityTable,
    ):
        self.vocabulary = vocabulary
        self.classes = classes
        self.dictionary = dictionary
        self.table = table
        self._vocab_set = set(vocabulary)
        # (v, w) symbol buckets speed up on-the-fly queries: only words
        # sharing both anchor vowels can possibly rhyme.
        self._buckets: Dict[Tuple[str, str], List[str]] = {}
        self._decomps: Dict[str, List[RhymeDecomposition]] = {}
        for word in vocabulary:
            decs = _safe_decompositions(dictionary.get(word))
            self._decomps[word] = decs
            for key in {(d.v.symbol, d.w.symbol) for d in decs}:
                self._buckets.setdefault(key, []).append(word)

    def save(self, sink) -> None:
        """Write the cache: one "word: r1 r2 ..." line per vocabulary word."""
        for word in self.vocabulary:
            rhymes = " ".join(sorted(self.classes.get(word, frozenset())))
            sink.write(f"{word}: {rhymes}".rstrip() + "\n")

    @classmethod
    def load(
        cls,
        source: TextIO,
        dictionary: PhoneticDictionary,
        table: PhonemeSimilarityTable,
    ) -> "RhymeDictionary":
        vocabulary: List[str] = []
        classes: Dict[str, FrozenSet[str]] = {}
        for raw in source:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            word, _, rest = line.partition(":")
            word = word.strip()
            vocabulary.append(word)
            classes[word] = frozenset(rest.split())
        return cls(tuple(vocabulary), classes, dictionary, table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RhymeDictionary):
            return NotImplemented
        return self.vocabulary == other.vocabulary and self.classes == other.classes


def build_rhyme_dictionary(
    dictionary: PhoneticDictionary,
    frequencies: WordFrequencyList,
    limit: int = 20000,
    table: Optional[PhonemeSimilarityTable] = None,
) -> RhymeDictionary:
    """Build near-rhyme classes for the most frequent pronounceable words."""
    if limit < 1:
        raise RhymeError("limit must be >= 1")
    if table is None:
        table = default_similarity_table()
    vocabulary = tuple(w for w in frequencies if w in dictionary)[:limit]
    if not vocabulary:
        raise RhymeError("no frequency-list words found in the dictionary")
    rdict = RhymeDictionary(vocabulary, {}, dictionary, table)
    classes: Dict[str, Set[str]] = {w: set() for w in vocabulary}
    tested: Set[Tuple[str, str]] = set()
    for bucket in rdict._buckets.values():
        for i, w1 in enumerate(bucket):
            decs1 = rdict._decomps[w1]
            for w2 in bucket[i + 1 :]:
                pair = (w1, w2) if w1 < w2 else (w2, w1)
                if pair in tested:
                    continue
                tested.add(pair)
                decs2 = rdict._decomps[w2]
                if any(
                    _rhyme_from_decompositions(d1, d2, table)
                    for d1 in decs1
                    for d2 in decs2
                ):
                    classes[w1].add(w2)
                    classes[w2].add(w1)
    rdict.classes = {w: frozenset(s) for w, s in classes.items()}
    return rdict


def rhyming_candidates(rdict: RhymeDictionary, word: str) -> Set[str]:
    """Rhymes of ``word`` within the dictionary vocabulary.

    Out-of-vocabulary (but pronounceable) words are matched on the fly.
    """
    word = word.strip().lower()
    if word in rdict._vocab_set:
        return set(rdict.classes.get(word, frozenset()))
    prons = rdict.dictionary.get(word)
    if not prons:
        raise RhymeError(f"unpronounceable: {word!r}")
    decs = _safe_decompositions(prons)
    found: Set[str] = set()
    for dec in decs:
        for other in rdict._buckets.get((dec.v.symbol, dec.w.symbol), ()):
            if other == word or other in found:
                continue
            if any(
                _rhyme_from_decompositions(dec2, d2, rdict.table)
                for dec2 in decs
                for d2 in rdict._decomps[other]
            ):
                found.add(other)
    return found
