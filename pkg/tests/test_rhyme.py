import io
import random

import pytest

from parodist.phonetics import Phoneme, Pronunciation
from parodist.rhyme import (
    PhonemeSimilarityTable,
    RhymeDictionary,
    RhymeError,
    build_rhyme_dictionary,
    decompose,
    near_rhyme,
    normalize_er,
    phonemes_similar,
    rhyming_candidates,
    words_near_rhyme,
)

# ---------------------------------------------------------------------------
# Independent oracle: a literal, index-based transcription of the detection
# procedure, sharing no code with the production implementation.
# ---------------------------------------------------------------------------

_VOWELS = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY",
    "IH", "IY", "OW", "OY", "UH", "UW",
}


def _strip(ph):
    return ph.rstrip("012")


def _is_vowel(ph):
    return _strip(ph) in _VOWELS


def naive_near_rhyme(seq1, seq2, pairs):
    """Literal step-by-step re-implementation over phoneme strings."""

    def sim(p, q):
        p, q = _strip(p), _strip(q)
        return p == q or (p, q) in pairs or (q, p) in pairs

    def norm(seq):
        out = []
        for ph in seq:
            base = _strip(ph)
            stress = ph[len(base):]
            if base == "ER":
                out.append("UH" + stress)
                out.append("R")
            else:
                out.append(ph)
        return out

    def decomp(seq):
        vowel_idx = [i for i, ph in enumerate(seq) if _is_vowel(ph)]
        if not vowel_idx:
            raise ValueError("no vowel")
        stressed = [i for i in vowel_idx if ph_has_stress(seq[i])]
        v = stressed[-1] if stressed else vowel_idx[-1]
        w = vowel_idx[-1]
        a = seq[:v]
        if v == w:
            return a, seq[v], [], seq[w], seq[v + 1:]
        return a, seq[v], seq[v + 1: w], seq[w], seq[w + 1:]

    def ph_has_stress(ph):
        return ph.endswith("1") or ph.endswith("2")

    s1, s2 = norm(list(seq1)), norm(list(seq2))
    a1, v1, x1, w1, c1 = decomp(s1)
    a2, v2, x2, w2, c2 = decomp(s2)
    if _strip(v1) != _strip(v2):
        return False
    if _strip(w1) != _strip(w2):
        return False
    # 6(c) is deleted: end consonants are free to differ.
    if (
        a1
        and a2
        and [_strip(p) for p in a1] == [_strip(p) for p in a2]
        and [_strip(p) for p in c1] == [_strip(p) for p in c2]
    ):
        return False
    if len(x1) == 0 and len(x2) == 0:
        return True
    if len(x1) == 0 or len(x2) == 0:
        return False
    if len(x1) == 1 and len(x2) == 1:
        return sim(x1[0], x2[0])
    if sum(_is_vowel(p) for p in x1) != sum(_is_vowel(p) for p in x2):
        return False
    p1, q1 = x1[0], x1[-1]
    p2, q2 = x2[0], x2[-1]
    if _strip(p1) == _strip(p2) and sim(q1, q2):
        return True
    if sim(p1, p2) and _strip(q1) == _strip(q2):
        return True
    return False


def naive_words_rhyme(dictionary, w1, w2, pairs):
    for p1 in dictionary.get(w1):
        for p2 in dictionary.get(w2):
            s1 = [str(ph) for ph in p1]
            s2 = [str(ph) for ph in p2]
            try:
                if naive_near_rhyme(s1, s2, pairs):
                    return True
            except ValueError:
                continue
    return False


def pron(text):
    return Pronunciation.parse(text)


class TestNormalizeEr:
    def test_monster(self):
        assert str(normalize_er(pron("M AA1 N S T ER0"))) == "M AA1 N S T UH0 R"

    def test_no_er_unchanged(self):
        assert str(normalize_er(pron("B IY1 T"))) == "B IY1 T"

    def test_single_er(self):
        assert str(normalize_er(pron("ER1"))) == "UH1 R"


class TestDecompose:
    def test_japan(self):
        d = decompose(pron("JH AH0 P AE1 N"))
        assert [p.symbol for p in d.a] == ["JH", "AH", "P"]
        assert d.v.symbol == "AE" and d.w.symbol == "AE" and d.v_is_w
        assert d.x == ()
        assert [p.symbol for p in d.c] == ["N"]
        assert d.reconstruct() == pron("JH AH0 P AE1 N")

    def test_stressed_then_unstressed(self):
        d = decompose(pron("EH1 K S OW0"))
        assert d.a == ()
        assert d.v.symbol == "EH"
        assert [p.symbol for p in d.x] == ["K", "S"]
        assert d.w.symbol == "OW"
        assert d.c == ()
        assert d.reconstruct() == pron("EH1 K S OW0")

    def test_no_vowel_errors(self):
        with pytest.raises(RhymeError, match="no vowel"):
            decompose(Pronunciation((Phoneme("T"), Phoneme("T"), Phoneme("T"))))

    def test_unstressed_word_uses_last_vowel(self):
        d = decompose(pron("DH AH0"))
        assert d.v.symbol == "AH" and d.v_is_w


class TestSimilarity:
    def test_reflexive(self, table):
        assert phonemes_similar(table, Phoneme("T"), Phoneme("T"))

    def test_r_er_rule(self, table):
        assert phonemes_similar(table, Phoneme("R"), Phoneme("ER", 0))

    def test_unrelated_pair(self, table):
        assert not phonemes_similar(table, Phoneme("T"), Phoneme("M"))

    def test_load_rejects_malformed(self):
        with pytest.raises(RhymeError):
            PhonemeSimilarityTable.load(io.StringIO("T D M\n"))
        with pytest.raises(RhymeError):
            PhonemeSimilarityTable.load(io.StringIO("T QX\n"))

    def test_load_comments_and_blanks(self):
        t = PhonemeSimilarityTable.load(io.StringIO("# c\n\nT D  # inline\n"))
        assert t.similar("T", "D") and t.similar("D", "T")


class TestNearRhymeFixtures:
    def test_man_japan(self, dictionary, table):
        assert words_near_rhyme(dictionary, "man", "japan", table)

    def test_taught_taught(self, dictionary, table):
        assert not words_near_rhyme(dictionary, "taught", "taught", table)

    def test_sad_brad(self, dictionary, table):
        assert words_near_rhyme(dictionary, "sad", "brad", table)

    def test_beat_bead(self, dictionary, table):
        assert words_near_rhyme(dictionary, "beat", "bead", table)

    def test_no_vowel_input_errors(self, table):
        with pytest.raises(RhymeError):
            near_rhyme(
                Pronunciation((Phoneme("T"),)), pron("B IY1 T"), table
            )


class TestNearRhymeProperties:
    def test_symmetry_on_vocabulary_sample(self, dictionary, table):
        rng = random.Random(99)
        words = sorted(dictionary.words())
        sample = rng.sample(words, 120)
        for i, w1 in enumerate(sample):
            for w2 in sample[i + 1:]:
                assert words_near_rhyme(dictionary, w1, w2, table) == words_near_rhyme(
                    dictionary, w2, w1, table
                )

    def test_coda_differences_are_free(self, table):
        # same v/x/w, different final clusters, different onsets
        assert near_rhyme(pron("M AE1 T"), pron("B AE1 D"), table)
        assert near_rhyme(pron("AE1 T"), pron("AE1 D"), table)
        # identical onset with identical coda is the same sound, not a rhyme
        assert not near_rhyme(pron("M AE1 T"), pron("M AE1 T"), table)

    def test_different_last_vowels_never_rhyme(self, dictionary, table):
        rng = random.Random(7)
        words = sorted(dictionary.words())
        checked = 0
        while checked < 200:
            w1, w2 = rng.sample(words, 2)
            d1 = decompose(normalize_er(dictionary.get(w1)[0]))
            d2 = decompose(normalize_er(dictionary.get(w2)[0]))
            if d1.w.symbol != d2.w.symbol:
                assert not near_rhyme(
                    dictionary.get(w1)[0], dictionary.get(w2)[0], table
                )
                checked += 1

    def test_oracle_equivalence_sample(self, dictionary, table):
        rng = random.Random(2024)
        words = sorted(dictionary.words())
        sample = rng.sample(words, 150)
        pairs = set(map(tuple, table.pairs()))
        for i, w1 in enumerate(sample):
            for w2 in sample[i:]:
                assert words_near_rhyme(dictionary, w1, w2, table) == naive_words_rhyme(
                    dictionary, w1, w2, pairs
                ), (w1, w2)


class TestRhymeDictionary:
    def test_man_class_contains_japan(self, rdict):
        assert "japan" in rdict.classes["man"]

    def test_limit_one_gives_empty_class(self, dictionary, frequencies, table):
        rd = build_rhyme_dictionary(dictionary, frequencies, limit=1, table=table)
        assert len(rd.vocabulary) == 1
        assert rd.classes[rd.vocabulary[0]] == frozenset()

    def test_classes_symmetric_on_sample(self, dictionary, rdict, table):
        rng = random.Random(5)
        sample = rng.sample(list(rdict.vocabulary), 200)
        for i, w1 in enumerate(sample):
            for w2 in sample[i + 1:]:
                in_first = w2 in rdict.classes[w1]
                in_second = w1 in rdict.classes[w2]
                assert in_first == in_second
                assert in_first == words_near_rhyme(dictionary, w1, w2, table)

    def test_classes_never_contain_self(self, rdict):
        for word in rdict.vocabulary:
            assert word not in rdict.classes[word]

    def test_empty_intersection_errors(self, dictionary, table):
        from parodist.phonetics import WordFrequencyList

        with pytest.raises(RhymeError):
            build_rhyme_dictionary(
                dictionary, WordFrequencyList(("zzz", "qqq")), table=table
            )

    def test_candidates_for_known_word(self, rdict):
        assert "japan" in rhyming_candidates(rdict, "man")

    def test_word_with_no_rhymes(self, rdict):
        assert rhyming_candidates(rdict, "monster") == set()

    def test_unpronounceable_word_errors(self, rdict):
        with pytest.raises(RhymeError, match="unpronounceable"):
            rhyming_candidates(rdict, "zzkrwq")

    def test_on_the_fly_matches_precomputed(self, dictionary, frequencies, table, rdict):
        small = build_rhyme_dictionary(dictionary, frequencies, limit=300, table=table)
        small_vocab = set(small.vocabulary)
        outside = [w for w in rdict.vocabulary if w not in small_vocab][:100]
        for word in outside:
            expected = {w for w in rdict.classes[word] if w in small_vocab}
            assert rhyming_candidates(small, word) == expected, word

    def test_cache_round_trip(self, dictionary, frequencies, table):
        rd = build_rhyme_dictionary(dictionary, frequencies, limit=200, table=table)
        sink = io.StringIO()
        rd.save(sink)
        loaded = RhymeDictionary.load(
            io.StringIO(sink.getvalue()), dictionary, table
        )
        assert loaded == rd
        assert rhyming_candidates(loaded, "man") == rhyming_candidates(rd, "man")
