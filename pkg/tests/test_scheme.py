import random
from pathlib import Path

import pytest

from parodist.scheme import (
    NO_RHYME,
    MACRO_KINDS,
    NoRhyme,
    PostMacro,
    RhymeIndex,
    RhymeLiteral,
    RhymeMap,
    Scheme,
    SchemeError,
    SchemeParseError,
    Segment,
    parse_scheme,
    seed_rhyme_map,
    serialize_scheme,
    validate_scheme,
)

FIXTURES = Path(__file__).parent / "fixtures"


class TestParse:
    def test_single_segment(self):
        s = parse_scheme("line: (9, 1)\n")
        assert s.lines == [[Segment(9, RhymeIndex(1), False)]]

    def test_two_segments_share_index(self):
        s = parse_scheme("line: (4, 2) (3, 2)\n")
        assert s.lines == [
            [Segment(4, RhymeIndex(2), False), Segment(3, RhymeIndex(2), False)]
        ]

    def test_end_marker(self):
        s = parse_scheme("line: (9, 1, end)\n")
        assert s.lines[0][0].end_sentence

    def test_literal_phrase(self):
        s = parse_scheme('line: (4, "ooh, weird science")\n')
        assert s.lines[0][0].rhyme == RhymeLiteral("ooh, weird science")

    def test_none_rhyme(self):
        s = parse_scheme("line: (3, None)\n")
        assert s.lines[0][0].rhyme == NO_RHYME

    def test_comments_and_blanks_ignored(self):
        s = parse_scheme("# top\n\nline: (1, None)\n# tail\n")
        assert len(s.lines) == 1

    def test_seed_line(self):
        s = parse_scheme("line: (9, 1)\nrhyme: 1 -> shot\n")
        assert s.seeds == {1: "shot"}

    def test_macro_lines(self):
        s = parse_scheme(
            "line: (9, 1)\n"
            'post: prepend_text 1 "hey yo"\n'
            "post: repeat_first_word 1 3\n"
            'post: insert_word 1 "uh"\n'
        )
        assert [m.kind for m in s.macros] == [
            "prepend_text",
            "repeat_first_word",
            "insert_word",
        ]

    def test_syntax_error_carries_position(self):
        with pytest.raises(SchemeParseError) as err:
            parse_scheme("line: (9, 1\n")
        assert err.value.line == 1

    def test_zero_syllables_rejected(self):
        with pytest.raises(SchemeParseError):
            parse_scheme("line: (0, 1)\n")

    def test_unknown_macro_kind_rejected(self):
        with pytest.raises(SchemeParseError):
            parse_scheme("line: (9, 1)\npost: shuffle 1\n")

    def test_unterminated_quote(self):
        with pytest.raises(SchemeParseError):
            parse_scheme('line: (4, "oops)\n')

    def test_negative_rhyme_index_rejected(self):
        with pytest.raises(SchemeParseError):
            parse_scheme("line: (4, -2)\n")

    def test_unknown_directive(self):
        with pytest.raises(SchemeParseError):
            parse_scheme("nope: (1, None)\n")

    def test_empty_scheme_rejected(self):
        with pytest.raises(SchemeParseError):
            parse_scheme("# nothing\n")


def _random_scheme(rng: random.Random) -> Scheme:
    words = ["shot", "sad", "man", "light", "blue moon", "ooh, weird science"]
    lines = []
    for _ in range(rng.randint(1, 6)):
        segments = []
        for _ in range(rng.randint(1, 3)):
            choice = rng.random()
            if choice < 0.4:
                rhyme = RhymeIndex(rng.randint(0, 12))
            elif choice < 0.7:
                rhyme = NO_RHYME
            else:
                rhyme = RhymeLiteral(rng.choice(words))
            segments.append(
                Segment(rng.randint(1, 14), rhyme, rng.random() < 0.25)
            )
        lines.append(segments)
    macros = []
    for _ in range(rng.randint(0, 3)):
        kind = rng.choice(MACRO_KINDS)
        line_index = rng.randint(1, len(lines))
        if kind in ("prepend_text", "append_text", "insert_word"):
            macros.append(PostMacro(kind, line_index, text=rng.choice(["hey yo", "uh", "whoo"])))
        elif kind in ("repeat_line", "repeat_first_word"):
            macros.append(PostMacro(kind, line_index, count=rng.randint(1, 3)))
        else:
            macros.append(
                PostMacro(kind, line_index, text="just", span=(-2, -1))
            )
    seeds = {}
    for _ in range(rng.randint(0, 2)):
        seeds[rng.randint(0, 12)] = rng.choice(["shot", "sad", "man"])
    return Scheme(lines=lines, macros=macros, seeds=seeds)


class TestSerializeRoundTrip:
    def test_my_shot_round_trips(self):
        source = (FIXTURES / "my_shot.scheme").read_text()
        scheme = parse_scheme(source)
        assert len(scheme.lines) == 20
        assert scheme.seeds == {1: "shot"}
        assert parse_scheme(serialize_scheme(scheme)) == scheme

    def test_trivial_round_trips(self):
        scheme = parse_scheme("line: (1, None)\n")
        assert parse_scheme(serialize_scheme(scheme)) == scheme

    def test_macros_preserved_in_order(self):
        scheme = parse_scheme(
            "line: (2, None)\n"
            'post: append_text 1 "yeah"\n'
            'post: prepend_text 1 "hey"\n'
        )
        again = parse_scheme(serialize_scheme(scheme))
        assert [m.kind for m in again.macros] == ["append_text", "prepend_text"]

    def test_random_schemes_round_trip(self):
        rng = random.Random(31337)
        for _ in range(300):
            scheme = _random_scheme(rng)
            assert parse_scheme(serialize_scheme(scheme)) == scheme

    def test_quote_in_literal_rejected_at_serialize(self):
        scheme = Scheme(lines=[[Segment(2, RhymeLiteral('a "b"'))]])
        with pytest.raises(SchemeError):
            serialize_scheme(scheme)


class TestValidate:
    def test_weird_science_literal_fits(self, dictionary):
        scheme = parse_scheme('line: (4, "ooh, weird science")\n')
        assert validate_scheme(scheme, dictionary) == []

    def test_literal_exceeding_segment(self, dictionary):
        scheme = parse_scheme('line: (2, "ooh, weird science")\n')
        violations = validate_scheme(scheme, dictionary)
        assert any("exceeds segment syllables" in str(v) for v in violations)

    def test_zero_syllable_segment_flagged(self, dictionary):
        scheme = Scheme(lines=[[Segment.__new__(Segment)]])
        object.__setattr__(scheme.lines[0][0], "syllables", 0)
        object.__setattr__(scheme.lines[0][0], "rhyme", NO_RHYME)
        object.__setattr__(scheme.lines[0][0], "end_sentence", False)
        violations = validate_scheme(scheme, dictionary)
        assert any("syllable count" in str(v) for v in violations)

    def test_macro_out_of_bounds_flagged(self, dictionary):
        scheme = parse_scheme("line: (2, None)\npost: repeat_line 1\n")
        scheme.macros[0] = PostMacro("repeat_line", 9, count=1)
        violations = validate_scheme(scheme, dictionary)
        assert any("targets line 9" in str(v) for v in violations)

    def test_bad_seed_flagged(self, dictionary):
        scheme = parse_scheme("line: (2, 1)\nrhyme: 1 -> zzkrwq\n")
        violations = validate_scheme(scheme, dictionary)
        assert any("not pronounceable" in str(v) for v in violations)

    def test_validation_is_pure(self, dictionary):
        scheme = parse_scheme('line: (2, "ooh, weird science")\n')
        first = [str(v) for v in validate_scheme(scheme, dictionary)]
        second = [str(v) for v in validate_scheme(scheme, dictionary)]
        assert first == second


class TestRhymeMapSeeding:
    def test_seed_shot(self, dictionary):
        rmap = seed_rhyme_map({1: "shot"}, dictionary)
        assert rmap.anchor(1) == "shot"

    def test_seed_sad(self, dictionary):
        rmap = seed_rhyme_map({6: "sad"}, dictionary)
        assert rmap.anchor(6) == "sad"

    def test_empty_seeds(self, dictionary):
        assert seed_rhyme_map({}, dictionary).indices() == []

    def test_unpronounceable_seed_errors(self, dictionary):
        with pytest.raises(SchemeError, match="zzkrwq"):
            seed_rhyme_map({1: "zzkrwq"}, dictionary)

    def test_binding_order_preserves_anchor(self):
        rmap = RhymeMap()
        rmap.bind(1, "shot")
        rmap.bind(1, "taught")
        rmap.bind(1, "not")
        assert rmap.anchor(1) == "shot"
        assert rmap.words(1) == ["shot", "taught", "not"]

    def test_copy_is_isolated(self):
        rmap = RhymeMap({1: ["shot"]})
        clone = rmap.copy()
        clone.bind(1, "hot")
        assert rmap.words(1) == ["shot"]
