"""The constraint program: lines of segments, rhyme seeds, post macros.

Scheme files are a small line-oriented DSL::

    # comment
    line: (9, 1)
    line: (4, 2) (3, 2)
    line: (9, 1, end)
    line: (4, "ooh, weird science")
    rhyme: 1 -> shot
    post: prepend_text 3 "hey yo"
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .phonetics import PhoneticDictionary, syllable_count_text


class SchemeError(ValueError):
    """Raised for invalid scheme structures or seed words."""


class SchemeParseError(SchemeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class NoRhyme:
    """No rhyme constraint on the segment."""


@dataclass(frozen=True)
class RhymeIndex:
    """Segments sharing an index must near-rhyme with its anchor word."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise SchemeError("rhyme index must be non-negative")


@dataclass(frozen=True)
class RhymeLiteral:
    """The segment must end with this exact word or phrase."""

    phrase: str

    def __post_init__(self) -> None:
        if not self.phrase:
            raise SchemeError("literal rhyme phrase must be non-empty")


RhymeSpec = Union[NoRhyme, RhymeIndex, RhymeLiteral]
NO_RHYME = NoRhyme()


@dataclass(frozen=True)
class Segment:
    syllables: int
    rhyme: RhymeSpec = NO_RHYME
    end_sentence: bool = False


MACRO_KINDS = (
    "prepend_text",
    "append_text",
    "repeat_line",
    "repeat_first_word",
    "append_repeat",
    "insert_word",
)


@dataclass(frozen=True)
class PostMacro:
    """A post-processing edit targeting one (1-based) output line."""

    kind: str
    line_index: int
    text: Optional[str] = None
    count: Optional[int] = None
    span: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.kind not in MACRO_KINDS:
            raise SchemeError(f"unknown macro kind: {self.kind!r}")


Line = List[Segment]


@dataclass
class Scheme:
    lines: List[Line]
    macros: List[PostMacro] = field(default_factory=list)
    seeds: Dict[int, str] = field(default_factory=dict)


class RhymeMap:
    """index -> ordered bound words; the first word is the anchor."""

    def __init__(self, bindings: Optional[Mapping[int, List[str]]] = None):
        self._bindings: Dict[int, List[str]] = {}
        if bindings:
            for idx, words in bindings.items():
                self._bindings[int(idx)] = list(words)

    def __contains__(self, index: int) -> bool:
        return index in self._bindings

    def bind(self, index: int, word: str) -> None:
        self._bindings.setdefault(index, []).append(word)

    def anchor(self, index: int) -> Optional[str]:
        words = self._bindings.get(index)
        return words[0] if words else None

    def words(self, index: int) -> List[str]:
        return list(self._bindings.get(index, []))

    def indices(self) -> List[int]:
        return list(self._bindings)

    def copy(self) -> "RhymeMap":
        return RhymeMap(self._bindings)

    def as_dict(self) -> Dict[int, List[str]]:
        return {idx: list(words) for idx, words in self._bindings.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RhymeMap):
            return NotImplemented
        return self._bindings == other._bindings

    def __repr__(self) -> str:
        return f"RhymeMap({self._bindings!r})"


@dataclass(frozen=True)
class Violation:
    message: str
    line: Optional[int] = None
    segment: Optional[int] = None

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"line {self.line}"
            if self.segment is not None:
                where += f", segment {self.segment}"
            where += ": "
        return where + self.message


def _parse_int(token: str, line_no: int, col: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise SchemeParseError(f"expected {what}, got {token!r}", line_no, col) from None


def _scan_quoted(text: str, i: int, line_no: int) -> Tuple[str, int]:
    """Read a double-quoted phrase starting at ``text[i] == '"'``."""
    end = text.find('"', i + 1)
    if end < 0:
        raise SchemeParseError("unterminated quoted phrase", line_no, i + 1)
    return text[i + 1 : end], end + 1


def _scan_segment(text: str, i: int, line_no: int) -> Tuple[Segment, int]:
    if text[i] != "(":
        raise SchemeParseError("expected '('", line_no, i + 1)
    close = i
    depth = 0
    j = i
    while j < len(text):
        ch = text[j]
        if ch == '"':
            _, j = _scan_quoted(text, j, line_no)
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                close = j
                break
        j += 1
    else:
        raise SchemeParseError("unterminated segment tuple", line_no, i + 1)

    inner = text[i + 1 : close]
    parts: List[str] = []
    k = 0
    current_start = 0
    while k < len(inner):
        ch = inner[k]
        if ch == '"':
            _, k = _scan_quoted(inner, k, line_no)
            continue
        if ch == ",":
            parts.append(inner[current_start:k].strip())
            current_start = k + 1
        k += 1
    parts.append(inner[current_start:].strip())

    if len(parts) < 2 or len(parts) > 3:
        raise SchemeParseError(
            f"segment needs (syllables, rhyme[, end]), got {len(parts)} fields",
            line_no,
            i + 1,
        )
    syllables = _parse_int(parts[0], line_no, i + 1, "syllable count")
    if syllables < 1:
        raise SchemeParseError("syllable count must be >= 1", line_no, i + 1)

    rhyme_text = parts[1]
    rhyme: RhymeSpec
    if rhyme_text == "None":
        rhyme = NO_RHYME
    elif rhyme_text.startswith('"'):
        if not rhyme_text.endswith('"') or len(rhyme_text) < 2:
            raise SchemeParseError("malformed quoted phrase", line_no, i + 1)
        rhyme = RhymeLiteral(rhyme_text[1:-1])
    else:
        index = _parse_int(rhyme_text, line_no, i + 1, "rhyme index")
        if index < 0:
            raise SchemeParseError("rhyme index must be non-negative", line_no, i + 1)
        rhyme = RhymeIndex(index)

    end_sentence = False
    if len(parts) == 3:
        if parts[2] != "end":
            raise SchemeParseError(
                f"expected 'end' as third field, got {parts[2]!r}", line_no, i + 1
            )
        end_sentence = True
    return Segment(syllables, rhyme, end_sentence), close + 1


def _parse_line_directive(rest: str, line_no: int, offset: int) -> Line:
    segments: List[Segment] = []
    i = 0
    while i < len(rest):
        if rest[i].isspace():
            i += 1
            continue
        segment, i = _scan_segment(rest, i, line_no)
        segments.append(segment)
    if not segments:
        raise SchemeParseError("line directive has no segments", line_no, offset)
    return segments


def _parse_macro_args(rest: str, line_no: int) -> List[str]:
    """Split macro arguments, keeping quoted phrases whole."""
    args: List[str] = []
    i = 0
    while i < len(rest):
        if rest[i].isspace():
            i += 1
            continue
        if rest[i] == '"':
            phrase, i = _scan_quoted(rest, i, line_no)
            args.append('"' + phrase)
        else:
            j = i
            while j < len(rest) and not rest[j].isspace():
                j += 1
            args.append(rest[i:j])
            i = j
    return args


def _parse_post_directive(rest: str, line_no: int) -> PostMacro:
    args = _parse_macro_args(rest, line_no)
    if len(args) < 2:
        raise SchemeParseError("post macro needs a kind and a line index", line_no, 1)
    kind = args[0]
    if kind not in MACRO_KINDS:
        raise SchemeParseError(f"unknown macro kind: {kind!r}", line_no, 1)
    line_index = _parse_int(args[1], line_no, 1, "line index")
    params = args[2:]

    def quoted(arg: str, what: str) -> str:
        if not arg.startswith('"'):
            raise SchemeParseError(f"{what} must be quoted", line_no, 1)
        return arg[1:]

    if kind in ("prepend_text", "append_text", "insert_word"):
        if len(params) != 1:
            raise SchemeParseError(f"{kind} takes one quoted argument", line_no, 1)
        return PostMacro(kind, line_index, text=quoted(params[0], f"{kind} text"))
    if kind == "repeat_line":
        if len(params) > 1:
            raise SchemeParseError("repeat_line takes an optional count", line_no, 1)
        count = _parse_int(params[0], line_no, 1, "count") if params else 1
        return PostMacro(kind, line_index, count=count)
    if kind == "repeat_first_word":
        if len(params) != 1:
            raise SchemeParseError("repeat_first_word takes a count", line_no, 1)
        return PostMacro(kind, line_index, count=_parse_int(params[0], line_no, 1, "count"))
    # append_repeat INFIX START [END]
    if len(params) not in (2, 3):
        raise SchemeParseError(
            "append_repeat takes a quoted infix and a word span", line_no, 1
        )
    infix = quoted(params[0], "append_repeat infix")
    start = _parse_int(params[1], line_no, 1, "span start")
    end = _parse_int(params[2], line_no, 1, "span end") if len(params) == 3 else start
    return PostMacro(kind, line_index, text=infix, span=(start, end))


def parse_scheme(source: str) -> Scheme:
    """Parse scheme DSL text into a Scheme."""
    lines: List[Line] = []
    macros: List[PostMacro] = []
    seeds: Dict[int, str] = {}
    for line_no, raw in enumerate(source.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        directive, sep, rest = stripped.partition(":")
        if not sep:
            raise SchemeParseError(
                f"expected a 'line:', 'rhyme:' or 'post:' directive, got {stripped!r}",
                line_no,
                1,
            )
        directive = directive.strip()
        rest = rest.strip()
        if directive == "line":
            lines.append(_parse_line_directive(rest, line_no, len(raw) - len(rest)))
        elif directive == "rhyme":
            index_text, sep, word = rest.partition("->")
            if not sep or not word.strip():
                raise SchemeParseError("expected 'rhyme: INDEX -> WORD'", line_no, 1)
            index = _parse_int(index_text.strip(), line_no, 1, "rhyme index")
            seeds[index] = word.strip()
        elif directive == "post":
            macros.append(_parse_post_directive(rest, line_no))
        else:
            raise SchemeParseError(f"unknown directive: {directive!r}", line_no, 1)
    if not lines:
        raise SchemeParseError("scheme has no lines", max(1, source.count("\n") + 1), 1)
    return Scheme(lines=lines, macros=macros, seeds=seeds)


def _serialize_segment(segment: Segment) -> str:
    if isinstance(segment.rhyme, NoRhyme):
        rhyme = "None"
    elif isinstance(segment.rhyme, RhymeIndex):
        rhyme = str(segment.rhyme.index)
    else:
        if '"' in segment.rhyme.phrase:
            raise SchemeError("literal phrases cannot contain double quotes")
        rhyme = f'"{segment.rhyme.phrase}"'
    end = ", end" if segment.end_sentence else ""
    return f"({segment.syllables}, {rhyme}{end})"


def serialize_scheme(scheme: Scheme) -> str:
    """Render a Scheme back to DSL text; parse(serialize(s)) == s."""
    out: List[str] = []
    for line in scheme.lines:
        out.append("line: " + " ".join(_serialize_segment(seg) for seg in line))
    for index in sorted(scheme.seeds):
        out.append(f"rhyme: {index} -> {scheme.seeds[index]}")
    for macro in scheme.macros:
        parts = [f"post: {macro.kind} {macro.line_index}"]
        if macro.kind in ("prepend_text", "append_text", "insert_word"):
            parts.append(f'"{macro.text}"')
        elif macro.kind in ("repeat_line", "repeat_first_word"):
            parts.append(str(macro.count if macro.count is not None else 1))
        else:  # append_repeat
            span = macro.span or (-1, -1)
            parts.append(f'"{macro.text}"')
            parts.append(str(span[0]))
            parts.append(str(span[1]))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def validate_scheme(
    scheme: Scheme, dictionary: PhoneticDictionary
) -> List[Violation]:
    """Check all structural invariants; violations are data, not errors."""
    violations: List[Violation] = []
    if not scheme.lines:
        violations.append(Violation("scheme has no lines"))
    for li, line in enumerate(scheme.lines, start=1):
        if not line:
            violations.append(Violation("line has no segments", line=li))
            continue
        for si, segment in enumerate(line, start=1):
            if segment.syllables < 1:
                violations.append(
                    Violation("syllable count must be >= 1", line=li, segment=si)
                )
            if isinstance(segment.rhyme, RhymeLiteral):
                phrase_syllables = syllable_count_text(dictionary, segment.rhyme.phrase)
                if phrase_syllables < 1:
                    violations.append(
                        Violation(
                            f"literal {segment.rhyme.phrase!r} has no syllables",
                            line=li,
                            segment=si,
                        )
                    )
                elif segment.syllables >= 1 and phrase_syllables > segment.syllables:
                    violations.append(
                        Violation(
                            "literal exceeds segment syllables "
                            f"({phrase_syllables} > {segment.syllables})",
                            line=li,
                            segment=si,
                        )
                    )
    for macro in scheme.macros:
        if not 1 <= macro.line_index <= len(scheme.lines):
            violations.append(
                Violation(
                    f"macro {macro.kind} targets line {macro.line_index}, "
                    f"scheme has {len(scheme.lines)} lines"
                )
            )
    for index, word in scheme.seeds.items():
        if word.lower() not in dictionary:
            violations.append(
                Violation(f"seed word for index {index} not pronounceable: {word!r}")
            )
    return violations


def seed_rhyme_map(
    seeds: Mapping[int, str], dictionary: PhoneticDictionary
) -> RhymeMap:
    """Initialize a rhyme map with user-chosen anchors."""
    rmap = RhymeMap()
    for index, word in seeds.items():
        if word.lower() not in dictionary:
            raise SchemeError(f"seed word not pronounceable: {word!r}")
        rmap.bind(int(index), word.lower())
    return rmap
