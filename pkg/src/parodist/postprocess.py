"""Post-processing macros applied to finished lyric lines.

Macro line indices refer to the original (pre-macro) numbering; lines
inserted by ``repeat_line`` are tracked so later macros keep hitting the
line their author meant.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .scheme import PostMacro


class PostprocessError(ValueError):
    pass


def _prepend(text: str, line: str) -> str:
    """Prepended text keeps its case; the old line is decapitalized
    unless the prepend closes a sentence."""
    if not text:
        return line
    if line and not text[-1] in ".!?":
        line = line[0].lower() + line[1:]
    return (text + " " + line).strip()


def _repeat_first_word(line: str, count: int) -> str:
    words = line.split()
    if not words or count < 1:
        return line
    first = words[0]
    prefix = ", ".join([first] + [first.lower()] * (count - 1))
    rest = first.lower() + line[len(first) :]
    return prefix + " " + rest


def _resolve_span_index(index: int, length: int) -> int:
    """1-based word position; negatives count from the end (-1 is last)."""
    resolved = index - 1 if index > 0 else length + index
    if not 0 <= resolved < length:
        raise PostprocessError(f"word index {index} out of range for {length} words")
    return resolved


def _append_repeat(line: str, infix: Optional[str], span) -> str:
    words = line.split()
    if not words:
        return line
    start, end = span if span is not None else (-1, -1)
    s = _resolve_span_index(start, len(words))
    e = _resolve_span_index(end, len(words))
    if s > e:
        raise PostprocessError(f"empty word span ({start}, {end})")
    snippet = " ".join(words[s : e + 1])
    middle = f"{infix} " if infix else ""
    return f"{line}, {middle}{snippet}"


def _insert_word(line: str, word: str) -> str:
    words = line.split()
    if not words:
        return line
    rest = " ".join(words[1:])
    out = f"{words[0]}, {word}"
    return f"{out}, {rest}" if rest else out


def apply_macros(lines: Sequence[str], macros: Sequence[PostMacro]) -> List[str]:
    """Apply macros in declaration order and return the edited lines."""
    result = list(lines)
    # original line index per current position; inserted copies get None
    origin: List[Optional[int]] = list(range(len(lines)))
    for macro in macros:
        target = macro.line_index - 1
        if not 0 <= target < len(lines):
            raise PostprocessError(
                f"macro {macro.kind} targets line {macro.line_index}, "
                f"scheme produced {len(lines)} lines"
            )
        pos = origin.index(target)
        if macro.kind == "prepend_text":
            result[pos] = _prepend(macro.text or "", result[pos])
        elif macro.kind == "append_text":
            result[pos] = (result[pos] + " " + (macro.text or "")).strip()
        elif macro.kind == "repeat_line":
            count = macro.count if macro.count is not None else 1
            for offset in range(1, count + 1):
                result.insert(pos + offset, result[pos])
                origin.insert(pos + offset, None)
        elif macro.kind == "repeat_first_word":
            result[pos] = _repeat_first_word(result[pos], macro.count or 1)
        elif macro.kind == "append_repeat":
            result[pos] = _append_repeat(result[pos], macro.text, macro.span)
        elif macro.kind == "insert_word":
            result[pos] = _insert_word(result[pos], macro.text or "")
        else:
            raise PostprocessError(f"unknown macro kind: {macro.kind!r}")
    return result
