"""Timed-lyric binding and LRC emission for sing-along playback."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import List, Sequence, TextIO, Tuple


class KaraokeError(ValueError):
    pass


@dataclass(frozen=True)
class TimingEntry:
    start_seconds: float
    end_seconds: float
    text: str


@dataclass(frozen=True)
class TimingTrack:
    """Sorted, non-overlapping [start, end) spans of the original lines."""

    entries: Tuple[TimingEntry, ...]

    def __post_init__(self) -> None:
        previous_end = None
        for i, entry in enumerate(self.entries, start=1):
            if entry.start_seconds < 0:
                raise KaraokeError(f"entry {i}: negative start time")
            if entry.start_seconds >= entry.end_seconds:
                raise KaraokeError(f"entry {i}: start must precede end")
            if previous_end is not None and entry.start_seconds < previous_end:
                raise KaraokeError(f"entry {i}: overlaps the previous entry")
            previous_end = entry.end_seconds

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TimedLyrics:
    """New lines bound to the original track's timing spans."""

    entries: Tuple[TimingEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def parse_timing(source: TextIO) -> TimingTrack:
    """Parse tab-separated ``start<TAB>end<TAB>text`` lines."""
    entries: List[TimingEntry] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise KaraokeError(f"timing line {line_no}: expected start<TAB>end<TAB>text")
        try:
            start = float(parts[0])
            end = float(parts[1])
        except ValueError as exc:
            raise KaraokeError(f"timing line {line_no}: bad number: {exc}") from None
        entries.append(TimingEntry(start, end, "\t".join(parts[2:])))
    try:
        return TimingTrack(tuple(entries))
    except KaraokeError as exc:
        raise KaraokeError(f"invalid timing track: {exc}") from None


def serialize_timing(track: TimingTrack) -> str:
    """Inverse of parse_timing for valid tracks."""
    return "".join(
        f"{entry.start_seconds}\t{entry.end_seconds}\t{entry.text}\n"
        for entry in track.entries
    )


def bind_timings(lines: Sequence[str], track: TimingTrack) -> TimedLyrics:
    """Attach the i-th new line to the i-th timing span."""
    if len(lines) != len(track.entries):
        raise KaraokeError(
            f"line count {len(lines)} does not match timing entry count {len(track.entries)}"
        )
    return TimedLyrics(
        tuple(
            TimingEntry(entry.start_seconds, entry.end_seconds, line)
            for line, entry in zip(lines, track.entries)
        )
    )


def _format_timestamp(seconds: float) -> str:
    total = Decimal(str(seconds)).quantize(Decimal("0.01"), rounding=ROUND_DOWN)
    minutes = int(total // 60)
    if minutes >= 100:
        raise KaraokeError(f"timestamp {seconds} exceeds the LRC 99-minute bound")
    rest = total - minutes * 60
    return f"[{minutes:02d}:{rest:05.2f}]"


def emit_lrc(timed: TimedLyrics) -> str:
    """Render ``[mm:ss.xx]text`` lines; centiseconds truncate, never round."""
    out = []
    for entry in timed.entries:
        out.append(f"{_format_timestamp(entry.start_seconds)}{entry.text}\n")
    return "".join(out)
