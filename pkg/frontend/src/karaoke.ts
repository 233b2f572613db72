import type { TimingEntry } from "./types.js";

/**
 * The entry whose [start, end) span contains the playhead, or -1.
 * Boundaries belong to the entry that starts there: at an entry's end
 * time the highlight moves on (or off, in a gap).
 */
export function activeLineIndex(
  entries: TimingEntry[],
  playhead: number,
): number {
  for (let i = 0; i < entries.length; i++) {
    if (playhead >= entries[i].start && playhead < entries[i].end) {
      return i;
    }
  }
  return -1;
}

/** Parse the timing TSV format for on-screen preview. */
export function parseTimingTsv(text: string): TimingEntry[] {
  const entries: TimingEntry[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line.trim() || line.trimStart().startsWith("#")) {
      continue;
    }
    const parts = line.split("\t");
    if (parts.length < 3) {
      throw new Error(`timing line ${i + 1}: expected start<TAB>end<TAB>text`);
    }
    const start = Number(parts[0]);
    const end = Number(parts[1]);
    if (!Number.isFinite(start) || !Number.isFinite(end)) {
      throw new Error(`timing line ${i + 1}: bad number`);
    }
    if (start < 0 || start >= end) {
      throw new Error(`timing line ${i + 1}: bad time span`);
    }
    const previous = entries[entries.length - 1];
    if (previous && start < previous.end) {
      throw new Error(`timing line ${i + 1}: overlaps the previous entry`);
    }
    entries.push({ start, end, text: parts.slice(2).join("\t") });
  }
  return entries;
}

export interface PreviewLine {
  line: string;
  start: number;
  end: number;
}

/**
 * Bind new lyric lines to the original timing spans; a length mismatch
 * is surfaced here, before any playback starts.
 */
export function bindPreview(
  lines: string[],
  entries: TimingEntry[],
): PreviewLine[] {
  if (lines.length !== entries.length) {
    throw new Error(
      `line count ${lines.length} does not match timing entry count ${entries.length}`,
    );
  }
  return lines.map((line, i) => ({
    line,
    start: entries[i].start,
    end: entries[i].end,
  }));
}
