// Mirrors of the service's JSON payloads. The UI renders these as-is:
// every state transition round-trips through the HTTP API.

export interface Candidate {
  text: string;
  tokens: string[];
  syllable_count: number;
  end_word: string;
  ends_sentence: boolean;
  score: number;
  origin: "forward" | "backward" | "literal";
}

export interface RhymeSpecView {
  kind: "none" | "index" | "literal";
  index?: number;
  phrase?: string;
}

export interface SegmentView {
  syllables: number;
  rhyme: RhymeSpecView;
  end_sentence: boolean;
}

export interface SegmentRecordView {
  candidates: Candidate[];
  chosen_index: number;
  target_words: string[];
  degraded: boolean;
  shortfall: boolean;
}

export interface LyricsResultView {
  lines: string[];
  raw_lines: string[];
  rhyme_map: Record<string, string[]>;
  records: SegmentRecordView[][];
  config: Record<string, unknown>;
  degraded: boolean;
  notes: string[];
}

export type SessionStatus = "running" | "awaiting_choice" | "complete" | "failed";

export interface SessionView {
  id: string;
  status: SessionStatus;
  cursor: { line: number; segment: number };
  prompt: string;
  scheme_grid: SegmentView[][];
  config: Record<string, unknown>;
  rhyme_map: Record<string, string[]>;
  pending: Candidate[];
  sampled_index: number | null;
  completed_lines: string[];
  current_segments: string[];
  degraded: boolean;
  notes: string[];
  result: LyricsResultView | null;
}

export interface ValidationReport {
  violations: string[];
  parsed: boolean;
}

export interface TimingEntry {
  start: number;
  end: number;
  text: string;
}
