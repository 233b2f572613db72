import { StaleSessionError, StudioClient } from "./api.js";
import { debounce, EXAMPLE_SCHEME, validate } from "./editor.js";
import {
  activeLineIndex,
  bindPreview,
  parseTimingTsv,
  type PreviewLine,
} from "./karaoke.js";
import { autoStep } from "./session.js";
import type { SessionView } from "./types.js";

const client = new StudioClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

// --- scheme editor ---------------------------------------------------------

const schemeInput = el<HTMLTextAreaElement>("scheme");
const promptInput = el<HTMLInputElement>("prompt");
const seedInput = el<HTMLInputElement>("seed");
const violationsBox = el<HTMLUListElement>("violations");

async function revalidate(): Promise<void> {
  try {
    const report = await validate(client, schemeInput.value);
    violationsBox.innerHTML = "";
    for (const violation of report.violations) {
      const item = document.createElement("li");
      item.textContent = violation;
      violationsBox.appendChild(item);
    }
    violationsBox.classList.toggle("clean", report.violations.length === 0);
  } catch (error) {
    violationsBox.innerHTML = `<li>service unreachable: ${String(error)}</li>`;
  }
}

schemeInput.addEventListener("input", debounce(revalidate, 300));

// --- session panel ---------------------------------------------------------

let view: SessionView | null = null;

const candidatesBox = el<HTMLOListElement>("candidates");
const linesBox = el<HTMLPreElement>("lines");
const statusBox = el<HTMLSpanElement>("status");
const staleBanner = el<HTMLDivElement>("stale");

function renderSession(): void {
  if (!view) {
    return;
  }
  statusBox.textContent =
    view.status === "awaiting_choice"
      ? `line ${view.cursor.line + 1}, segment ${view.cursor.segment + 1}`
      : view.status;
  const done = view.result ? view.result.lines : view.completed_lines;
  const partial = view.current_segments.join(" ");
  linesBox.textContent = done.join("\n") + (partial ? `\n${partial} …` : "");
  candidatesBox.innerHTML = "";
  view.pending.forEach((candidate, index) => {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = candidate.text;
    button.title = `score ${candidate.score.toFixed(3)} (${candidate.origin})`;
    if (index === view?.sampled_index) {
      button.classList.add("sampled");
    }
    button.addEventListener("click", () => void choose(index));
    item.appendChild(button);
    candidatesBox.appendChild(item);
  });
}

async function refreshFromServer(): Promise<void> {
  if (view) {
    view = await client.getSession(view.id);
    staleBanner.hidden = true;
    renderSession();
  }
}

async function choose(index: number): Promise<void> {
  if (!view) {
    return;
  }
  try {
    view = await client.choose(view.id, index);
    renderSession();
  } catch (error) {
    if (error instanceof StaleSessionError) {
      staleBanner.hidden = false; // offer a reload: the tab fell behind
    } else {
      throw error;
    }
  }
}

el<HTMLButtonElement>("start").addEventListener("click", async () => {
  const config: Record<string, unknown> = {};
  if (seedInput.value.trim()) {
    config.seed = Number(seedInput.value);
  }
  view = await client.createSession(promptInput.value, schemeInput.value, config);
  staleBanner.hidden = true;
  renderSession();
});

el<HTMLButtonElement>("auto").addEventListener("click", async () => {
  if (view && view.status === "awaiting_choice") {
    try {
      view = await autoStep(client, view);
      renderSession();
    } catch (error) {
      if (error instanceof StaleSessionError) {
        staleBanner.hidden = false;
      } else {
        throw error;
      }
    }
  }
});

el<HTMLButtonElement>("reload").addEventListener("click", () => {
  void refreshFromServer();
});

// --- karaoke preview -------------------------------------------------------

const audioInput = el<HTMLInputElement>("audio-file");
const timingInput = el<HTMLTextAreaElement>("timing");
const audio = el<HTMLAudioElement>("player");
const previewBox = el<HTMLOListElement>("preview");
const karaokeError = el<HTMLDivElement>("karaoke-error");

let preview: PreviewLine[] = [];
let rafId: number | null = null;

audioInput.addEventListener("change", () => {
  const file = audioInput.files?.[0];
  if (file) {
    audio.src = URL.createObjectURL(file); // local playback only, never uploaded
  }
});

el<HTMLButtonElement>("bind").addEventListener("click", () => {
  karaokeError.textContent = "";
  try {
    const entries = parseTimingTsv(timingInput.value);
    const lines = view?.result ? view.result.lines : [];
    preview = bindPreview(lines, entries);
    previewBox.innerHTML = "";
    for (const item of preview) {
      const node = document.createElement("li");
      node.textContent = item.line;
      previewBox.appendChild(node);
    }
  } catch (error) {
    preview = [];
    karaokeError.textContent = String(error);
  }
});

function syncHighlight(): void {
  const index = activeLineIndex(
    preview.map(({ start, end }) => ({ start, end, text: "" })),
    audio.currentTime,
  );
  Array.from(previewBox.children).forEach((node, i) => {
    (node as HTMLElement).classList.toggle("active", i === index);
  });
  rafId = audio.paused ? null : requestAnimationFrame(syncHighlight);
}

audio.addEventListener("play", () => {
  if (rafId === null) {
    rafId = requestAnimationFrame(syncHighlight);
  }
});

el<HTMLButtonElement>("export").addEventListener("click", async () => {
  karaokeError.textContent = "";
  if (!view?.result) {
    karaokeError.textContent = "finish a session first";
    return;
  }
  try {
    const lrc = await client.karaokeLrc(view.result.lines, timingInput.value);
    const blob = new Blob([lrc], { type: "text/plain" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "parody.lrc";
    link.click();
  } catch (error) {
    karaokeError.textContent = String(error);
  }
});

// --- boot ------------------------------------------------------------------

if (!schemeInput.value) {
  schemeInput.value = EXAMPLE_SCHEME;
}
void revalidate();
