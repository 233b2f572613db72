import type { StudioClient } from "./api.js";
import type { SessionView } from "./types.js";

/**
 * The "auto" control: accept the engine's own sampled pick for the
 * current segment. Always choosing this index reproduces batch
 * generation byte for byte.
 */
export async function autoStep(
  client: StudioClient,
  view: SessionView,
): Promise<SessionView> {
  if (view.status !== "awaiting_choice" || view.sampled_index === null) {
    throw new Error(`session is not awaiting a choice (${view.status})`);
  }
  return client.choose(view.id, view.sampled_index);
}

/** Run the auto control until the session completes. */
export async function autoComplete(
  client: StudioClient,
  view: SessionView,
): Promise<SessionView> {
  let current = view;
  while (current.status === "awaiting_choice") {
    current = await autoStep(client, current);
  }
  return current;
}

/** The lyrics text exactly as the command-line tool prints it. */
export function lyricsText(view: SessionView): string {
  if (!view.result) {
    throw new Error("session has no result yet");
  }
  return view.result.lines.join("\n") + "\n";
}
