import type { StudioClient } from "./api.js";
import type { ValidationReport } from "./types.js";

/**
 * Scheme editing support: the service's validator is the single source
 * of truth, the editor only relays its messages.
 */
export async function validate(
  client: StudioClient,
  schemeText: string,
): Promise<ValidationReport> {
  if (!schemeText.trim()) {
    return { violations: ["scheme is empty"], parsed: false };
  }
  return client.validateScheme(schemeText);
}

/** Trailing-edge debounce for validate-as-you-type. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), delayMs);
  };
}

export const EXAMPLE_SCHEME = `# the final lines of "Weird Science"
line: (7, 1)
line: (7, 1)
line: (4, None) (4, "ooh, weird science")
`;
