import type {
  LyricsResultView,
  SessionView,
  ValidationReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`api error ${status}: ${JSON.stringify(detail)}`);
  }
}

/** 409 from the service: the session moved on under us (stale tab). */
export class StaleSessionError extends ApiError {}

async function parseError(response: Response): Promise<never> {
  let detail: unknown = null;
  try {
    detail = (await response.json()).detail;
  } catch {
    detail = response.statusText;
  }
  if (response.status === 409) {
    throw new StaleSessionError(response.status, detail);
  }
  throw new ApiError(response.status, detail);
}

export class StudioClient {
  constructor(private baseUrl = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(
    prompt: string,
    scheme: string,
    config: Record<string, unknown> = {},
  ): Promise<SessionView> {
    return this.post("/v1/sessions", { prompt, scheme, config });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}`);
  }

  choose(id: string, candidateIndex: number): Promise<SessionView> {
    return this.post(`/v1/sessions/${encodeURIComponent(id)}/choice`, {
      candidate_index: candidateIndex,
    });
  }

  generate(
    prompt: string,
    scheme: string,
    config: Record<string, unknown> = {},
  ): Promise<LyricsResultView> {
    return this.post("/v1/generate", { prompt, scheme, config });
  }

  validateScheme(scheme: string): Promise<ValidationReport> {
    return this.post("/v1/validate", { scheme });
  }

  karaokeLrc(lines: string[], timing: string): Promise<string> {
    return this.post<{ lrc: string }>("/v1/karaoke", { lines, timing }).then(
      (body) => body.lrc,
    );
  }

  rhymes(word: string): Promise<string[]> {
    return this.request<{ rhymes: string[] }>(
      `/v1/rhymes/${encodeURIComponent(word)}`,
    ).then((body) => body.rhymes);
  }

  syllables(text: string): Promise<number> {
    return this.request<{ syllables: number }>(
      `/v1/syllables?text=${encodeURIComponent(text)}`,
    ).then((body) => body.syllables);
  }
}
