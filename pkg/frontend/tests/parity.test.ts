// Auto-pick parity: driving a live service session to completion with
// the UI's auto control must equal the command-line batch output byte
// for byte, for the same seed.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StudioClient } from "../src/api.js";
import { autoComplete, lyricsText } from "../src/session.js";

const PORT = 18000 + Math.floor(Math.random() * 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const SCHEME = 'line: (7, 1)\nline: (7, 1)\nline: (4, None) (4, "ooh, weird science")\n';
const PROMPT = "I've created a monster.";
const SEED = 42;

let server: ChildProcess;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/v1/syllables?text=a`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up in time");
}

beforeAll(async () => {
  server = spawn("parodist", ["serve", "--addr", `127.0.0.1:${PORT}`], {
    stdio: "ignore",
  });
  await waitForService();
}, 90_000);

afterAll(() => {
  server.kill();
});

describe("auto-pick parity with the CLI", () => {
  it("matches `parodist generate --seed 42` byte for byte", async () => {
    const client = new StudioClient(BASE);
    let view = await client.createSession(PROMPT, SCHEME, { seed: SEED });
    view = await autoComplete(client, view);
    expect(view.status).toBe("complete");

    const schemeFile = join(mkdtempSync(join(tmpdir(), "parody-")), "ws.scheme");
    writeFileSync(schemeFile, SCHEME);
    const cli = spawnSync(
      "parodist",
      ["generate", "--prompt", PROMPT, "--scheme", schemeFile, "--seed", String(SEED)],
      { encoding: "utf-8" },
    );
    expect(cli.status).toBe(0);
    expect(lyricsText(view)).toBe(cli.stdout);
  }, 120_000);

  it("reports violations through the service validator", async () => {
    const client = new StudioClient(BASE);
    const report = await client.validateScheme('line: (2, "ooh, weird science")');
    expect(report.parsed).toBe(true);
    expect(report.violations.some((v) => v.includes("exceeds"))).toBe(true);
  });

  it("exports LRC text from the service", async () => {
    const client = new StudioClient(BASE);
    const lrc = await client.karaokeLrc(["a", "b"], "0.0\t1.0\tx\n62.5\t63.0\ty\n");
    expect(lrc).toBe("[00:00.00]a\n[01:02.50]b\n");
  });
});
