// End-to-end: the UI modules against a real local service instance.
// Requires the Python package to be installed (the `rhythmtutor` CLI).

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.ts";
import { buildDeviationChart, renderChartSvg } from "../src/charts.ts";
import { UiSession } from "../src/state.ts";
import { encodeWav } from "../src/wav.ts";

const PORT = 18000 + Math.floor(Math.random() * 2000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/api/v1/pattern`);
      if (res.status === 401) return; // up, auth rejected as expected
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not come up in time");
}

beforeAll(async () => {
  const store = join(mkdtempSync(join(tmpdir(), "tutor-")), "store.json");
  server = spawn(
    "rhythmtutor",
    ["serve", "--store", store, "--bind", `127.0.0.1:${PORT}`],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

function silentWav(seconds = 1): ArrayBuffer {
  return encodeWav(new Float32Array(Math.round(44100 * seconds)), 44100);
}

describe("learning platform against a live service", () => {
  const api = new ApiClient(BASE);
  const ui = new UiSession();

  it("registers and logs in", async () => {
    const learnerId = await api.register("E2E Learner", "pw", "beginner", true);
    expect(learnerId).toBeTruthy();
    expect(await api.login("E2E Learner", "pw")).toBe(learnerId);
  });

  it("loads the first pattern with audio", async () => {
    const pattern = await api.getPattern();
    ui.loadPattern(pattern);
    expect(pattern?.cycle_len).toBe(4);
    expect(pattern?.ppm).toBe(160);
    const audio = await api.getPatternAudio();
    expect(audio.byteLength).toBeGreaterThan(44);
  });

  it("keeps Learn Another disabled after a failing attempt", async () => {
    ui.startRecording();
    ui.stopRecording();
    ui.beginUpload();
    const result = await api.postAttempt(silentWav());
    ui.completeUpload(result);
    expect(result.passed).toBe(false);
    expect(result.failure_reason).toBe("silent recording");
    expect(ui.canLearnAnother).toBe(false);
  });

  it("refuses to advance after the failure", async () => {
    await expect(api.advance()).rejects.toMatchObject({ status: 409 });
  });

  it("charts a passing loopback attempt from the JSON verbatim", async () => {
    const loopback = await api.getPatternAudio();
    ui.startRecording();
    ui.stopRecording();
    ui.beginUpload();
    const result = await api.postAttempt(loopback);
    ui.completeUpload(result);
    expect(result.passed).toBe(true);

    const onsetChart = buildDeviationChart(result.per_onset_avg!, "onset");
    const cycleChart = buildDeviationChart(result.per_cycle_avg!, "cycle");
    expect(onsetChart.points.map((p) => p.value)).toEqual(result.per_onset_avg);
    expect(cycleChart.points.map((p) => p.value)).toEqual(result.per_cycle_avg);

    const svg = renderChartSvg(onsetChart);
    for (const v of result.per_onset_avg!) {
      expect(svg).toContain(`data-value="${v}"`);
    }
    expect(ui.canLearnAnother).toBe(true);
  });

  it("advances to the next pattern on Learn Another", async () => {
    const before = (await api.getPattern())?.pattern_string;
    const next = await api.advance();
    ui.loadPattern(next.pattern);
    expect(next.complete).toBe(false);
    expect(next.pattern?.pattern_string).not.toBe(before);
    expect(ui.canAnalyze).toBe(false);
  });

  it("reports progress with both attempts counted", async () => {
    const progress = await api.getProgress();
    expect(progress.total_attempts).toBe(2);
    expect(progress.cycles.map((c) => c.cycle_len)).toEqual([4, 3, 5, 7]);
  });

  it("rejects undecodable uploads with 415", async () => {
    const bytes = new TextEncoder().encode("not audio at all").buffer;
    await expect(api.postAttempt(bytes as ArrayBuffer)).rejects.toMatchObject({
      status: 415,
    });
    expect(new ApiError(415, "x").status).toBe(415);
  });
});
