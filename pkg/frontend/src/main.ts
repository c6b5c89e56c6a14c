// Browser wiring: binds the state machine, API client, recorder, and
// charts to the DOM. All gating decisions come from UiSession.

import { ApiClient, ApiError, type AssessmentResult } from "./api.ts";
import { buildDeviationChart, renderChartSvg } from "./charts.ts";
import { UiSession } from "./state.ts";
import { encodeWav, resampleLinear } from "./wav.ts";

const SESSION_RATE = 44100;

const api = new ApiClient(window.location.origin);
const ui = new UiSession();

let recorder: MediaRecorder | null = null;
let chunks: Blob[] = [];
let capturedWav: ArrayBuffer | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string) {
  el("status").textContent = text;
}

function refreshControls() {
  el<HTMLButtonElement>("play").disabled = ui.courseComplete;
  el<HTMLButtonElement>("record").disabled =
    ui.courseComplete || ui.state === "recording" || ui.state === "uploading";
  el<HTMLButtonElement>("stop").disabled = ui.state !== "recording";
  el<HTMLButtonElement>("analyze").disabled = !ui.canAnalyze;
  el<HTMLButtonElement>("learn-another").disabled = !ui.canLearnAnother;
}

async function loadPattern() {
  const pattern = await api.getPattern();
  ui.loadPattern(pattern);
  capturedWav = null;
  if (pattern === null) {
    setStatus("Course complete. Well done!");
  } else {
    el("pattern").textContent =
      `${pattern.pattern_string} at ${pattern.ppm} PPM, ${pattern.repeats} repeats`;
    setStatus("Listen to the pattern, then record your take.");
  }
  refreshControls();
}

async function playPattern() {
  try {
    const bytes = await api.getPatternAudio();
    const ctx = new AudioContext();
    const audio = await ctx.decodeAudioData(bytes);
    const source = ctx.createBufferSource();
    source.buffer = audio;
    source.connect(ctx.destination);
    source.start();
  } catch (err) {
    setStatus(`Could not play the pattern, try again. (${String(err)})`);
  }
}

async function startRecording() {
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  } catch {
    setStatus("Microphone access is required: allow it in the browser prompt.");
    return;
  }
  ui.startRecording();
  chunks = [];
  recorder = new MediaRecorder(stream);
  recorder.ondataavailable = (e) => chunks.push(e.data);
  recorder.start();
  setStatus("Recording... play along with the pattern.");
  refreshControls();
}

async function stopRecording() {
  if (!recorder) return;
  const stopped = new Promise<void>((resolve) => {
    recorder!.onstop = () => resolve();
  });
  recorder.stop();
  recorder.stream.getTracks().forEach((t) => t.stop());
  await stopped;

  const blob = new Blob(chunks);
  const ctx = new AudioContext();
  const decoded = await ctx.decodeAudioData(await blob.arrayBuffer());
  const mono = decoded.getChannelData(0);
  const resampled = resampleLinear(mono, decoded.sampleRate, SESSION_RATE);
  capturedWav = encodeWav(resampled, SESSION_RATE);
  ui.stopRecording();
  setStatus("Recording ready. Analyze when you are.");
  refreshControls();
}

function showResult(result: AssessmentResult) {
  if (result.failure_reason) {
    setStatus(`Attempt ${result.attempt_no} failed: ${result.failure_reason}`);
    el("charts").innerHTML = "";
    return;
  }
  setStatus(
    result.passed
      ? `Attempt ${result.attempt_no}: within bounds. You may learn another.`
      : `Attempt ${result.attempt_no}: outside bounds, try again.`,
  );
  const onset = buildDeviationChart(result.per_onset_avg ?? [], "onset");
  const cycle = buildDeviationChart(result.per_cycle_avg ?? [], "cycle");
  el("charts").innerHTML = renderChartSvg(onset) + renderChartSvg(cycle);
}

async function analyze() {
  if (!capturedWav) return;
  ui.beginUpload();
  refreshControls();
  try {
    const result = await api.postAttempt(capturedWav);
    ui.completeUpload(result);
    showResult(result);
  } catch (err) {
    ui.failUpload();
    setStatus(
      err instanceof ApiError
        ? `Upload rejected: ${err.message}`
        : "Upload failed, check the connection and analyze again.",
    );
  }
  refreshControls();
}

async function learnAnother() {
  const next = await api.advance();
  ui.loadPattern(next.pattern);
  capturedWav = null;
  el("charts").innerHTML = "";
  if (next.complete) {
    setStatus("Course complete. Well done!");
  } else if (next.pattern) {
    el("pattern").textContent =
      `${next.pattern.pattern_string} at ${next.pattern.ppm} PPM, ` +
      `${next.pattern.repeats} repeats`;
    setStatus("New pattern loaded. Listen first.");
  }
  refreshControls();
}

async function login() {
  const name = el<HTMLInputElement>("name").value;
  const password = el<HTMLInputElement>("password").value;
  try {
    await api.login(name, password);
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      setStatus("Wrong name or password.");
      return;
    }
    throw err;
  }
  el("login-panel").hidden = true;
  el("platform").hidden = false;
  await loadPattern();
}

export function boot() {
  el("login").addEventListener("click", () => void login());
  el("play").addEventListener("click", () => void playPattern());
  el("record").addEventListener("click", () => void startRecording());
  el("stop").addEventListener("click", () => void stopRecording());
  el("analyze").addEventListener("click", () => void analyze());
  el("learn-another").addEventListener("click", () => void learnAnother());
  refreshControls();
}

if (typeof document !== "undefined" && document.getElementById("platform")) {
  boot();
}
