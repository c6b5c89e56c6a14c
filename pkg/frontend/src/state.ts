// UI session state machine. All control gating flows from here so the
// invariants hold no matter which buttons the DOM wires up:
//  - "Analyze" only with a completed, not-yet-analyzed recording
//  - no uploading while recording, no analyzing twice per recording
//  - "Learn Another" only after the last result passed

import type { AssessmentResult, PatternMeta } from "./api.ts";

export type UiState = "idle" | "recording" | "uploading" | "showing-results";

export class UiSession {
  state: UiState = "idle";
  pattern: PatternMeta | null = null;
  lastResult: AssessmentResult | null = null;
  private recordingReady = false;

  loadPattern(pattern: PatternMeta | null): void {
    if (this.state === "recording" || this.state === "uploading") {
      throw new Error(`cannot load a pattern while ${this.state}`);
    }
    this.pattern = pattern;
    this.lastResult = null;
    this.recordingReady = false;
    this.state = "idle";
  }

  get courseComplete(): boolean {
    return this.pattern === null;
  }

  startRecording(): void {
    if (this.state !== "idle" && this.state !== "showing-results") {
      throw new Error(`cannot start recording while ${this.state}`);
    }
    if (this.courseComplete) throw new Error("course complete");
    this.state = "recording";
    this.recordingReady = false;
  }

  stopRecording(): void {
    if (this.state !== "recording") {
      throw new Error("not recording");
    }
    this.state = "idle";
    this.recordingReady = true;
  }

  get canAnalyze(): boolean {
    return this.state === "idle" && this.recordingReady;
  }

  beginUpload(): void {
    if (!this.canAnalyze) {
      throw new Error("no completed recording to analyze");
    }
    this.state = "uploading";
    this.recordingReady = false; // a recording is analyzed at most once
  }

  completeUpload(result: AssessmentResult): void {
    if (this.state !== "uploading") {
      throw new Error("no upload in flight");
    }
    this.lastResult = result;
    this.state = "showing-results";
  }

  failUpload(): void {
    if (this.state !== "uploading") {
      throw new Error("no upload in flight");
    }
    // the capture is preserved so the learner can retry the upload
    this.recordingReady = true;
    this.state = "idle";
  }

  get canLearnAnother(): boolean {
    return this.state === "showing-results" && this.lastResult?.passed === true;
  }
}
