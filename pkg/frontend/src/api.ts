// Typed client for the /api/v1 service. No state beyond the token;
// every method maps to exactly one endpoint.

export interface PatternMeta {
  pattern_string: string;
  cycle_len: number;
  ppm: number;
  repeats: number;
  audio_url: string;
}

export interface AssessmentResult {
  matrix?: number[][];
  per_onset_avg?: number[];
  per_cycle_avg?: number[];
  passed: boolean;
  failure_reason: string | null;
  failure_stage: string | null;
  attempt_no: number;
  bounds_used?: number;
}

export interface ProgressRow {
  pattern: string;
  cycle_len: number;
  attempts: number;
  passed: boolean;
  abs_avg_beat_error: number | null;
  abs_avg_cycle_error: number | null;
}

export interface ProgressReport {
  learner_id: string;
  complete: boolean;
  total_attempts: number;
  cycles: Array<{ cycle_len: number; patterns: ProgressRow[] }>;
}

export interface AdvanceResponse {
  complete: boolean;
  pattern: PatternMeta | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request(
    path: string,
    init: RequestInit = {},
  ): Promise<Response> {
    const headers = new Headers(init.headers);
    if (this.token) headers.set("Authorization", `Bearer ${this.token}`);
    const res = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      ...init,
      headers,
    });
    if (res.status >= 400) {
      let message = res.statusText;
      try {
        const body = await res.json();
        message = body.error ?? body.detail ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, message);
    }
    return res;
  }

  async register(
    name: string,
    password: string,
    experienceTier: string,
    consent: boolean,
  ): Promise<string> {
    const res = await this.request("/register", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        name,
        password,
        experience_tier: experienceTier,
        consent,
      }),
    });
    return (await res.json()).learner_id;
  }

  async login(name: string, password: string): Promise<string> {
    const res = await this.request("/login", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ name, password }),
    });
    const body = await res.json();
    this.token = body.token;
    return body.learner_id;
  }

  /** null means the course is complete (204). */
  async getPattern(): Promise<PatternMeta | null> {
    const res = await this.request("/pattern");
    if (res.status === 204) return null;
    return res.json();
  }

  async getPatternAudio(): Promise<ArrayBuffer> {
    const res = await this.request("/pattern/audio");
    return res.arrayBuffer();
  }

  async postAttempt(wav: ArrayBuffer): Promise<AssessmentResult> {
    const res = await this.request("/attempt", {
      method: "POST",
      headers: { "Content-Type": "audio/wav" },
      body: wav,
    });
    return res.json();
  }

  async advance(): Promise<AdvanceResponse> {
    const res = await this.request("/advance", { method: "POST" });
    return res.json();
  }

  async getProgress(): Promise<ProgressReport> {
    const res = await this.request("/progress");
    return res.json();
  }
}
