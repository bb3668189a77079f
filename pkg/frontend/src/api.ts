// Thin typed client for the session service. Every response body passes
// through the optional recorder hook, which the test harness uses to prove
// that every number on screen came out of an API response.

import type {
  DiagnosisDoc,
  PlanDoc,
  ProfileDoc,
  RecommendationDoc,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Optimistic-sequence clash: someone else advanced the session. */
export class ConflictError extends ApiError {
  constructor(
    detail: string,
    readonly expected: number,
    readonly actual: number,
  ) {
    super(409, detail);
    this.name = "ConflictError";
  }
}

export type ResponseRecorder = (path: string, body: unknown) => void;

export interface PlanRequest {
  heuristic?: string;
  seed?: number;
  constraints?: Record<string, number>;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly recorder?: ResponseRecorder,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `service unreachable at ${this.baseUrl}: ${String(err)}`);
    }
    const doc: unknown = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof doc === "object" && doc !== null && "detail" in doc
          ? String((doc as { detail: unknown }).detail)
          : `HTTP ${response.status}`;
      if (response.status === 409) {
        const d = doc as { expected?: number; actual?: number };
        throw new ConflictError(detail, d.expected ?? -1, d.actual ?? -1);
      }
      throw new ApiError(response.status, detail);
    }
    this.recorder?.(path, doc);
    return doc as T;
  }

  createSession(scenarioId: string, sessionId?: string): Promise<SessionView> {
    return this.request("POST", "/sessions", {
      scenario_id: scenarioId,
      session_id: sessionId,
    });
  }

  session(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  diagnosis(id: string): Promise<DiagnosisDoc> {
    return this.request("GET", `/sessions/${id}/diagnosis`);
  }

  recommendation(id: string): Promise<RecommendationDoc> {
    return this.request("GET", `/sessions/${id}/recommendation`);
  }

  plan(id: string, req: PlanRequest = {}): Promise<PlanDoc> {
    return this.request("POST", `/sessions/${id}/plan`, req);
  }

  profile(id: string): Promise<ProfileDoc> {
    return this.request("GET", `/sessions/${id}/profile`);
  }

  postObservation(
    id: string,
    node: string,
    outcome: string,
    expectedSeq?: number,
  ): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/observations`, {
      node,
      outcome,
      expected_seq: expectedSeq,
    });
  }

  postTestResult(
    id: string,
    testId: string,
    outcome: string,
    expectedSeq?: number,
  ): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/test-results`, {
      test_id: testId,
      outcome,
      expected_seq: expectedSeq,
    });
  }

  advance(id: string, dt: number, expectedSeq?: number): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/advance`, {
      dt,
      expected_seq: expectedSeq,
    });
  }

  setLevel(id: string, level: number | string, expectedSeq?: number): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/level`, {
      level,
      expected_seq: expectedSeq,
    });
  }

  reportIgnition(id: string, expectedSeq?: number): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/ignition`, {
      expected_seq: expectedSeq,
    });
  }
}
