/** Typed client for the dialogue service HTTP API. */

import type { LabelSymbol } from "./labels.js";
import type { Ring } from "./geometry.js";

export interface CandidateView {
  id: string;
  geometry: Ring;
}

export interface ComparisonView {
  id: string;
  object_id: string;
  initial_geometry: Ring;
  a: CandidateView;
  b: CandidateView;
}

export interface Progress {
  answered: number;
  total: number;
}

export interface NextResponse {
  status: "comparison" | "complete";
  comparison?: ComparisonView;
  progress: Progress;
}

export interface FunctionView {
  constraints: string[];
  weights: number[];
  p: number;
}

export interface ReportRow {
  comparison_id: string;
  label: LabelSymbol;
  quality_a: number;
  quality_b: number;
  diff: number;
  compatible: boolean;
}

export interface Report {
  global_error_percent: number;
  rows: ReportRow[];
}

export interface JobView {
  job_id: string;
  status: "queued" | "running" | "done" | "failed";
  result?: { best_function: FunctionView; best_error_percent: number;
             initial_error_percent: number };
  error_message?: string;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      // non-JSON error body
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl = "") {}

  listSessions(): Promise<{ sessions: ({ session_id: string } & Progress)[] }> {
    return request(`${this.baseUrl}/api/sessions`);
  }

  next(sessionId: string): Promise<NextResponse> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/next`);
  }

  submitPreference(sessionId: string, comparisonId: string, label: LabelSymbol,
                   elapsedMs?: number): Promise<Progress> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/preferences`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        comparison_id: comparisonId,
        label,
        elapsed_ms: elapsedMs ?? null,
      }),
    });
  }

  startLearn(sessionId: string): Promise<{ job_id: string }> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/learn`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
  }

  job(jobId: string): Promise<JobView> {
    return request(`${this.baseUrl}/api/learn/${jobId}`);
  }

  report(sessionId: string, which: "initial" | "learnt"): Promise<Report> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/report?function=${which}`);
  }

  functions(sessionId: string): Promise<{ initial: FunctionView; learnt: FunctionView | null }> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/function`);
  }

  comparison(sessionId: string, comparisonId: string):
      Promise<{ comparison: ComparisonView; label: LabelSymbol | null }> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/comparisons/${comparisonId}`);
  }
}
