/** Thin typed client for the advisory service; performs no computation. */

import type { AdviseRequest, AdviseResponse } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  status: number;
  fieldErrors: { field?: string; message: string }[];

  constructor(status: number, fieldErrors: { field?: string; message: string }[]) {
    super(`API error ${status}: ${fieldErrors.map((e) => e.message).join("; ")}`);
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

export class ServiceUnavailable extends Error {}

export class ApiClient {
  private baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (input, init) => fetch(input, init)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceUnavailable(String(err));
    }
    if (response.status === 503) {
      throw new ServiceUnavailable("service artifacts not loaded");
    }
    if (response.status === 400) {
      const payload = await response.json().catch(() => ({ errors: [] }));
      throw new ApiError(400, payload.errors ?? [{ message: "bad request" }]);
    }
    if (!response.ok) {
      throw new ApiError(response.status, [{ message: response.statusText }]);
    }
    return (await response.json()) as T;
  }

  advise(request: AdviseRequest): Promise<AdviseResponse> {
    return this.post<AdviseResponse>("/advise", request);
  }

  async policies(earlyRange: number, lateRange: number | null): Promise<string[]> {
    const params = new URLSearchParams({ early_range: String(earlyRange) });
    if (lateRange !== null) params.set("late_range", String(lateRange));
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/policies?${params}`);
    } catch (err) {
      throw new ServiceUnavailable(String(err));
    }
    if (!response.ok) {
      throw new ApiError(response.status, [{ message: response.statusText }]);
    }
    const payload = (await response.json()) as { policies: string[] };
    return payload.policies;
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchImpl(`${this.baseUrl}/health`);
      return response.ok;
    } catch {
      return false;
    }
  }
}
