/** Thin client for the survey service REST API.
 *
 * The fetch implementation is injectable so tests can stub the network, and
 * every failure is classified: NetworkError means the request never reached
 * the server (safe to retry), ApiError carries the HTTP status and any
 * field-level validation messages.
 */

import type {
  Demographics,
  ExperimentId,
  FieldError,
  ItemsPayload,
  SubmissionBody,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export class ApiError extends Error {
  readonly status: number;
  readonly fieldErrors: FieldError[];

  constructor(status: number, message: string, fieldErrors: FieldError[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

export type SubmitOutcome = "stored" | "duplicate";

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
    return response;
  }

  private async fail(response: Response): Promise<never> {
    let fieldErrors: FieldError[] = [];
    let detail = `HTTP ${response.status}`;
    try {
      const body = await response.json();
      if (Array.isArray(body.errors)) fieldErrors = body.errors;
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail, fieldErrors);
  }

  async registerParticipant(demographics: Demographics): Promise<string> {
    const response = await this.request("/api/participants", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ demographics }),
    });
    if (response.status !== 201) await this.fail(response);
    const body = await response.json();
    return body.participant_id as string;
  }

  async experimentItems(experiment: ExperimentId): Promise<ItemsPayload> {
    const response = await this.request(`/api/experiments/${experiment}/items`);
    if (!response.ok) await this.fail(response);
    return (await response.json()) as ItemsPayload;
  }

  /** POST one response. 201 -> "stored"; 409 -> "duplicate" (already
   * recorded, treated as success so the session can advance). */
  async submitResponse(body: SubmissionBody): Promise<SubmitOutcome> {
    const response = await this.request("/api/responses", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (response.status === 201) return "stored";
    if (response.status === 409) return "duplicate";
    return this.fail(response);
  }

  imageUrl(path: string): string {
    return path.startsWith("http") ? path : this.baseUrl + path;
  }
}
