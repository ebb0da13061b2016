// Thin typed client over the trial-service endpoints. The console never
// computes doses itself; everything displayed comes from these calls.

import type {
  CreateTrialRequest,
  CreateTrialResponse,
  CurvePayload,
  OutcomesResponse,
  SafetyPayload,
  TrialStatePayload,
} from "./types";

export type RecordResult =
  | { kind: "ok"; body: OutcomesResponse }
  | { kind: "conflict"; detail: string }
  | { kind: "invalid"; detail: string };

export class ServiceError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`service error ${status}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

async function detailOf(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string"
      ? body.detail
      : JSON.stringify(body.detail ?? body);
  } catch {
    return res.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.base + path);
    if (!res.ok) throw new ServiceError(res.status, await detailOf(res));
    return res.json() as Promise<T>;
  }

  async createTrial(
    req: CreateTrialRequest,
    idempotencyKey: string,
  ): Promise<CreateTrialResponse> {
    const res = await this.fetchFn(`${this.base}/trials`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...req, idempotency_key: idempotencyKey }),
    });
    if (!res.ok) throw new ServiceError(res.status, await detailOf(res));
    return res.json() as Promise<CreateTrialResponse>;
  }

  getTrial(trialId: string): Promise<TrialStatePayload> {
    return this.getJson(`/trials/${trialId}`);
  }

  // Safe to retry after a network failure: the expected_revision makes a
  // duplicate delivery surface as a conflict, which the caller resolves by
  // refetching state.
  async recordOutcomes(
    trialId: string,
    outcomes: [number, number],
    expectedRevision: number,
  ): Promise<RecordResult> {
    const res = await this.fetchFn(`${this.base}/trials/${trialId}/cohorts`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ outcomes, expected_revision: expectedRevision }),
    });
    if (res.ok) return { kind: "ok", body: await res.json() };
    const detail = await detailOf(res);
    if (res.status === 409) return { kind: "conflict", detail };
    if (res.status === 422) return { kind: "invalid", detail };
    throw new ServiceError(res.status, detail);
  }

  getCurve(
    trialId: string,
    nPoints: number,
    whatIfAlpha?: number,
  ): Promise<CurvePayload> {
    const params = new URLSearchParams({ n_points: String(nPoints) });
    if (whatIfAlpha !== undefined) {
      params.set("what_if_alpha", String(whatIfAlpha));
    }
    return this.getJson(`/trials/${trialId}/mtd-curve?${params}`);
  }

  getSafety(trialId: string): Promise<SafetyPayload> {
    return this.getJson(`/trials/${trialId}/safety`);
  }
}
