// Typed client for the solver service. Every number shown in the UI comes
// from these responses; the client never recomputes ranks locally.

export interface LocationEntry {
  location: number;
  score: number;
  is_true: boolean;
}

export interface RankView {
  top: LocationEntry[];
  protected_k: number;
}

export interface PhotoScore {
  id: string;
  true_score: number;
}

export interface InstanceSummary {
  id: string;
  num_photos: number;
  num_locations: number;
  true_location: number;
  score_kind: string;
  photo_scores: PhotoScore[];
  top: LocationEntry[];
  protected_k: number;
}

export interface PlanView {
  deleted: string[];
  kept: string[];
  protected_k: number;
  status: string;
}

export interface SolveResponse {
  plan: PlanView;
  report: {
    proved_optimal: boolean;
    nodes_explored: number;
    best_bound: number;
  };
  photo_scores: PhotoScore[];
  before: RankView;
  after: RankView;
}

export interface SolveParams {
  variant: "topk" | "budget";
  k?: number;
  d?: number;
  margin: number;
  keep: string[];
  time_cap?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

function detailText(body: unknown): string {
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === "string") return detail;
    if (detail && typeof detail === "object" && "errors" in detail) {
      return ((detail as { errors: unknown[] }).errors ?? []).join("; ");
    }
    return JSON.stringify(detail);
  }
  return JSON.stringify(body);
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, detailText(body));
  }
  return body as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  async uploadInstance(instance: unknown): Promise<string> {
    const body = await request<{ id: string }>(this.url("/instances"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(instance),
    });
    return body.id;
  }

  fetchSummary(id: string): Promise<InstanceSummary> {
    return request<InstanceSummary>(this.url(`/instances/${id}/summary`));
  }

  solve(instanceId: string, params: SolveParams): Promise<SolveResponse> {
    return request<SolveResponse>(this.url("/solve"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ instance_id: instanceId, ...params }),
    });
  }
}
