// Typed client for the review API (versioned under /api/v1).
// The UI consumes only these endpoints; there are no private calls.

export interface RelationSummary {
  cce_id: string;
  sr: string;
  sr_theme: string;
  score: number;
  rank: number;
  label: string;
  explanation: string;
  annotator: string;
  labeled_at: string;
  second_labels: Record<string, string>;
}

export interface HistoryEntry {
  label: string;
  explanation: string;
  annotator: string;
  at: string;
}

export interface RelationDetail extends RelationSummary {
  history: HistoryEntry[];
  attributes: Record<string, string> | null;
}

export interface RelationPage {
  total: number;
  offset: number;
  limit: number;
  items: RelationSummary[];
}

export interface Progress {
  total: number;
  labeled: number;
  by_label: Record<string, number>;
  analyzable: number;
  unmapped_targets: number;
  acceptance_ratio: number | null;
}

export interface AgreementReport {
  available: boolean;
  reason?: string;
  source?: string;
  labels?: string[];
  matrix?: number[][];
  total?: number;
  overall?: number;
  per_label?: Record<string, number | null>;
  human_totals?: Record<string, number>;
  source_totals?: Record<string, number>;
  per_sr?: { sr: string; rate: number; disagreements: number; total: number }[];
}

export interface SessionInfo {
  name: string;
  config: Record<string, unknown>;
  sr_catalog: string[];
  second_sources: string[];
  progress: Progress;
}

export interface FieldError {
  field: string;
  message: string;
}

export class ApiError extends Error {
  status: number;
  fieldErrors: FieldError[];

  constructor(status: number, message: string, fieldErrors: FieldError[] = []) {
    super(message);
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const API = "/api/v1";

export class ApiClient {
  private fetchFn: FetchLike;
  private base: string;

  constructor(fetchFn?: FetchLike, base = "") {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
    this.base = base;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + API + path, init);
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()).detail;
      } catch {
        // non-JSON error body
      }
      if (Array.isArray(detail)) {
        const fields = detail.filter(
          (d): d is FieldError => typeof d === "object" && d !== null && "field" in d
        );
        throw new ApiError(response.status, "validation failed", fields);
      }
      throw new ApiError(response.status, String(detail ?? response.status));
    }
    return (await response.json()) as T;
  }

  session(): Promise<SessionInfo> {
    return this.request<SessionInfo>("/session");
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/progress");
  }

  agreement(): Promise<AgreementReport> {
    return this.request<AgreementReport>("/agreement");
  }

  listRelations(
    params: { label?: string; sr?: string; cce?: string; offset?: number; limit?: number } = {}
  ): Promise<RelationPage> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined && value !== "") query.set(key, String(value));
    }
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.request<RelationPage>(`/relations${suffix}`);
  }

  getRelation(cceId: string, sr: string): Promise<RelationDetail> {
    return this.request<RelationDetail>(
      `/relations/${encodeURIComponent(cceId)}/${encodeURIComponent(sr)}`
    );
  }

  submitLabel(
    cceId: string,
    sr: string,
    body: { label: string; explanation: string; annotator: string }
  ): Promise<RelationDetail> {
    return this.request<RelationDetail>(
      `/relations/${encodeURIComponent(cceId)}/${encodeURIComponent(sr)}/label`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }
    );
  }
}
