// Stateful fake of the review API, seeded from recorded responses.
// Label submissions mutate its state with the same validation rules the
// real server applies (the rejection body shape is the recorded one).

import type { FetchLike } from "../src/api";

import relationsPending from "./fixtures/relations_pending.json";
import relationDetail from "./fixtures/relation_detail.json";
import agreementUnavailable from "./fixtures/agreement_unavailable.json";

type Json = Record<string, unknown>;

interface StoredRelation {
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
  history: { label: string; explanation: string; annotator: string; at: string }[];
  attributes: Record<string, string> | null;
}

function respond(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class FakeServer {
  relations = new Map<string, StoredRelation>();
  posts: { cce_id: string; sr: string; body: Json }[] = [];
  agreement: Json = agreementUnavailable as Json;
  networkDown = false;
  rejectNextWith: { status: number; body: Json } | null = null;

  constructor() {
    for (const item of (relationsPending as Json).items as Json[]) {
      const relation: StoredRelation = {
        ...(item as unknown as StoredRelation),
        history: [],
        attributes: null,
      };
      if (relation.cce_id === (relationDetail as Json).cce_id) {
        relation.attributes = (relationDetail as Json).attributes as Record<string, string>;
      }
      this.relations.set(`${relation.cce_id}|${relation.sr}`, relation);
    }
  }

  progress(): Json {
    const byLabel: Record<string, number> = { yes: 0, no: 0, maybe: 0, na: 0, pending: 0 };
    for (const rel of this.relations.values()) byLabel[rel.label] += 1;
    const analyzable = byLabel.yes + byLabel.no + byLabel.maybe;
    return {
      total: this.relations.size,
      labeled: this.relations.size - byLabel.pending,
      by_label: byLabel,
      analyzable,
      unmapped_targets: 0,
      acceptance_ratio: analyzable ? byLabel.yes / analyzable : null,
    };
  }

  fetch: FetchLike = async (input, init) => {
    if (this.networkDown) {
      throw new TypeError("fetch failed");
    }
    const url = new URL(input, "http://fake");
    const path = decodeURIComponent(url.pathname);
    const method = init?.method ?? "GET";

    if (method === "GET" && path === "/api/v1/relations") {
      let rows = [...this.relations.values()].sort((a, b) =>
        a.cce_id === b.cce_id ? a.rank - b.rank : a.cce_id < b.cce_id ? -1 : 1
      );
      const label = url.searchParams.get("label");
      const sr = url.searchParams.get("sr");
      const cce = url.searchParams.get("cce");
      if (label) rows = rows.filter((r) => r.label === label);
      if (sr) rows = rows.filter((r) => r.sr === sr);
      if (cce) rows = rows.filter((r) => r.cce_id.includes(cce));
      const offset = Number(url.searchParams.get("offset") ?? 0);
      const limit = Number(url.searchParams.get("limit") ?? 50);
      const items = rows.slice(offset, offset + limit).map(({ history, attributes, ...rest }) => rest);
      return respond({ total: rows.length, offset, limit, items });
    }

    const detailMatch = path.match(/^\/api\/v1\/relations\/([^/]+)\/([^/]+)$/);
    if (method === "GET" && detailMatch) {
      const relation = this.relations.get(`${detailMatch[1]}|${detailMatch[2]}`);
      if (!relation) return respond({ detail: "not found" }, 404);
      return respond(relation);
    }

    const labelMatch = path.match(/^\/api\/v1\/relations\/([^/]+)\/([^/]+)\/label$/);
    if (method === "POST" && labelMatch) {
      const key = `${labelMatch[1]}|${labelMatch[2]}`;
      const body = JSON.parse(String(init?.body ?? "{}")) as Json;
      this.posts.push({ cce_id: labelMatch[1], sr: labelMatch[2], body });
      if (this.rejectNextWith) {
        const forced = this.rejectNextWith;
        this.rejectNextWith = null;
        return respond(forced.body, forced.status);
      }
      const relation = this.relations.get(key);
      if (!relation) return respond({ detail: "not found" }, 404);
      const errors: { field: string; message: string }[] = [];
      const label = String(body.label ?? "");
      const explanation = String(body.explanation ?? "");
      const annotator = String(body.annotator ?? "");
      if (!["yes", "no", "maybe", "na"].includes(label)) {
        errors.push({ field: "label", message: "label must be yes, no, maybe, or na" });
      }
      if (["yes", "no", "maybe"].includes(label) && explanation.trim() === "") {
        errors.push({ field: "explanation", message: `label '${label}' requires an explanation` });
      }
      if (!annotator) {
        errors.push({ field: "annotator", message: "annotator id is required" });
      }
      if (errors.length) return respond({ detail: errors }, 422);
      relation.label = label;
      relation.explanation = explanation;
      relation.annotator = annotator;
      relation.labeled_at = "1970-01-01T00:00:00Z";
      relation.history.push({ label, explanation, annotator, at: relation.labeled_at });
      return respond(relation);
    }

    if (method === "GET" && path === "/api/v1/progress") {
      return respond(this.progress());
    }
    if (method === "GET" && path === "/api/v1/agreement") {
      return respond(this.agreement);
    }
    if (method === "GET" && path === "/api/v1/session") {
      return respond({
        name: "fake",
        config: {},
        sr_catalog: [],
        second_sources: [],
        progress: this.progress(),
      });
    }
    return respond({ detail: `unhandled ${method} ${path}` }, 500);
  };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
