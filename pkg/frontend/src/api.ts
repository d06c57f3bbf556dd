/**
 * Typed client for the kgforage session service. Every number the UI shows
 * comes through here: the interface mirrors the JSON API one-to-one and the
 * client performs no computation beyond (de)serialization.
 */

export interface HopJson {
  property: string;
  agg: string;
  combine?: string;
}

export interface PlanJson {
  source_column: string;
  hops: HopJson[];
  output_name: string;
  rng_seed?: number;
}

export interface ColumnInfo {
  name: string;
  ctype: string;
  enabled: boolean;
  augmented: boolean;
  parent_column: string | null;
  plan?: PlanJson;
}

export interface HistogramJson {
  kind: "binned" | "categorical";
  edges?: Array<number | string>;
  counts?: number[];
  categories?: Array<[string, number]>;
}

export interface Descriptor {
  property: string;
  label: string;
  description: string;
  datatype: string;
  unit: string | null;
  coverage: number;
  cardinality: "one" | "many";
  examples: string[];
  distribution_sample: string[];
  aggregations: string[];
  intermediate_aggregations: string[];
  histogram: HistogramJson | null;
}

export interface SubgraphBranch {
  id: string;
  label: string;
  values?: string[];
  children?: SubgraphBranch[];
}

export interface SubgraphSample {
  root: { id: string; label: string };
  levels: Array<{ property: string; label: string; op: string }>;
  branches: SubgraphBranch[];
  computed_result: string | null;
}

export interface TablePreview {
  columns: string[];
  rows: Array<Array<string | null>>;
}

export interface JoinPreviewJson {
  rows: Array<string | null>;
  values: Array<string | null>;
  null_count: number;
  plan: PlanJson;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function check<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail ?? body);
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class KgForageApi {
  constructor(private readonly base: string = "") {}

  async createSession(file: File | Blob, backend?: string): Promise<{ session_id: string; columns: ColumnInfo[]; row_count: number }> {
    const form = new FormData();
    form.append("file", file, "upload.csv");
    if (backend) form.append("backend", backend);
    return check(await fetch(`${this.base}/sessions`, { method: "POST", body: form }));
  }

  async columns(sid: string): Promise<ColumnInfo[]> {
    const body = await check<{ columns: ColumnInfo[] }>(
      await fetch(`${this.base}/sessions/${sid}/columns`),
    );
    return body.columns;
  }

  async related(sid: string, column: string, seed?: number, signal?: AbortSignal): Promise<Descriptor[]> {
    const params = new URLSearchParams();
    if (seed !== undefined) params.set("seed", String(seed));
    const query = params.size ? `?${params}` : "";
    const body = await check<{ descriptors: Descriptor[] }>(
      await fetch(`${this.base}/sessions/${sid}/columns/${encodeURIComponent(column)}/related${query}`, { signal }),
    );
    return body.descriptors;
  }

  async previewJoin(sid: string, plan: PlanJson): Promise<JoinPreviewJson> {
    return check(
      await fetch(`${this.base}/sessions/${sid}/joins:preview`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(plan),
      }),
    );
  }

  async commitJoin(sid: string, plan: PlanJson): Promise<ColumnInfo[]> {
    const response = await fetch(`${this.base}/sessions/${sid}/joins`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(plan),
    });
    if (response.status === 202) {
      const { poll } = (await response.json()) as { poll: string };
      return this.pollJob(poll);
    }
    const body = await check<{ columns: ColumnInfo[] }>(response);
    return body.columns;
  }

  private async pollJob(poll: string): Promise<ColumnInfo[]> {
    for (;;) {
      const body = await check<{ status: string; columns?: ColumnInfo[]; error?: string }>(
        await fetch(`${this.base}${poll}`),
      );
      if (body.status === "done") return body.columns ?? [];
      if (body.status === "failed") throw new ApiError(422, body.error ?? "join failed");
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }

  async subgraph(
    sid: string,
    plan: PlanJson,
    rowIndex: number,
    opOverrides?: Record<number, string>,
  ): Promise<SubgraphSample> {
    return check(
      await fetch(`${this.base}/sessions/${sid}/subgraph`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ plan, row_index: rowIndex, op_overrides: opOverrides ?? {} }),
      }),
    );
  }

  async setEnabled(sid: string, column: string, enabled: boolean): Promise<ColumnInfo[]> {
    const body = await check<{ columns: ColumnInfo[] }>(
      await fetch(`${this.base}/sessions/${sid}/columns/${encodeURIComponent(column)}`, {
        method: "PATCH",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ enabled }),
      }),
    );
    return body.columns;
  }

  async tablePreview(sid: string, n = 10): Promise<TablePreview> {
    return check(await fetch(`${this.base}/sessions/${sid}/preview?n=${n}`));
  }

  exportUrl(sid: string): string {
    return `${this.base}/sessions/${sid}/export`;
  }
}
