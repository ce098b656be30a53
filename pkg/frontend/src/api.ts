/**
 * Typed client for the clusterlens HTTP service.
 *
 * Only report requests (explain/compare) participate in latest-wins
 * cancellation: starting a new one aborts the one in flight, so the
 * report panel can never show a stale answer that arrived late.
 */

export interface FeatureStats {
  min: number | null;
  max: number | null;
  mean: number | null;
  missing_count: number;
  distinct_count: number;
}

export interface FeatureSummary {
  name: string;
  stats: FeatureStats;
}

export interface DatasetSummary {
  dataset_id: string;
  n_rows: number;
  features: FeatureSummary[];
}

export interface ProjectionResult {
  projection_id: string;
  method: string;
  /** One [x, y] pair per dataset row, row-aligned. */
  coords: [number, number][];
}

export interface RankedFeature {
  name: string;
  importance: number;
  share: number;
}

/** Piecewise-constant term: contributions has edges.length + 2 entries
 * (underflow/regular bins, overflow bin, missing bin). */
export interface ShapeFunction {
  edges: number[];
  contributions: number[];
}

export interface ReportMeta {
  seed: number;
  config: Record<string, unknown>;
  logloss: number;
  auc: number;
  n_pos: number;
  n_neg: number;
  no_separating_signal: boolean;
  model_id: string;
  selection_a_size?: number;
  selection_b_size?: number;
}

export interface Report {
  mode: "one-vs-rest" | "comparison";
  ranked: RankedFeature[];
  shapes: Record<string, ShapeFunction>;
  meta: ReportMeta;
  direction_note?: string;
}

/** Error payload shared by every non-2xx service response. */
export interface ServiceErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}

/** The service answered with a structured error (400/404/422). */
export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ServiceErrorBody,
  ) {
    super(body.message);
    this.name = "ServiceError";
  }
}

/** Superseded by a newer request; the UI should ignore it silently. */
export class RequestSuperseded extends Error {
  constructor() {
    super("request superseded by a newer one");
    this.name = "RequestSuperseded";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readError(resp: Response): Promise<never> {
  let body: ServiceErrorBody;
  try {
    const doc = (await resp.json()) as { error: ServiceErrorBody };
    body = doc.error;
  } catch {
    body = { code: "http_error", message: `HTTP ${resp.status}`, detail: {} };
  }
  throw new ServiceError(resp.status, body);
}

export class ApiClient {
  private reportAbort: AbortController | null = null;

  constructor(
    public baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async uploadDataset(file: File | Blob, name = "dataset.csv"): Promise<DatasetSummary> {
    const form = new FormData();
    form.append("file", file, name);
    const resp = await this.fetchFn(this.url("/datasets"), {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await readError(resp);
    return (await resp.json()) as DatasetSummary;
  }

  async computePca(datasetId: string): Promise<ProjectionResult> {
    const resp = await this.fetchFn(this.url(`/datasets/${datasetId}/projection`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ method: "pca" }),
    });
    if (!resp.ok) await readError(resp);
    return (await resp.json()) as ProjectionResult;
  }

  async uploadProjection(datasetId: string, file: File | Blob): Promise<ProjectionResult> {
    const form = new FormData();
    form.append("file", file, "coords.csv");
    const resp = await this.fetchFn(this.url(`/datasets/${datasetId}/projection`), {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await readError(resp);
    return (await resp.json()) as ProjectionResult;
  }

  /**
   * POST /explain for one selection. A seed is only sent when the
   * caller pins one; otherwise the service draws it and echoes it in
   * report.meta.seed.
   */
  async requestExplain(
    datasetId: string,
    pointIds: number[],
    seed?: number,
  ): Promise<Report> {
    const payload: Record<string, unknown> = {
      dataset_id: datasetId,
      selection: pointIds,
    };
    if (seed !== undefined) payload.seed = seed;
    return this.postReport("/explain", payload);
  }

  /** POST /compare for two disjoint selections. */
  async requestCompare(
    datasetId: string,
    selectionA: number[],
    selectionB: number[],
    seed?: number,
  ): Promise<Report> {
    const payload: Record<string, unknown> = {
      dataset_id: datasetId,
      selection_a: selectionA,
      selection_b: selectionB,
    };
    if (seed !== undefined) payload.seed = seed;
    return this.postReport("/compare", payload);
  }

  private async postReport(path: string, payload: unknown): Promise<Report> {
    // latest wins: cancel whatever report request is still in flight
    this.reportAbort?.abort();
    const abort = new AbortController();
    this.reportAbort = abort;

    let resp: Response;
    try {
      resp = await this.fetchFn(this.url(path), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
        signal: abort.signal,
      });
    } catch (err) {
      if (abort.signal.aborted) throw new RequestSuperseded();
      throw err;
    }
    if (abort.signal.aborted) throw new RequestSuperseded();
    if (!resp.ok) await readError(resp);
    return (await resp.json()) as Report;
  }

  async getTerm(modelId: string, feature: string): Promise<ShapeFunction> {
    const resp = await this.fetchFn(
      this.url(`/models/${modelId}/terms/${encodeURIComponent(feature)}`),
    );
    if (!resp.ok) await readError(resp);
    return (await resp.json()) as ShapeFunction;
  }
}
