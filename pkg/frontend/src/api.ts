/**
 * Typed client for the gatelens HTTP API.
 *
 * The console performs no computation on row data; everything here is a
 * straight serialization boundary. Request bodies are built once as strings
 * and kept, so re-submitting a history entry sends byte-identical bytes.
 */

export interface Resolution {
  requested: string;
  resolved: string;
  method: string;
  distance: number;
}

export interface AnsweredPayload {
  verdict: "answered";
  ra_text: string;
  optimized_ra_text: string;
  resolutions: Resolution[];
  columns: string[];
  types: string[];
  rows: (string | null)[][];
  timings: Record<string, number>;
}

export interface RejectedPayload {
  verdict: "rejected";
  reason: string;
  stage: string;
  timings?: Record<string, number>;
}

export interface FailedPayload {
  verdict: "failed";
  error: string;
  kind?: string;
  stage: string;
  line?: number;
  column?: number;
  timings?: Record<string, number>;
}

export type OutcomePayload = AnsweredPayload | RejectedPayload | FailedPayload;

export interface ColumnInfo {
  type: string;
  nullable: boolean;
  description: string;
  synonyms: string[];
}

export interface SchemaPayload {
  catalog: {
    domain_context: string;
    tables: Record<string, { columns: Record<string, ColumnInfo> }>;
  };
  rendered: string;
}

export interface HealthPayload {
  status: string;
  provider_calls: number;
}

export interface QueryResult {
  status: number;
  payload: OutcomePayload;
  /** exact body bytes that were sent; reuse for byte-identical resubmission */
  requestBody: string;
}

/** Service did not answer at all (network down, not an HTTP error). */
export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super("service unreachable");
    this.cause = cause;
  }
}

async function postJson(
  url: string,
  body: string,
): Promise<{ status: number; json: unknown }> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body,
    });
  } catch (cause) {
    throw new ServiceUnreachable(cause);
  }
  return { status: response.status, json: await response.json() };
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async health(): Promise<HealthPayload> {
    let response: Response;
    try {
      response = await fetch(`${this.base}/api/health`);
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    return (await response.json()) as HealthPayload;
  }

  async schema(): Promise<SchemaPayload> {
    let response: Response;
    try {
      response = await fetch(`${this.base}/api/schema`);
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    return (await response.json()) as SchemaPayload;
  }

  buildQueryBody(query: string, shots = 0): string {
    return JSON.stringify({ query, shots });
  }

  /** POST /api/query; pass a previously built body to replay it exactly. */
  async submitQuery(
    query: string,
    shots = 0,
    requestBody?: string,
  ): Promise<QueryResult> {
    const body = requestBody ?? this.buildQueryBody(query, shots);
    const { status, json } = await postJson(`${this.base}/api/query`, body);
    return { status, payload: json as OutcomePayload, requestBody: body };
  }

  /** POST /api/ra/execute: expert mode, never invokes the model provider. */
  async executeRa(ra: string): Promise<QueryResult> {
    const body = JSON.stringify({ ra });
    const { status, json } = await postJson(
      `${this.base}/api/ra/execute`,
      body,
    );
    return { status, payload: json as OutcomePayload, requestBody: body };
  }
}
