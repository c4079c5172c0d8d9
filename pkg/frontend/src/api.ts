/**
 * Typed client for the qcomplete HTTP service.
 *
 * Every response is validated against a zod schema before it reaches
 * the rest of the app, so a drifting server fails loudly here instead
 * of as undefined leaking into the view. Errors come back as
 * ApiError carrying the service's {code, message} envelope.
 */

import { z } from "zod";

// ---------------------------------------------------------------------------
// Wire shapes
// ---------------------------------------------------------------------------

export const columnSchema = z.object({
  table: z.string().nullable(),
  name: z.string(),
  type: z.string(),
  nullable: z.boolean(),
});

const cellSchema = z.union([z.string(), z.number(), z.null()]);

export const queryResultSchema = z.object({
  columns: z.array(columnSchema),
  rows: z.array(z.array(cellSchema)),
  truncated: z.boolean(),
});

export const atomSchema = z.object({
  column: z.string(),
  op: z.string(),
  value: cellSchema,
  or_null: z.boolean(),
  rendered: z.string(),
});

export const completionSchema = z.object({
  rendered: z.string(),
  atoms: z.array(atomSchema),
  row_count: z.number(),
  leaf_class: z.number(),
  leaf_purity: z.number(),
});

export const completionSetSchema = z.object({
  original_sql: z.string(),
  k_requested: z.number(),
  k_delivered: z.number(),
  completions: z.array(completionSchema),
  diagnostics: z.record(z.unknown()),
});

const errorEnvelopeSchema = z.object({
  code: z.string(),
  message: z.string(),
  detail: z.unknown().optional(),
});

export type QueryResult = z.infer<typeof queryResultSchema>;
export type Atom = z.infer<typeof atomSchema>;
export type Completion = z.infer<typeof completionSchema>;
export type CompletionSet = z.infer<typeof completionSetSchema>;

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiClientOptions {
  baseUrl: string;
  /** Injectable for tests; defaults to the global fetch. */
  fetchImpl?: FetchLike;
}

async function readError(resp: Response): Promise<ApiError> {
  try {
    const envelope = errorEnvelopeSchema.parse(await resp.json());
    return new ApiError(envelope.code, envelope.message, resp.status);
  } catch {
    return new ApiError("INTERNAL", `unexpected response (${resp.status})`, resp.status);
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(options: ApiClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async post(path: string, body: unknown, signal?: AbortSignal): Promise<unknown> {
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!resp.ok) throw await readError(resp);
    return resp.json();
  }

  async query(sql: string, maxRows?: number): Promise<QueryResult> {
    const body: Record<string, unknown> = { sql };
    if (maxRows !== undefined) body.max_rows = maxRows;
    return queryResultSchema.parse(await this.post("/query", body));
  }

  async complete(
    sql: string,
    k: number,
    seed?: number,
    signal?: AbortSignal,
  ): Promise<CompletionSet> {
    const body: Record<string, unknown> = { sql, k };
    if (seed !== undefined) body.seed = seed;
    return completionSetSchema.parse(await this.post("/complete", body, signal));
  }

  async uploadCsv(name: string, csv: string): Promise<void> {
    const resp = await this.fetchImpl(this.baseUrl + "/datasets", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ name, csv }),
    });
    if (!resp.ok) throw await readError(resp);
  }
}
