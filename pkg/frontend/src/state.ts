/**
 * Workbench state and transitions, free of any DOM concerns.
 *
 * The rules the view relies on:
 *  - completions are shown only for the editor text they were computed
 *    from; any edit to different text clears them;
 *  - adopting a completion replaces the editor text with that card's
 *    exact rendered query, marks the card, keeps the set visible and
 *    re-runs the query; adopting twice is a no-op on the text;
 *  - at most one /complete request is in flight; a newer one cancels
 *    the older;
 *  - a failed query leaves the last result grid untouched.
 */

import { ApiClient, ApiError, Atom, FetchLike, QueryResult } from "./api.js";

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

export type Status =
  | { kind: "idle" }
  | { kind: "running" }
  | { kind: "error"; source: "query" | "complete"; message: string };

export interface CompletionCard {
  rendered: string;
  atoms: Atom[];
  row_count: number;
  adopted: boolean;
}

export interface WorkbenchState {
  editor_text: string;
  k: number;
  last_result: QueryResult | null;
  completions: CompletionCard[];
  /** Editor text the current completion set was computed from. */
  completions_from: string | null;
  /** Canonical form of that query, the shared prefix of every card. */
  completions_prefix: string | null;
  status: Status;
}

export interface WorkbenchOptions {
  baseUrl: string;
  /** Forwarded to POST /complete when set; omitted otherwise. */
  seed?: number;
  fetchImpl?: FetchLike;
}

function initialState(): WorkbenchState {
  return {
    editor_text: "",
    k: 3,
    last_result: null,
    completions: [],
    completions_from: null,
    completions_prefix: null,
    status: { kind: "idle" },
  };
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}

function isAbort(error: unknown): boolean {
  return error instanceof Error && error.name === "AbortError";
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

export class Workbench {
  private state: WorkbenchState = initialState();
  private listeners: Array<(state: WorkbenchState) => void> = [];
  private readonly api: ApiClient;
  private readonly seed?: number;
  private inflight: AbortController | null = null;

  constructor(options: WorkbenchOptions) {
    this.api = new ApiClient(options);
    this.seed = options.seed;
  }

  getState(): Readonly<WorkbenchState> {
    return this.state;
  }

  subscribe(listener: (state: WorkbenchState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private setState(patch: Partial<WorkbenchState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  // --- edits -----------------------------------------------------------

  editText(text: string): void {
    if (text === this.state.editor_text) return;
    const keep = text === this.state.completions_from;
    this.setState({
      editor_text: text,
      ...(keep ? {} : { completions: [], completions_from: null, completions_prefix: null }),
    });
  }

  setK(k: number): void {
    if (!Number.isInteger(k) || k < 2) {
      this.setState({
        status: { kind: "error", source: "complete", message: "k must be an integer of at least 2" },
      });
      return;
    }
    this.setState({ k });
  }

  // --- server calls ----------------------------------------------------

  async submitQuery(): Promise<void> {
    const sql = this.state.editor_text;
    this.setState({ status: { kind: "running" } });
    try {
      const result = await this.api.query(sql);
      this.setState({ last_result: result, status: { kind: "idle" } });
    } catch (error) {
      // the previous grid stays; only the status reports the failure
      this.setState({ status: { kind: "error", source: "query", message: describe(error) } });
    }
  }

  async requestCompletions(): Promise<void> {
    if (this.state.k < 2) {
      this.setState({
        status: { kind: "error", source: "complete", message: "k must be an integer of at least 2" },
      });
      return;
    }
    const sql = this.state.editor_text;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.setState({ status: { kind: "running" } });
    try {
      const set = await this.api.complete(sql, this.state.k, this.seed, controller.signal);
      if (this.inflight !== controller) return; // a newer request took over
      this.inflight = null;
      if (this.state.editor_text !== sql) {
        // the editor moved on while we were waiting; the set is stale on arrival
        this.setState({ status: { kind: "idle" } });
        return;
      }
      this.setState({
        completions: set.completions.map((c) => ({
          rendered: c.rendered,
          atoms: c.atoms,
          row_count: c.row_count,
          adopted: false,
        })),
        completions_from: sql,
        completions_prefix: set.original_sql,
        status: { kind: "idle" },
      });
    } catch (error) {
      if (this.inflight !== controller) return; // superseded; the newer call reports
      this.inflight = null;
      if (isAbort(error)) return;
      this.setState({ status: { kind: "error", source: "complete", message: describe(error) } });
    }
  }

  async adoptCompletion(index: number): Promise<void> {
    const card = this.state.completions[index];
    if (card === undefined) return;
    this.setState({
      editor_text: card.rendered,
      completions: this.state.completions.map((c, i) =>
        i === index ? { ...c, adopted: true } : c,
      ),
      // the set stays on screen, now keyed to the adopted text
      completions_from: card.rendered,
      completions_prefix: this.state.completions_prefix,
    });
    await this.submitQuery();
  }
}
