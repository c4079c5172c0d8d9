/**
 * Pure HTML renderers for the four workbench zones.
 *
 * Everything here maps state to strings; the DOM wiring lives in
 * main.ts. Keeping these pure makes the zone contents testable without
 * a browser, and guarantees the only data on screen is what the state
 * holds: in particular, grids show exactly the columns the service
 * returned, so internal bookkeeping like cluster ids can never leak in.
 */

import { CompletionCard, WorkbenchState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function cell(value: string | number | null): string {
  if (value === null) return '<td class="null">NULL</td>';
  return `<td>${escapeHtml(String(value))}</td>`;
}

// --- zone C: answer set ------------------------------------------------------

export function renderResult(state: WorkbenchState): string {
  const result = state.last_result;
  if (result === null) {
    return '<p class="placeholder">Run a query to see its answer set.</p>';
  }
  const banner = result.truncated
    ? `<div class="banner">showing first ${result.rows.length} rows</div>`
    : "";
  const head = result.columns.map((c) => `<th>${escapeHtml(c.name)}</th>`).join("");
  const body = result.rows
    .map((row) => `<tr>${row.map(cell).join("")}</tr>`)
    .join("");
  return (
    banner +
    `<table class="grid"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    `<p class="count">${result.rows.length} rows</p>`
  );
}

// --- zone D: completion set --------------------------------------------------

function renderCardSql(card: CompletionCard, prefix: string | null): string {
  // Rebuild the rendered query as shared prefix + injected atoms so the
  // new conditions can be styled apart from what the user already had.
  const atoms = card.atoms
    .map((a) => `<span class="injected">${escapeHtml(a.rendered)}</span>`)
    .join('<span class="kw"> AND </span>');
  if (prefix !== null && card.rendered.startsWith(prefix) && card.atoms.length > 0) {
    const joiner = prefix.includes(" WHERE ") ? " AND " : " WHERE ";
    return (
      `<span class="prefix">${escapeHtml(prefix)}</span>` +
      `<span class="kw">${joiner}</span>` +
      atoms
    );
  }
  return `<span class="prefix">${escapeHtml(card.rendered)}</span>`;
}

export function renderCompletions(state: WorkbenchState): string {
  if (state.status.kind === "error" && state.status.source === "complete") {
    return `<div class="error">${escapeHtml(state.status.message)}</div>`;
  }
  if (state.completions.length === 0) {
    return '<p class="placeholder">No completions yet.</p>';
  }
  return state.completions
    .map((card, i) => {
      const classes = card.adopted ? "card adopted" : "card";
      const label = card.adopted ? "adopted" : "adopt";
      return (
        `<div class="${classes}" data-index="${i}">` +
        `<div class="card-head"><span class="rows">${card.row_count} rows</span>` +
        `<button type="button" class="adopt" data-index="${i}">${label}</button></div>` +
        `<code class="sql">${renderCardSql(card, state.completions_prefix)}</code>` +
        `</div>`
      );
    })
    .join("");
}

// --- status / errors ---------------------------------------------------------

export function renderQueryError(state: WorkbenchState): string {
  if (state.status.kind === "error" && state.status.source === "query") {
    return `<div class="error">${escapeHtml(state.status.message)}</div>`;
  }
  return "";
}

export function renderStatus(state: WorkbenchState): string {
  switch (state.status.kind) {
    case "running":
      return "working…";
    case "error":
      return "error";
    default:
      return "";
  }
}
