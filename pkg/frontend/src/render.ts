/**
 * DOM rendering for outcomes, result tables, resolutions and the schema
 * browser. Everything goes through textContent; row cells render exactly the
 * strings the API sent (nulls show as an empty struck cell).
 */

import type {
  AnsweredPayload,
  FailedPayload,
  OutcomePayload,
  RejectedPayload,
  Resolution,
  SchemaPayload,
} from "./api";
import {
  initialTableState,
  nextSortState,
  pageCount,
  pageSlice,
  PAGE_SIZE,
  type TableState,
  visibleOrder,
} from "./table";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function verdictLabel(payload: OutcomePayload): string {
  if (payload.verdict === "answered") return "answered";
  if (payload.verdict === "rejected") return "out-of-scope";
  return "failed";
}

function renderResolutions(resolutions: Resolution[]): HTMLElement {
  const wrap = el("div", "resolutions");
  for (const res of resolutions) {
    wrap.appendChild(
      el(
        "span",
        "resolution-chip",
        `${res.requested} → ${res.resolved} (${res.method}` +
          (res.distance > 0 ? `, distance ${res.distance}` : "") +
          ")",
      ),
    );
  }
  return wrap;
}

function renderTimings(timings: Record<string, number> | undefined): HTMLElement {
  const line = el("div", "timings");
  if (timings) {
    const total = Object.values(timings).reduce((a, b) => a + b, 0);
    line.textContent =
      Object.entries(timings)
        .map(([stage, seconds]) => `${stage} ${(seconds * 1000).toFixed(1)}ms`)
        .join(" · ") + ` · total ${(total * 1000).toFixed(1)}ms`;
  }
  return line;
}

export function renderResultTable(payload: AnsweredPayload): HTMLElement {
  const container = el("div", "result-table");
  let state: TableState = initialTableState();

  const draw = () => {
    container.replaceChildren();
    const ordered = visibleOrder(payload.rows, payload.types, state);
    const table = el("table");
    const head = el("tr");
    payload.columns.forEach((column, index) => {
      const th = el("th", "sortable", column);
      if (state.sortColumn === index) {
        th.textContent += state.descending ? " ▼" : " ▲";
      }
      th.addEventListener("click", () => {
        state = nextSortState(state, index);
        draw();
      });
      head.appendChild(th);
    });
    table.appendChild(head);
    for (const row of pageSlice(ordered, state.page)) {
      const tr = el("tr");
      for (const cell of row) {
        tr.appendChild(
          cell === null ? el("td", "null-cell") : el("td", "", cell),
        );
      }
      table.appendChild(tr);
    }
    container.appendChild(table);

    const pages = pageCount(ordered.length);
    const pager = el("div", "pager");
    pager.appendChild(
      el("span", "row-count", `${ordered.length} rows`),
    );
    if (pages > 1) {
      const prev = el("button", "", "prev");
      prev.disabled = state.page === 0;
      prev.addEventListener("click", () => {
        state = { ...state, page: state.page - 1 };
        draw();
      });
      const next = el("button", "", "next");
      next.disabled = state.page >= pages - 1;
      next.addEventListener("click", () => {
        state = { ...state, page: state.page + 1 };
        draw();
      });
      pager.append(
        prev,
        el("span", "", `page ${state.page + 1}/${pages} (${PAGE_SIZE}/page)`),
        next,
      );
    }
    container.appendChild(pager);
  };

  draw();
  return container;
}

function renderAnswered(payload: AnsweredPayload): HTMLElement {
  const card = el("div", "outcome answered");
  card.appendChild(el("span", "badge badge-answered", "answered"));
  card.appendChild(el("pre", "ra-text", payload.ra_text));
  if (payload.optimized_ra_text !== payload.ra_text) {
    card.appendChild(
      el("pre", "ra-text ra-optimized", payload.optimized_ra_text),
    );
  }
  if (payload.resolutions.length) {
    card.appendChild(renderResolutions(payload.resolutions));
  }
  card.appendChild(renderResultTable(payload));
  card.appendChild(renderTimings(payload.timings));
  return card;
}

function renderRejected(payload: RejectedPayload): HTMLElement {
  const card = el("div", "outcome rejected");
  card.appendChild(el("span", "badge badge-rejected", "out-of-scope"));
  card.appendChild(el("p", "reason", payload.reason));
  card.appendChild(el("p", "stage", `rejected at stage: ${payload.stage}`));
  return card;
}

function caretLine(column: number): string {
  return " ".repeat(Math.max(0, column - 1)) + "^";
}

export function renderFailed(
  payload: FailedPayload,
  source?: string,
): HTMLElement {
  const card = el("div", "outcome failed");
  card.appendChild(el("span", "badge badge-failed", "failed"));
  card.appendChild(el("p", "error", payload.error));
  card.appendChild(el("p", "stage", `stage: ${payload.stage}`));
  if (source !== undefined && payload.line && payload.column) {
    const lines = source.split("\n");
    const offending = lines[payload.line - 1] ?? "";
    card.appendChild(
      el("pre", "caret", `${offending}\n${caretLine(payload.column)}`),
    );
  }
  return card;
}

export function renderOutcome(
  status: number,
  payload: OutcomePayload,
  source?: string,
): HTMLElement {
  if (payload.verdict === "answered") return renderAnswered(payload);
  if (payload.verdict === "rejected") return renderRejected(payload);
  return renderFailed(payload, source);
}

export function renderOfflineBanner(onRetry: () => void): HTMLElement {
  const banner = el("div", "offline-banner");
  banner.appendChild(el("span", "", "service unreachable"));
  const retry = el("button", "retry", "retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  return banner;
}

export function renderSchema(
  schema: SchemaPayload,
  onColumnClick: (name: string) => void,
): HTMLElement {
  const wrap = el("div", "schema");
  if (schema.catalog.domain_context) {
    wrap.appendChild(el("p", "domain-context", schema.catalog.domain_context));
  }
  for (const [tableName, table] of Object.entries(schema.catalog.tables)) {
    const details = document.createElement("details");
    details.appendChild(el("summary", "table-name", tableName));
    for (const [columnName, info] of Object.entries(table.columns)) {
      const row = el("div", "schema-column");
      const name = el("button", "column-name", columnName);
      name.addEventListener("click", () => onColumnClick(columnName));
      row.appendChild(name);
      row.appendChild(
        el("span", "column-type",
           `${info.type}${info.nullable ? "?" : ""}`),
      );
      if (info.description) {
        row.appendChild(el("span", "column-desc", info.description));
      }
      for (const synonym of info.synonyms) {
        row.appendChild(el("span", "synonym-chip", synonym));
      }
      details.appendChild(row);
    }
    wrap.appendChild(details);
  }
  return wrap;
}
