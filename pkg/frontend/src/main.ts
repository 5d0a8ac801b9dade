/**
 * Console wiring: query box, outcome area, expert RA panel, schema sidebar,
 * session history. One query in flight at a time; submit stays disabled
 * while pending or while the box is empty.
 */

import { ApiClient, ServiceUnreachable, type OutcomePayload } from "./api";
import { SessionHistory, type SessionEntry } from "./history";
import {
  el,
  renderOfflineBanner,
  renderOutcome,
  renderSchema,
  verdictLabel,
} from "./render";
import "./styles.css";

const api = new ApiClient("");
const history = new SessionHistory();

export function summarize(payload: OutcomePayload): string {
  if (payload.verdict === "answered") {
    return `${payload.rows.length} rows · ${payload.ra_text}`;
  }
  if (payload.verdict === "rejected") return payload.reason;
  return payload.error;
}

export function setup() {
  const root = document.getElementById("app");
  if (!root) return;

  root.appendChild(el("h1", "", "gatelens console"));
  const layout = el("div", "layout");
  const mainCol = el("div", "main-col");
  const sideCol = el("div", "side-col");
  layout.append(mainCol, sideCol);
  root.appendChild(layout);

  // --- query form ---
  const form = el("div", "query-form");
  const input = document.createElement("textarea");
  input.placeholder = "Ask about the release test results…";
  input.rows = 2;
  const submit = el("button", "submit", "ask");
  const shotsBox = document.createElement("input");
  shotsBox.type = "number";
  shotsBox.min = "0";
  shotsBox.value = "0";
  shotsBox.title = "few-shot examples";
  form.append(input, shotsBox, submit);
  mainCol.appendChild(form);

  const outcomeArea = el("div", "outcome-area");
  mainCol.appendChild(outcomeArea);

  // --- expert RA panel ---
  const expert = el("div", "expert-panel");
  expert.appendChild(el("h2", "", "expert: edit and re-run RA"));
  const raBox = document.createElement("textarea");
  raBox.rows = 2;
  raBox.placeholder = "relational-algebra expression";
  const runRa = el("button", "run-ra", "run RA");
  expert.append(raBox, runRa);
  mainCol.appendChild(expert);

  // --- history ---
  const historyWrap = el("div", "history");
  historyWrap.appendChild(el("h2", "", "session history"));
  const historyList = el("ul", "history-list");
  historyWrap.appendChild(historyList);
  mainCol.appendChild(historyWrap);

  let pending = false;

  const refreshSubmit = () => {
    submit.disabled = pending || input.value.trim() === "";
    runRa.disabled = pending || raBox.value.trim() === "";
  };
  input.addEventListener("input", refreshSubmit);
  raBox.addEventListener("input", refreshSubmit);
  refreshSubmit();

  const addHistory = (entry: SessionEntry) => {
    history.add(entry);
    const item = el("li", `history-${entry.kind.replace(" ", "-")}`);
    const label = entry.kind === "expert edit" ? " [expert edit]" : "";
    const link = el("button", "history-replay",
                    `${entry.input}${label} — ${entry.verdict}`);
    link.title = entry.summary;
    link.addEventListener("click", () => {
      if (entry.kind === "query") {
        void runQuery(entry.input, entry.requestBody);
      } else {
        raBox.value = entry.input;
        void runExpert();
      }
    });
    item.appendChild(link);
    historyList.appendChild(item);
  };

  const showOutcome = (status: number, payload: OutcomePayload,
                       source?: string) => {
    outcomeArea.replaceChildren(renderOutcome(status, payload, source));
    if (payload.verdict === "answered") {
      raBox.value = payload.ra_text;
    }
    refreshSubmit();
  };

  async function runQuery(query: string, replayBody?: string) {
    pending = true;
    refreshSubmit();
    try {
      const shots = Number(shotsBox.value) || 0;
      const result = await api.submitQuery(query, shots, replayBody);
      showOutcome(result.status, result.payload);
      addHistory({
        kind: "query",
        input: query,
        requestBody: result.requestBody,
        verdict: verdictLabel(result.payload),
        summary: summarize(result.payload),
        timestamp: new Date(),
      });
    } catch (error) {
      if (error instanceof ServiceUnreachable) {
        outcomeArea.replaceChildren(
          renderOfflineBanner(() => void runQuery(query, replayBody)),
        );
      } else {
        throw error;
      }
    } finally {
      pending = false;
      refreshSubmit();
    }
  }

  async function runExpert() {
    const ra = raBox.value;
    pending = true;
    refreshSubmit();
    try {
      const result = await api.executeRa(ra);
      showOutcome(result.status, result.payload, ra);
      addHistory({
        kind: "expert edit",
        input: ra,
        requestBody: result.requestBody,
        verdict: verdictLabel(result.payload),
        summary: summarize(result.payload),
        timestamp: new Date(),
      });
    } catch (error) {
      if (error instanceof ServiceUnreachable) {
        outcomeArea.replaceChildren(
          renderOfflineBanner(() => void runExpert()),
        );
      } else {
        throw error;
      }
    } finally {
      pending = false;
      refreshSubmit();
    }
  }

  submit.addEventListener("click", () => void runQuery(input.value.trim()));
  runRa.addEventListener("click", () => void runExpert());

  // --- schema sidebar ---
  sideCol.appendChild(el("h2", "", "schema"));
  const schemaArea = el("div", "schema-area");
  sideCol.appendChild(schemaArea);
  const loadSchema = async () => {
    try {
      const schema = await api.schema();
      schemaArea.replaceChildren(
        renderSchema(schema, (column) => {
          const gap = input.value && !input.value.endsWith(" ") ? " " : "";
          input.value += gap + column;
          refreshSubmit();
          input.focus();
        }),
      );
    } catch (error) {
      if (error instanceof ServiceUnreachable) {
        schemaArea.replaceChildren(
          renderOfflineBanner(() => void loadSchema()),
        );
      } else {
        throw error;
      }
    }
  };
  void loadSchema();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  setup();
}
