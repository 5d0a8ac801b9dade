import { describe, expect, it } from "vitest";

import type { AnsweredPayload, SchemaPayload } from "../src/api";
import {
  renderFailed,
  renderOutcome,
  renderResultTable,
  renderSchema,
} from "../src/render";

const ANSWERED: AnsweredPayload = {
  verdict: "answered",
  ra_text: 'project[name](select[test_result == "NOK"](results))',
  optimized_ra_text: 'project[name](select[test_result == "NOK"](results))',
  resolutions: [
    { requested: "truck", resolved: "name", method: "synonym", distance: 0 },
  ],
  columns: ["name"],
  types: ["text"],
  rows: [["T-102"], ["T-105"]],
  timings: { interpreter: 0.001, execute: 0.0002 },
};

describe("renderOutcome: answered", () => {
  it("shows the RA expression, resolutions and every cell verbatim", () => {
    const card = renderOutcome(200, ANSWERED);
    expect(card.querySelector(".ra-text")?.textContent).toBe(ANSWERED.ra_text);
    expect(card.querySelector(".resolution-chip")?.textContent).toContain(
      "truck → name",
    );
    const cells = [...card.querySelectorAll("td")].map((td) => td.textContent);
    expect(cells).toEqual(["T-102", "T-105"]);
    expect(card.querySelector(".badge")?.textContent).toBe("answered");
  });

  it("renders null cells distinctly but empty", () => {
    const withNull = {
      ...ANSWERED,
      columns: ["name", "duration"],
      types: ["text", "float"],
      rows: [["T-102", null]] as (string | null)[][],
    };
    const card = renderOutcome(200, withNull);
    const nullCell = card.querySelector("td.null-cell");
    expect(nullCell).not.toBeNull();
    expect(nullCell?.textContent).toBe("");
  });
});

describe("renderOutcome: rejected", () => {
  it("shows the reason prominently with the stage", () => {
    const card = renderOutcome(422, {
      verdict: "rejected",
      reason: "subjective judgment required",
      stage: "interpreter",
    });
    expect(card.querySelector(".reason")?.textContent).toBe(
      "subjective judgment required",
    );
    expect(card.querySelector(".stage")?.textContent).toContain("interpreter");
    expect(card.querySelector(".badge")?.textContent).toBe("out-of-scope");
  });
});

describe("renderFailed with a parse position", () => {
  it("draws a caret under the reported column", () => {
    const card = renderFailed(
      {
        verdict: "failed",
        error: "1:16: expected comparison operator",
        stage: "parse",
        line: 1,
        column: 16,
      },
      "select[(results)",
    );
    const caret = card.querySelector(".caret")?.textContent ?? "";
    const [source, marker] = caret.split("\n");
    expect(source).toBe("select[(results)");
    expect(marker).toBe(" ".repeat(15) + "^");
  });
});

describe("result table interactions", () => {
  it("clicking a header sorts client-side without touching the payload", () => {
    const payload = {
      ...ANSWERED,
      rows: [["b"], ["a"]] as (string | null)[][],
    };
    const table = renderResultTable(payload);
    const header = table.querySelector("th");
    header?.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    const cells = [...table.querySelectorAll("td")].map((td) => td.textContent);
    expect(cells).toEqual(["a", "b"]);
    expect(payload.rows).toEqual([["b"], ["a"]]);
  });

  it("paginates past 50 rows", () => {
    const payload = {
      ...ANSWERED,
      rows: Array.from({ length: 61 }, (_, i) => [`row${i}`]),
    };
    const table = renderResultTable(payload);
    expect(table.querySelectorAll("td")).toHaveLength(50);
    expect(table.querySelector(".pager")?.textContent).toContain("page 1/2");
    const next = [...table.querySelectorAll("button")].find(
      (b) => b.textContent === "next",
    );
    next?.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(table.querySelectorAll("td")).toHaveLength(11);
  });
});

describe("renderSchema", () => {
  const SCHEMA: SchemaPayload = {
    catalog: {
      domain_context: "release gates",
      tables: {
        results: {
          columns: {
            name: {
              type: "text",
              nullable: false,
              description: "truck identifier",
              synonyms: ["truck", "trucks"],
            },
          },
        },
      },
    },
    rendered: "…",
  };

  it("one expandable section per table with synonym chips", () => {
    const view = renderSchema(SCHEMA, () => {});
    expect(view.querySelectorAll("details")).toHaveLength(1);
    expect(view.querySelector("summary")?.textContent).toBe("results");
    const chips = [...view.querySelectorAll(".synonym-chip")].map(
      (chip) => chip.textContent,
    );
    expect(chips).toEqual(["truck", "trucks"]);
  });

  it("clicking a column reports its canonical name", () => {
    const clicks: string[] = [];
    const view = renderSchema(SCHEMA, (name) => clicks.push(name));
    view
      .querySelector(".column-name")
      ?.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(clicks).toEqual(["name"]);
  });
});
