/**
 * Drives the console's client + rendering against the real service running
 * in replay mode over the bundled benchmark. Boots `gatelens serve` as a
 * child process; everything is offline (recorded fixtures only).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { renderOutcome } from "../src/render";

const REPO = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "../..");
const PORT = 18081;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;
const api = new ApiClient(BASE);

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const health = await api.health();
      if (health.status === "ok") return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("service did not come up on " + BASE);
}

beforeAll(async () => {
  service = spawn(
    "python3",
    [
      "-m", "gatelens.cli",
      "--provider", "replay",
      "--fixtures", "benchmark/fixtures",
      "serve",
      "--port", String(PORT),
      "--catalog", "benchmark/catalog.json",
      "--data", "benchmark/data",
      "--examples", "benchmark/examples.jsonl",
    ],
    { cwd: REPO, stdio: "ignore" },
  );
  await waitForHealth();
}, 40_000);

afterAll(() => {
  service?.kill();
});

describe("console against the replay service", () => {
  it("NOK-trucks query renders the RA, a field resolution and the names", async () => {
    const result = await api.submitQuery(
      "Find some trucks for cases that are NOK",
    );
    expect(result.status).toBe(200);
    const card = renderOutcome(result.status, result.payload);

    expect(card.querySelector(".ra-text")?.textContent).toBe(
      'project[name](select[test_result == "NOK"](results))',
    );
    const chips = [...card.querySelectorAll(".resolution-chip")].map(
      (chip) => chip.textContent ?? "",
    );
    expect(chips.some((chip) => chip.includes("truck → name"))).toBe(true);

    const names = new Set(
      [...card.querySelectorAll("td")].map((td) => td.textContent),
    );
    expect(names).toEqual(new Set(["T-102", "T-104", "T-105"]));
  });

  it("the out-of-scope query renders a 422 reason card", async () => {
    const result = await api.submitQuery("What is the most beautiful truck?");
    expect(result.status).toBe(422);
    const card = renderOutcome(result.status, result.payload);
    expect(card.querySelector(".badge")?.textContent).toBe("out-of-scope");
    expect(card.querySelector(".reason")?.textContent).toContain("subjective");
    expect(card.querySelector(".stage")?.textContent).toContain("interpreter");
  });

  it("the expert panel re-executes an edited expression without a provider call", async () => {
    const before = await api.health();

    // as if the engineer had edited the model's expression by hand
    const edited =
      'distinct(project[name](select[test_result == "NOK"]' +
      '(select[release == "RC2"](results))))';
    const result = await api.executeRa(edited);
    expect(result.status).toBe(200);
    const card = renderOutcome(result.status, result.payload);
    const names = [...card.querySelectorAll("td")].map((td) => td.textContent);
    expect(new Set(names)).toEqual(new Set(["T-102", "T-104", "T-105"]));

    const after = await api.health();
    expect(after.provider_calls).toBe(before.provider_calls);
  });

  it("parse errors from the expert panel carry caret position info", async () => {
    const result = await api.executeRa("select[(results)");
    expect(result.status).toBe(422);
    expect(result.payload.verdict).toBe("failed");
    if (result.payload.verdict === "failed") {
      expect(result.payload.line).toBe(1);
      expect(result.payload.column).toBe(16);
    }
  });

  it("the schema endpoint feeds the browser with every column", async () => {
    const schema = await api.schema();
    const columns = Object.keys(schema.catalog.tables["results"]?.columns ?? {});
    expect(columns).toContain("test_result");
    expect(columns).toContain("name");
  });
});
