// Scripted browser tests against the live session service. The console is
// server-authoritative, so every check compares the DOM against documents
// fetched straight from the API, and the final sweep proves that every
// number on the page appeared in a recorded API response.

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { beforeEach, describe, expect, inject, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { OperatorConsole } from "../src/console.js";
import type { DiagnosisDoc } from "../src/types.js";

const base = inject("apiBase" as never) as string;
const here = path.dirname(fileURLToPath(import.meta.url));
const GOLDEN_LOG = path.resolve(here, "../../tests/data/golden-session.jsonl");

interface Recorder {
  record: (requestPath: string, body: unknown) => void;
  paths: string[];
  numbers: Set<number>;
}

function makeRecorder(): Recorder {
  const paths: string[] = [];
  const numbers = new Set<number>();
  const collect = (value: unknown): void => {
    if (typeof value === "number") {
      numbers.add(value);
    } else if (Array.isArray(value)) {
      value.forEach(collect);
    } else if (value !== null && typeof value === "object") {
      Object.values(value).forEach(collect);
    }
  };
  return {
    record: (requestPath, body) => {
      paths.push(requestPath);
      collect(body);
    },
    paths,
    numbers,
  };
}

function uniqueId(prefix: string): string {
  return `${prefix}-${Date.now()}-${Math.floor(Math.random() * 1e6)}`;
}

async function bootConsole(sessionId: string) {
  const recorder = makeRecorder();
  const ui = new OperatorConsole(new ApiClient(base, recorder.record));
  document.body.append(ui.root);
  await ui.open("gas-compressor", sessionId);
  return { ui, recorder };
}

function $(selector: string): HTMLElement {
  const node = document.querySelector<HTMLElement>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

function setSelect(id: string, value: string): void {
  const select = document.getElementById(id) as HTMLSelectElement;
  select.value = value;
  select.dispatchEvent(new Event("change", { bubbles: true }));
}

function submitForm(id: string): void {
  $(`#${id}`).dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

function click(id: string): void {
  $(`#${id}`).dispatchEvent(new Event("click", { bubbles: true }));
}

async function fetchDiagnosis(sessionId: string): Promise<DiagnosisDoc> {
  const response = await fetch(`${base}/sessions/${sessionId}/diagnosis`);
  expect(response.ok).toBe(true);
  return (await response.json()) as DiagnosisDoc;
}

function expectAggregateMatches(doc: DiagnosisDoc): void {
  for (const [state, prob] of Object.entries(doc.aggregate)) {
    expect($(`[data-agg="${state}"]`).textContent).toBe(String(prob));
  }
  for (const [state, prob] of Object.entries(doc.detailed)) {
    expect($(`[data-detail="${state}"]`).textContent).toBe(String(prob));
  }
}

/** Text of every node outside [data-num] markers and form controls. */
function unmarkedText(root: Node): string {
  const skip = new Set(["TEXTAREA", "INPUT", "SCRIPT", "STYLE"]);
  const out: string[] = [];
  const walk = (node: Node): void => {
    if (node.nodeType === Node.TEXT_NODE) {
      out.push(node.textContent ?? "");
      return;
    }
    if (node instanceof Element) {
      if (skip.has(node.tagName) || node.hasAttribute("data-num")) return;
      node.childNodes.forEach(walk);
    }
  };
  walk(root);
  return out.join(" ");
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("operator console", () => {
  it("fresh session renders the server's prior and an expanded plan", async () => {
    const sessionId = uniqueId("ui-fresh");
    await bootConsole(sessionId);

    expectAggregateMatches(await fetchDiagnosis(sessionId));
    expect($("#evidence-list").textContent).toContain("no observations yet");
    expect($("#banner-seq").textContent).toBe("0");
    expect(document.querySelectorAll("#plan-tree [data-kind]").length).toBeGreaterThan(0);
  });

  it("posts an alarm via the form, matches /diagnosis verbatim, refetches the plan on a test result, and shows only traceable numbers", async () => {
    const sessionId = uniqueId("ui-loop");
    const { ui, recorder } = await bootConsole(sessionId);
    const planCount = () => recorder.paths.filter((p) => p.endsWith("/plan")).length;
    const plansAfterBoot = planCount();
    expect(plansAfterBoot).toBeGreaterThan(0);

    // Alarm arrives: record it through the observation form.
    setSelect("obs-node", "gas-level-1");
    setSelect("obs-outcome", "gas-detected");
    submitForm("observation-form");
    await ui.idle;

    const diagnosis = await fetchDiagnosis(sessionId);
    expect(diagnosis.evidence["gas-level-1"]).toBe("gas-detected");
    expectAggregateMatches(diagnosis);
    expect($("#evidence-list").textContent).toContain("gas-level-1 = gas-detected");
    expect($("#banner-seq").textContent).toBe(String(diagnosis.seq));

    // Record a test result from the plan panel; the plan must refetch.
    setSelect("tr-test", "gas-sample");
    setSelect("tr-outcome", "trace");
    submitForm("test-result-form");
    await ui.idle;

    expect(planCount()).toBe(plansAfterBoot + 2); // one per mutation refresh
    expect($("#plan-tree").getAttribute("data-seq")).toBe($("#banner-seq").textContent);
    expect($("#profile-table").textContent).toContain("test-result");

    // Zero client-side numeric computation: every displayed number is one
    // the console's own API client received, verbatim.
    const marked = document.querySelectorAll<HTMLElement>("[data-num]");
    expect(marked.length).toBeGreaterThan(20);
    for (const element of marked) {
      const value = Number(element.textContent);
      expect(Number.isNaN(value), `unparseable number ${element.textContent}`).toBe(false);
      expect(
        recorder.numbers.has(value),
        `displayed ${element.textContent} not found in any API response`,
      ).toBe(true);
    }
    // ... and nothing numeric leaks outside the marked elements.
    expect(unmarkedText(document.body)).not.toMatch(/\d+\.\d+/);
  });

  it("surfaces an optimistic-sequence conflict and recovers on refresh", async () => {
    const sessionId = uniqueId("ui-conflict");
    const { ui } = await bootConsole(sessionId);

    // Another operator advances the same session behind our back.
    const other = new ApiClient(base);
    await other.postObservation(sessionId, "pressure-a", "low");

    const input = document.getElementById("advance-dt") as HTMLInputElement;
    input.value = "1";
    submitForm("advance-form");
    await ui.idle;

    expect($("#conflict").hasAttribute("hidden")).toBe(false);
    expect($("#conflict").textContent).toContain("advanced elsewhere");

    click("conflict-refresh");
    await ui.idle;
    expect($("#conflict").hasAttribute("hidden")).toBe(true);
    expect($("#banner-seq").textContent).toBe("1");
    expect($("#evidence-list").textContent).toContain("pressure-a = low");
  });

  it("replays a stored event log step by step in drill mode", async () => {
    const { ui } = await bootConsole(uniqueId("ui-drill"));
    const log = readFileSync(GOLDEN_LOG, "utf-8");
    const eventCount = log.trim().split("\n").length;

    (document.getElementById("drill-log") as HTMLTextAreaElement).value = log;
    click("drill-load");
    await ui.idle;

    expect($("#banner-seq").textContent).toBe("0");
    expect(document.querySelectorAll("#drill-progress li").length).toBe(eventCount);
    expect(document.querySelectorAll("#drill-progress li.drill-done").length).toBe(1);

    for (let i = 1; i < eventCount; i += 1) {
      click("drill-step");
      await ui.idle;
      expect($("#error-bar").hasAttribute("hidden")).toBe(true);
    }
    expect(document.querySelectorAll("#drill-progress li.drill-done").length).toBe(eventCount);

    const drillId = $(".session-id").textContent!.replace("session ", "");
    expect(drillId).toMatch(/^drill-/);
    const diagnosis = await fetchDiagnosis(drillId);
    expectAggregateMatches(diagnosis);
    expect($("#banner-clock").textContent).toBe("0.5");
    expect($("#evidence-list").textContent).toContain("pressure-a = low");
    expect(document.querySelectorAll("#profile-table .profile-row").length).toBe(eventCount);
  });

  it("surfaces server validation errors inline", async () => {
    const { ui } = await bootConsole(uniqueId("ui-invalid"));
    const badLog =
      JSON.stringify({ seq: 0, timestamp: 0, kind: "session-created", payload: { scenario_id: "gas-compressor" } }) +
      "\n" +
      JSON.stringify({ seq: 1, timestamp: 0, kind: "observation", payload: { node: "no-such-node", outcome: "x" } });
    (document.getElementById("drill-log") as HTMLTextAreaElement).value = badLog;
    click("drill-load");
    await ui.idle;
    click("drill-step");
    await ui.idle;

    expect($("#error-bar").hasAttribute("hidden")).toBe(false);
    expect($("#error-bar").textContent).toContain("no-such-node");
  });

  it("routes evident ignition to forced shutdown and disables planning", async () => {
    const { ui } = await bootConsole(uniqueId("ui-ignition"));

    click("report-ignition"); // arm
    expect($("#report-ignition").textContent).toContain("Confirm");
    click("report-ignition"); // confirm
    await ui.idle;

    expect($("#forced-esd").hasAttribute("hidden")).toBe(false);
    expect($("#banner-severity").textContent).toBe("high");
    expect($("#plan-unavailable").textContent).toContain("planning unavailable");
    expect($("#rec-chosen").textContent).toBe("esd");
  });
});
