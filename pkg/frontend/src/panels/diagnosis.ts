// Diagnosis panel: aggregate belief and detailed posterior as labeled bars,
// the collected evidence, and the observation entry form.

import { bar, clear, el, num, option } from "../dom.js";
import type { DiagnosisDoc, ScenarioView } from "../types.js";

export class DiagnosisPanel {
  readonly root: HTMLElement;
  private readonly aggregateBox: HTMLElement;
  private readonly detailedBox: HTMLElement;
  private readonly evidenceBox: HTMLElement;
  private readonly nodeSelect: HTMLSelectElement;
  private readonly outcomeSelect: HTMLSelectElement;
  private scenario: ScenarioView | null = null;

  constructor(onObserve: (node: string, outcome: string) => void) {
    this.aggregateBox = el("div", { id: "diagnosis-aggregate" });
    this.detailedBox = el("div", { id: "diagnosis-detailed" });
    this.evidenceBox = el("ul", { id: "evidence-list" });
    this.nodeSelect = el("select", { id: "obs-node" });
    this.outcomeSelect = el("select", { id: "obs-outcome" });

    this.nodeSelect.addEventListener("change", () => this.fillOutcomes());

    const form = el(
      "form",
      { id: "observation-form" },
      el("label", {}, "Node ", this.nodeSelect),
      el("label", {}, "Outcome ", this.outcomeSelect),
      el("button", { type: "submit" }, "Record observation"),
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (this.nodeSelect.value) {
        onObserve(this.nodeSelect.value, this.outcomeSelect.value);
      }
    });

    this.root = el(
      "section",
      { id: "panel-diagnosis", class: "panel" },
      el("h2", {}, "Diagnosis"),
      el("h3", {}, "Aggregate leak state"),
      this.aggregateBox,
      el("h3", {}, "Detailed posterior"),
      this.detailedBox,
      el("h3", {}, "Evidence"),
      this.evidenceBox,
      form,
    );
  }

  setScenario(scenario: ScenarioView): void {
    this.scenario = scenario;
    clear(this.nodeSelect);
    for (const node of scenario.observation_nodes) {
      this.nodeSelect.append(option(node.name));
    }
    this.fillOutcomes();
  }

  private fillOutcomes(): void {
    clear(this.outcomeSelect);
    const node = this.scenario?.observation_nodes.find(
      (n) => n.name === this.nodeSelect.value,
    );
    for (const outcome of node?.outcomes ?? []) {
      this.outcomeSelect.append(option(outcome));
    }
  }

  render(doc: DiagnosisDoc): void {
    clear(this.aggregateBox);
    for (const [state, prob] of Object.entries(doc.aggregate)) {
      this.aggregateBox.append(
        el(
          "div",
          { class: "dist-row", "data-state": state },
          el("span", { class: "dist-label" }, state),
          bar(prob, `state-${state}`),
          num(prob, { "data-agg": state }),
        ),
      );
    }
    clear(this.detailedBox);
    for (const [state, prob] of Object.entries(doc.detailed)) {
      this.detailedBox.append(
        el(
          "div",
          { class: "dist-row", "data-state": state },
          el("span", { class: "dist-label" }, state),
          bar(prob, "state-detailed"),
          num(prob, { "data-detail": state }),
        ),
      );
    }
    clear(this.evidenceBox);
    const entries = Object.entries(doc.evidence);
    if (entries.length === 0) {
      this.evidenceBox.append(el("li", { class: "muted" }, "no observations yet"));
    }
    for (const [node, outcome] of entries) {
      this.evidenceBox.append(el("li", { "data-evidence": node }, `${node} = ${outcome}`));
    }
  }
}
