// Plan panel: the contingent information-gathering plan as a collapsible
// tree. Each choice node's best alternative is flagged, so the chain of
// flags from the root is the recommended policy path. Recording a test
// result posts one event and the whole console refreshes from the server.

import { clear, el, num, option } from "../dom.js";
import type {
  ActNowLeafDoc,
  ChoiceNodeDoc,
  IgnitionLeafDoc,
  OutcomeBranchDoc,
  PlanDoc,
  PlanNodeDoc,
  ScenarioView,
} from "../types.js";

const HEURISTICS = ["highest-ev-path", "probability-weighted"];

export class PlanPanel {
  readonly root: HTMLElement;
  private readonly summaryBox: HTMLElement;
  private readonly treeBox: HTMLElement;
  private readonly testSelect: HTMLSelectElement;
  private readonly outcomeSelect: HTMLSelectElement;
  private readonly heuristicSelect: HTMLSelectElement;
  private scenario: ScenarioView | null = null;

  constructor(
    onTestResult: (testId: string, outcome: string) => void,
    onReplan: (heuristic: string) => void,
  ) {
    this.summaryBox = el("div", { id: "plan-summary" });
    this.treeBox = el("div", { id: "plan-tree" });
    this.testSelect = el("select", { id: "tr-test" });
    this.outcomeSelect = el("select", { id: "tr-outcome" });
    this.heuristicSelect = el("select", { id: "plan-heuristic" });
    for (const h of HEURISTICS) this.heuristicSelect.append(option(h));

    this.testSelect.addEventListener("change", () => this.fillOutcomes());

    const replan = el("button", { type: "button", id: "plan-replan" }, "Recompute plan");
    replan.addEventListener("click", () => onReplan(this.heuristicSelect.value));

    const form = el(
      "form",
      { id: "test-result-form" },
      el("label", {}, "Test ", this.testSelect),
      el("label", {}, "Outcome ", this.outcomeSelect),
      el("button", { type: "submit" }, "Record test result"),
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (this.testSelect.value) {
        onTestResult(this.testSelect.value, this.outcomeSelect.value);
      }
    });

    this.root = el(
      "section",
      { id: "panel-plan", class: "panel" },
      el("h2", {}, "Information-gathering plan"),
      el("div", { class: "plan-controls" }, el("label", {}, "Heuristic ", this.heuristicSelect), replan),
      this.summaryBox,
      this.treeBox,
      form,
    );
  }

  setScenario(scenario: ScenarioView): void {
    this.scenario = scenario;
    clear(this.testSelect);
    for (const test of scenario.tests) {
      this.testSelect.append(option(test.id, test.label));
    }
    this.fillOutcomes();
  }

  private fillOutcomes(): void {
    clear(this.outcomeSelect);
    const test = this.scenario?.tests.find((t) => t.id === this.testSelect.value);
    for (const outcome of test?.outcomes ?? []) {
      this.outcomeSelect.append(option(outcome));
    }
  }

  renderUnavailable(message: string): void {
    clear(this.summaryBox);
    clear(this.treeBox);
    this.treeBox.append(el("p", { class: "muted", id: "plan-unavailable" }, message));
  }

  render(doc: PlanDoc): void {
    clear(this.summaryBox);
    this.summaryBox.append(
      el(
        "p",
        {},
        "Best expected utility ",
        num(doc.best_eu, { id: "plan-best-eu" }),
        " vs act-now ",
        num(doc.act_now_eu, { id: "plan-act-now-eu" }),
        " after ",
        num(doc.expansions_used, { id: "plan-expansions" }),
        " expansions",
        doc.frontier.length === 0
          ? " (tree fully expanded)"
          : " (expandable paths remain)",
      ),
    );
    clear(this.treeBox);
    this.treeBox.setAttribute("data-seq", String(doc.seq));
    this.treeBox.append(renderNode(doc.root, true));
  }
}

function renderNode(node: PlanNodeDoc, onPolicyPath: boolean): HTMLElement {
  switch (node.kind) {
    case "choice":
      return renderChoice(node, onPolicyPath);
    case "outcome-branch":
      return renderBranch(node, onPolicyPath);
    case "act-now-leaf":
      return renderActNow(node, onPolicyPath);
    case "ignition-leaf":
      return renderIgnition(node);
  }
}

function nodeBox(cssClass: string, onPolicyPath: boolean): HTMLDetailsElement {
  const box = el("details", {
    class: `plan-node ${cssClass}${onPolicyPath ? " argmax" : ""}`,
    open: "",
  });
  return box;
}

function renderChoice(node: ChoiceNodeDoc, onPolicyPath: boolean): HTMLElement {
  const box = nodeBox("plan-choice", onPolicyPath);
  box.setAttribute("data-kind", "choice");
  box.setAttribute("data-argmax", node.argmax);
  box.append(
    el("summary", {}, "Choice, EU ", num(node.eu), ", best: ", el("strong", {}, node.argmax)),
    renderNode(node.act_now, onPolicyPath && node.argmax === "act-now"),
  );
  for (const branch of node.tests) {
    box.append(renderNode(branch, onPolicyPath && node.argmax === branch.test_id));
  }
  return box;
}

function renderBranch(node: OutcomeBranchDoc, onPolicyPath: boolean): HTMLElement {
  const box = nodeBox("plan-branch", onPolicyPath);
  box.setAttribute("data-kind", "outcome-branch");
  box.setAttribute("data-test", node.test_id);
  box.append(
    el(
      "summary",
      {},
      "Run ",
      el("strong", {}, node.test_id),
      ", EU ",
      num(node.eu),
      ", interrupt risk ",
      num(node.ignition_prob),
    ),
    renderNode(node.ignition_child, false),
  );
  for (const { outcome, prob, child } of node.outcomes) {
    const wrap = el(
      "div",
      { class: "plan-outcome", "data-outcome": outcome },
      el("p", { class: "outcome-head" }, `${node.test_id} = ${outcome}, p `, num(prob)),
      renderNode(child, onPolicyPath),
    );
    box.append(wrap);
  }
  return box;
}

function renderActNow(node: ActNowLeafDoc, onPolicyPath: boolean): HTMLElement {
  const rec = node.recommendation;
  const box = nodeBox("plan-act-now", onPolicyPath);
  box.setAttribute("data-kind", "act-now-leaf");
  box.append(
    el(
      "summary",
      {},
      "Act now: ",
      el("strong", {}, rec.chosen_name),
      " at horizon ",
      num(rec.horizon_used),
      " h, EU ",
      num(node.eu),
    ),
    el(
      "p",
      { class: "leaf-detail" },
      "elapsed ",
      num(node.time),
      " h, spent ",
      num(node.cost),
    ),
  );
  return box;
}

function renderIgnition(node: IgnitionLeafDoc): HTMLElement {
  const box = nodeBox("plan-ignition", false);
  box.setAttribute("data-kind", "ignition-leaf");
  box.removeAttribute("open");
  box.append(
    el("summary", {}, "Ignition during test, EU ", num(node.eu)),
    el(
      "p",
      { class: "leaf-detail" },
      "elapsed ",
      num(node.time),
      " h, spent ",
      num(node.cost),
    ),
  );
  return box;
}
