// Decision panel: the ranked shutdown levels at the horizon the escalation
// stopped at, with the chosen level highlighted and a level-set action so
// the operator can adopt a recommendation.

import { clear, el, num } from "../dom.js";
import type { RecommendationDoc } from "../types.js";

export class DecisionPanel {
  readonly root: HTMLElement;
  private readonly header: HTMLElement;
  private readonly tableBody: HTMLElement;
  private readonly forcedBox: HTMLElement;

  constructor(private readonly onAdopt: (level: number) => void) {
    this.header = el("p", { id: "rec-header" });
    this.forcedBox = el("p", { id: "forced-esd", class: "forced-esd", hidden: "" });
    this.tableBody = el("tbody", {});
    this.root = el(
      "section",
      { id: "panel-decision", class: "panel" },
      el("h2", {}, "Decision"),
      this.forcedBox,
      this.header,
      el(
        "table",
        { id: "rec-table" },
        el(
          "thead",
          {},
          el(
            "tr",
            {},
            el("th", {}, "level"),
            el("th", {}, "expected utility"),
            el("th", {}, "P(ignited) at horizon"),
            el("th", {}, ""),
          ),
        ),
        this.tableBody,
      ),
    );
  }

  render(doc: RecommendationDoc, currentLevel: number): void {
    clear(this.header);
    this.header.append(
      "Horizon ",
      num(doc.horizon_used, { "data-rec": "horizon" }),
      " h, P(ignited) at decision ",
      num(doc.ignition_prob_at_decision, { "data-rec": "ign-decision" }),
      ", recommends ",
      el("strong", { id: "rec-chosen" }, doc.chosen_name),
    );
    if (doc.forced_esd) {
      this.forcedBox.removeAttribute("hidden");
      this.forcedBox.textContent =
        "Ignition evident: emergency shutdown applies, ranking suspended.";
    } else {
      this.forcedBox.setAttribute("hidden", "");
      this.forcedBox.textContent = "";
    }
    clear(this.tableBody);
    for (const entry of doc.ranked) {
      const adopt = el("button", { type: "button", class: "adopt" }, "Adopt");
      adopt.addEventListener("click", () => this.onAdopt(entry.level));
      const row = el(
        "tr",
        {
          class: entry.level === doc.chosen ? "chosen" : "",
          "data-level": String(entry.level),
        },
        el(
          "td",
          {},
          entry.level_name,
          entry.level === currentLevel ? el("span", { class: "tag" }, " current") : null,
        ),
        el("td", {}, num(entry.expected_utility, { "data-col": "eu" })),
        el("td", {}, num(entry.ignition_prob_at_horizon, { "data-col": "ign" })),
        el("td", {}, adopt),
      );
      this.tableBody.append(row);
    }
  }
}
