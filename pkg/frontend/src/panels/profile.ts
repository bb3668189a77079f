// Profile panel: the risk history of the session. A sparkline sketches the
// ignition-probability trend (geometry only); the table below re-displays
// the server's numbers and severity routing per event.

import { clear, el, num } from "../dom.js";
import type { ProfileDoc } from "../types.js";

const SPARK_W = 360;
const SPARK_H = 60;

export class ProfilePanel {
  readonly root: HTMLElement;
  private readonly sparkBox: HTMLElement;
  private readonly tableBody: HTMLElement;

  constructor() {
    this.sparkBox = el("div", { id: "profile-spark" });
    this.tableBody = el("tbody", {});
    this.root = el(
      "section",
      { id: "panel-profile", class: "panel" },
      el("h2", {}, "Risk profile"),
      this.sparkBox,
      el(
        "table",
        { id: "profile-table" },
        el(
          "thead",
          {},
          el(
            "tr",
            {},
            el("th", {}, "event"),
            el("th", {}, "clock"),
            el("th", {}, "P(ignited)"),
            el("th", {}, "severity"),
            el("th", {}, "response"),
          ),
        ),
        this.tableBody,
      ),
    );
  }

  render(doc: ProfileDoc): void {
    clear(this.tableBody);
    for (const point of doc.points) {
      this.tableBody.append(
        el(
          "tr",
          { class: "profile-row", "data-seq": String(point.seq) },
          el("td", {}, point.kind),
          el("td", {}, num(point.clock, { "data-col": "clock" })),
          el("td", {}, num(point.ignition_probability, { "data-col": "ignition" })),
          el("td", { class: `sev sev-${point.severity}` }, point.severity),
          el("td", {}, point.response_label),
        ),
      );
    }
    this.renderSpark(doc);
  }

  private renderSpark(doc: ProfileDoc): void {
    clear(this.sparkBox);
    const points = doc.points;
    if (points.length === 0) return;
    // Scale to the panel box; coordinates are presentation geometry, not
    // displayed values (the table carries the verbatim numbers).
    const top = Math.max(...points.map((p) => p.ignition_probability), 1e-9);
    const dx = points.length > 1 ? SPARK_W / (points.length - 1) : 0;
    const coords = points
      .map((p, i) => `${i * dx},${SPARK_H - (p.ignition_probability / top) * SPARK_H}`)
      .join(" ");
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("viewBox", `0 0 ${SPARK_W} ${SPARK_H}`);
    svg.setAttribute("class", "spark");
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", coords);
    line.setAttribute("fill", "none");
    svg.append(line);
    this.sparkBox.append(svg);
  }
}
