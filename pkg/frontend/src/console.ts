// Console wiring: one live session, four server-fed panels, and a drill
// mode that replays a stored event log through the same API calls an
// operator would trigger. The console holds no model of its own; every
// refresh pulls documents from the service and re-displays them.

import { ApiClient, ApiError, ConflictError } from "./api.js";
import { clear, el, num } from "./dom.js";
import { DecisionPanel } from "./panels/decision.js";
import { DiagnosisPanel } from "./panels/diagnosis.js";
import { PlanPanel } from "./panels/plan.js";
import { ProfilePanel } from "./panels/profile.js";
import type { SessionEventDoc, SessionView } from "./types.js";

export class OperatorConsole {
  readonly root: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly conflictBox: HTMLElement;
  private readonly errorBox: HTMLElement;
  private readonly diagnosis: DiagnosisPanel;
  private readonly profile: ProfilePanel;
  private readonly decision: DecisionPanel;
  private readonly plan: PlanPanel;
  private readonly drillBox: HTMLElement;
  private readonly drillProgress: HTMLElement;
  private readonly drillLog: HTMLTextAreaElement;

  private sessionId = "";
  private lastSeq = 0;
  private heuristic = "highest-ev-path";
  private scenarioLoaded = false;
  private drillEvents: SessionEventDoc[] = [];
  private drillCursor = 0;
  private ignitionArmed = false;

  /** Resolves when the most recent refresh cycle has settled (test hook). */
  idle: Promise<void> = Promise.resolve();

  constructor(private readonly api: ApiClient) {
    this.banner = el("div", { id: "session-banner" });
    this.conflictBox = el("div", { id: "conflict", class: "conflict", hidden: "" });
    this.errorBox = el("div", { id: "error-bar", class: "error-bar", hidden: "" });

    this.diagnosis = new DiagnosisPanel((node, outcome) =>
      this.mutate(() => this.api.postObservation(this.sessionId, node, outcome, this.lastSeq)),
    );
    this.profile = new ProfilePanel();
    this.decision = new DecisionPanel((level) =>
      this.mutate(() => this.api.setLevel(this.sessionId, level, this.lastSeq)),
    );
    this.plan = new PlanPanel(
      (testId, outcome) =>
        this.mutate(() => this.api.postTestResult(this.sessionId, testId, outcome, this.lastSeq)),
      (heuristic) => {
        this.heuristic = heuristic;
        this.idle = this.refreshAll();
      },
    );

    this.drillLog = el("textarea", {
      id: "drill-log",
      rows: "4",
      placeholder: "paste a session event log (one JSON event per line)",
    });
    this.drillProgress = el("ol", { id: "drill-progress" });
    const loadButton = el("button", { type: "button", id: "drill-load" }, "Load drill");
    loadButton.addEventListener("click", () => void this.loadDrill());
    const stepButton = el("button", { type: "button", id: "drill-step" }, "Step");
    stepButton.addEventListener("click", () => void this.stepDrill());
    this.drillBox = el(
      "section",
      { id: "panel-drill", class: "panel" },
      el("h2", {}, "Drill mode"),
      el("p", { class: "muted" }, "Replays a stored event log step by step against a fresh session."),
      this.drillLog,
      el("div", { class: "drill-controls" }, loadButton, stepButton),
      this.drillProgress,
    );

    const advanceInput = el("input", { id: "advance-dt", value: "1", size: "5" });
    const advanceForm = el(
      "form",
      { id: "advance-form" },
      el("label", {}, "Advance clock by ", advanceInput, " h "),
      el("button", { type: "submit" }, "Advance"),
    );
    advanceForm.addEventListener("submit", (event) => {
      event.preventDefault();
      const dt = Number(advanceInput.value);
      if (Number.isFinite(dt) && dt > 0) {
        this.mutate(() => this.api.advance(this.sessionId, dt, this.lastSeq));
      } else {
        this.showError("advance duration must be a positive number");
      }
    });

    const ignitionButton = el("button", { type: "button", id: "report-ignition" }, "Report ignition");
    ignitionButton.addEventListener("click", () => {
      if (!this.ignitionArmed) {
        this.ignitionArmed = true;
        ignitionButton.classList.add("armed");
        ignitionButton.textContent = "Confirm ignition report";
        return;
      }
      this.ignitionArmed = false;
      ignitionButton.classList.remove("armed");
      ignitionButton.textContent = "Report ignition";
      this.mutate(() => this.api.reportIgnition(this.sessionId, this.lastSeq));
    });

    const refreshButton = el("button", { type: "button", id: "conflict-refresh" }, "Refresh");
    refreshButton.addEventListener("click", () => {
      this.conflictBox.setAttribute("hidden", "");
      this.idle = this.refreshAll();
    });
    this.conflictBox.append(
      el("span", {}, "Session advanced elsewhere; the view is stale. "),
      refreshButton,
    );

    this.root = el(
      "main",
      { id: "console" },
      this.banner,
      this.conflictBox,
      this.errorBox,
      el("div", { class: "actions" }, advanceForm, ignitionButton),
      el(
        "div",
        { class: "panel-grid" },
        this.diagnosis.root,
        this.profile.root,
        this.decision.root,
        this.plan.root,
      ),
      this.drillBox,
    );
  }

  /** Create (or attach to) a session and populate every panel. */
  async open(scenarioId: string, sessionId?: string): Promise<void> {
    const view = sessionId
      ? await this.api.session(sessionId).catch(async (err: unknown) => {
          if (err instanceof ApiError && err.status === 404) {
            return this.api.createSession(scenarioId, sessionId);
          }
          throw err;
        })
      : await this.api.createSession(scenarioId);
    this.sessionId = view.session_id;
    await this.refreshAll();
  }

  private mutate(call: () => Promise<SessionView>): void {
    this.idle = (async () => {
      try {
        await call();
        this.clearError();
        await this.refreshAll();
      } catch (err) {
        this.handleError(err);
      }
    })();
  }

  private async refreshAll(): Promise<void> {
    try {
      const view = await this.api.session(this.sessionId);
      this.lastSeq = view.state.seq;
      if (!this.scenarioLoaded) {
        this.diagnosis.setScenario(view.scenario);
        this.plan.setScenario(view.scenario);
        this.scenarioLoaded = true;
      }
      this.renderBanner(view);
      const [diagnosisDoc, recommendationDoc, profileDoc] = await Promise.all([
        this.api.diagnosis(this.sessionId),
        this.api.recommendation(this.sessionId),
        this.api.profile(this.sessionId),
      ]);
      this.diagnosis.render(diagnosisDoc);
      this.decision.render(recommendationDoc, view.state.status_quo_level);
      this.profile.render(profileDoc);
      if (view.state.ignition_evident) {
        this.plan.renderUnavailable(
          "Ignition evident: planning unavailable, emergency shutdown applies.",
        );
      } else {
        this.plan.render(await this.api.plan(this.sessionId, { heuristic: this.heuristic }));
      }
    } catch (err) {
      this.handleError(err);
    }
  }

  private renderBanner(view: SessionView): void {
    clear(this.banner);
    this.banner.append(
      el("span", { class: "session-id" }, `session ${view.session_id}`),
      el("span", {}, ` scenario ${view.scenario.id} `),
      el("span", {}, "seq ", num(view.state.seq, { id: "banner-seq" })),
      el("span", {}, " clock ", num(view.state.clock, { id: "banner-clock" }), " h"),
      el(
        "span",
        { id: "banner-level" },
        ` level ${view.scenario.levels[view.state.status_quo_level] ?? ""} `,
      ),
      el("span", { id: "banner-severity", class: `sev sev-${view.severity}` }, view.severity),
      el("span", { id: "banner-response" }, ` ${view.response_label}`),
    );
  }

  private handleError(err: unknown): void {
    if (err instanceof ConflictError) {
      this.conflictBox.removeAttribute("hidden");
      return;
    }
    this.showError(err instanceof Error ? err.message : String(err));
  }

  private showError(message: string): void {
    this.errorBox.removeAttribute("hidden");
    this.errorBox.textContent = message;
  }

  private clearError(): void {
    this.errorBox.setAttribute("hidden", "");
    this.errorBox.textContent = "";
  }

  // ----- drill mode -------------------------------------------------------

  private async loadDrill(): Promise<void> {
    const lines = this.drillLog.value
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
    if (lines.length === 0) {
      this.showError("drill log is empty");
      return;
    }
    let events: SessionEventDoc[];
    try {
      events = lines.map((line) => JSON.parse(line) as SessionEventDoc);
    } catch {
      this.showError("drill log is not one JSON event per line");
      return;
    }
    const first = events[0];
    if (first.kind !== "session-created" || typeof first.payload.scenario_id !== "string") {
      this.showError("drill log must start with a session-created event");
      return;
    }
    this.idle = (async () => {
      try {
        const drillId = `drill-${Date.now()}-${Math.floor(Math.random() * 1e6)}`;
        const view = await this.api.createSession(first.payload.scenario_id as string, drillId);
        this.sessionId = view.session_id;
        this.scenarioLoaded = false;
        this.drillEvents = events;
        this.drillCursor = 1; // the session-created line is step zero
        this.renderDrillProgress();
        this.clearError();
        await this.refreshAll();
      } catch (err) {
        this.handleError(err);
      }
    })();
    await this.idle;
  }

  private async stepDrill(): Promise<void> {
    if (this.drillCursor >= this.drillEvents.length) {
      this.showError("drill finished; load a log to start again");
      return;
    }
    const event = this.drillEvents[this.drillCursor];
    this.drillCursor += 1;
    this.renderDrillProgress();
    const payload = event.payload;
    this.mutate(() => {
      switch (event.kind) {
        case "observation":
          return this.api.postObservation(
            this.sessionId,
            String(payload.node),
            String(payload.outcome),
            this.lastSeq,
          );
        case "test-result":
          return this.api.postTestResult(
            this.sessionId,
            String(payload.test_id),
            String(payload.outcome),
            this.lastSeq,
          );
        case "time-advance":
          return this.api.advance(this.sessionId, Number(payload.duration), this.lastSeq);
        case "level-set":
          return this.api.setLevel(this.sessionId, Number(payload.level), this.lastSeq);
        case "ignition-reported":
          return this.api.reportIgnition(this.sessionId, this.lastSeq);
        default:
          return Promise.reject(new ApiError(0, `drill log has unknown event kind ${event.kind}`));
      }
    });
    await this.idle;
  }

  private renderDrillProgress(): void {
    clear(this.drillProgress);
    this.drillEvents.forEach((event, index) => {
      this.drillProgress.append(
        el(
          "li",
          { class: index < this.drillCursor ? "drill-done" : "drill-pending" },
          event.kind,
        ),
      );
    });
  }
}
