// Bootstrapping and event wiring: one ApiClient, one session snapshot,
// re-render on every transition. The trial id travels in the URL hash so a
// reload lands back on the same dashboard.

import { ApiClient } from "./api";
import { curveCsv, renderDashboard, type Handlers } from "./dashboard";
import {
  applyCurve,
  applySafety,
  applyTrialState,
  initialSession,
  markBanner,
  markConflict,
  setOutcome,
  setWhatIf,
  toggleUnits,
  type ConsoleSession,
} from "./state";
import type { CreateTrialRequest } from "./types";

const CURVE_POINTS = 81;

const api = new ApiClient("");
let session: ConsoleSession | null = null;

function root(): HTMLElement {
  return document.getElementById("app")!;
}

async function refreshAll(): Promise<void> {
  if (!session) return;
  const trial = await api.getTrial(session.trialId);
  session = applyTrialState(session, trial);
  if (trial.estimate) {
    const [curve, safety] = await Promise.all([
      api.getCurve(session.trialId, CURVE_POINTS, session.whatIfAlpha ?? undefined),
      api.getSafety(session.trialId),
    ]);
    session = applySafety(applyCurve(session, curve), safety);
  }
  render();
}

const handlers: Handlers = {
  onOutcome(slot, value) {
    if (!session) return;
    session = setOutcome(session, slot, value);
    render();
  },
  async onSubmit() {
    if (!session || !session.trial) return;
    const { t1, t2 } = session.form;
    if (t1 === null || t2 === null) return;
    session = { ...session, busy: true };
    render();
    try {
      const result = await api.recordOutcomes(
        session.trialId,
        [t1, t2],
        session.revision,
      );
      session = { ...session, busy: false };
      if (result.kind === "conflict") {
        session = markConflict(session, result.detail);
      } else if (result.kind === "invalid") {
        session = markBanner(session, `Rejected: ${result.detail}`);
      }
      await refreshAll();
    } catch (err) {
      // network failure: keep the entered outcomes, offer retry by leaving
      // the form as-is (resubmission resolves via the revision guard)
      session = markBanner(
        { ...session, busy: false },
        `Submission failed (${String(err)}); outcomes kept, retry when online.`,
      );
      render();
    }
  },
  onToggleUnits() {
    if (!session) return;
    session = toggleUnits(session);
    render();
  },
  async onWhatIf(alpha) {
    if (!session) return;
    const curve = await api.getCurve(session.trialId, CURVE_POINTS, alpha);
    session = setWhatIf(applyCurve(session, curve), alpha, curve.what_if);
    render();
  },
  onClearWhatIf() {
    if (!session) return;
    session = setWhatIf(session, null, null);
    render();
  },
  async onRefresh() {
    await refreshAll();
  },
  onExportCurve() {
    if (!session) return;
    const csv = curveCsv(session);
    const blob = new Blob([csv], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `mtd-curve-${session.trialId}-rev${session.revision}.csv`;
    link.click();
    URL.revokeObjectURL(link.href);
  },
};

function render(): void {
  if (session) renderDashboard(root(), session, handlers);
}

function renderLanding(): void {
  const node = root();
  node.innerHTML = `
    <header><h1>Dose-combination trial console</h1></header>
    <section class="card">
      <h2>Resume a trial</h2>
      <input id="trial-id" placeholder="trial id"/>
      <button id="resume">Open</button>
    </section>
    <section class="card">
      <h2>Start a new trial</h2>
      <div class="create-grid">
        <label>drug A min <input id="x-min" type="number" value="100"/></label>
        <label>drug A max <input id="x-max" type="number" value="500"/></label>
        <label>drug B min <input id="y-min" type="number" value="10"/></label>
        <label>drug B max <input id="y-max" type="number" value="50"/></label>
        <label>target theta <input id="theta" type="number" step="0.01" value="0.33"/></label>
        <label>patients <input id="n-max" type="number" value="40"/></label>
        <label>seed <input id="seed" type="number" value="1"/></label>
        <label>interaction
          <select id="interaction">
            <option value="true" selected>with interaction</option>
            <option value="false">without interaction</option>
          </select>
        </label>
      </div>
      <button id="create">Create trial</button>
    </section>`;
  document.getElementById("resume")!.addEventListener("click", () => {
    const id = (document.getElementById("trial-id") as HTMLInputElement).value;
    if (id) {
      location.hash = `#/trial/${id.trim()}`;
    }
  });
  document.getElementById("create")!.addEventListener("click", async () => {
    const num = (id: string) =>
      Number((document.getElementById(id) as HTMLInputElement).value);
    const req: CreateTrialRequest = {
      window: {
        x_min: num("x-min"),
        x_max: num("x-max"),
        y_min: num("y-min"),
        y_max: num("y-max"),
      },
      design: { theta: num("theta"), n_max: num("n-max") },
      sampler: { seed: num("seed") },
      interaction:
        (document.getElementById("interaction") as HTMLSelectElement).value ===
        "true",
    };
    const created = await api.createTrial(req, crypto.randomUUID());
    location.hash = `#/trial/${created.trial_id}`;
  });
}

async function route(): Promise<void> {
  const match = location.hash.match(/^#\/trial\/(.+)$/);
  if (match) {
    session = initialSession(match[1]!);
    render();
    await refreshAll();
  } else {
    session = null;
    renderLanding();
  }
}

window.addEventListener("hashchange", () => {
  void route();
});
void route();
