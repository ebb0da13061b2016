// DOM assembly for the console. Render functions are deterministic images
// of the session snapshot, so reloading from server state reproduces the
// identical dashboard.

import { fmtAlpha, fmtDose, fmtProbability, fmtStd } from "./format";
import { renderCurveSvg } from "./plot";
import { canSubmit, type ConsoleSession, type Outcome } from "./state";
import type { Recommendation } from "./types";

export interface Handlers {
  onOutcome(slot: "t1" | "t2", value: Outcome): void;
  onSubmit(): void;
  onToggleUnits(): void;
  onWhatIf(alpha: number): void;
  onClearWhatIf(): void;
  onRefresh(): void;
  onExportCurve(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function statusBanner(session: ConsoleSession): HTMLElement {
  const trial = session.trial!;
  const banner = el("div", `banner banner-${trial.status}`);
  if (session.banner) {
    banner.className = "banner banner-warning";
    banner.textContent = session.banner;
  } else if (trial.status === "stopped_for_safety") {
    banner.textContent =
      "Enrollment suspended for safety: the minimum combination looks too toxic.";
  } else if (trial.status === "completed") {
    banner.textContent = "Trial completed. Final curve estimate below.";
  } else {
    banner.textContent =
      `Enrolling. Cohort ${trial.pending?.cohort ?? "?"} pending, ` +
      `feasibility bound alpha = ${fmtAlpha(trial.alpha)}.`;
  }
  return banner;
}

function patientTable(session: ConsoleSession): HTMLElement {
  const trial = session.trial!;
  const table = el("table", "patients");
  const head = el("tr");
  for (const h of ["#", "cohort", "dose (A, B)", "DLT"]) {
    head.appendChild(el("th", undefined, h));
  }
  table.appendChild(head);
  for (const row of trial.transcript) {
    const tr = el("tr", row.t === 1 ? "dlt" : undefined);
    tr.appendChild(el("td", undefined, String(row.index)));
    tr.appendChild(el("td", undefined, String(row.cohort)));
    tr.appendChild(
      el("td", undefined, fmtDose(session.units, trial.window, row.x, row.y)),
    );
    tr.appendChild(el("td", undefined, row.t === 1 ? "yes" : "no"));
    table.appendChild(tr);
  }
  return table;
}

function doseList(
  session: ConsoleSession,
  rec: { patients: Recommendation["patients"] },
  cls: string,
): HTMLElement {
  const trial = session.trial!;
  const list = el("ul", cls);
  for (const pat of rec.patients) {
    list.appendChild(
      el(
        "li",
        undefined,
        `patient ${pat.index}: ` +
          fmtDose(session.units, trial.window, pat.x, pat.y),
      ),
    );
  }
  return list;
}

function recommendationCard(
  session: ConsoleSession,
  handlers: Handlers,
): HTMLElement {
  const trial = session.trial!;
  const card = el("section", "card recommendation");
  card.appendChild(el("h2", undefined, "Recommended next cohort"));
  if (trial.pending === null) {
    card.appendChild(
      el("p", undefined, "No pending cohort; the trial is closed."),
    );
    return card;
  }
  card.appendChild(
    el(
      "p",
      "rec-alpha",
      `Binding recommendation at alpha = ${fmtAlpha(trial.pending.alpha)}:`,
    ),
  );
  card.appendChild(doseList(session, trial.pending, "rec-doses"));

  const form = el("div", "outcome-form");
  form.appendChild(el("h3", undefined, "Enter cohort outcomes"));
  trial.pending.patients.forEach((pat, slotIdx) => {
    const slot = slotIdx === 0 ? "t1" : "t2";
    const row = el("div", "outcome-row");
    row.appendChild(el("span", undefined, `patient ${pat.index}: DLT?`));
    for (const value of [0, 1] as const) {
      const id = `${slot}-${value}`;
      const input = el("input") as HTMLInputElement;
      input.type = "radio";
      input.name = slot;
      input.id = id;
      input.value = String(value);
      input.checked = session.form[slot] === value;
      input.disabled = trial.status !== "enrolling";
      input.addEventListener("change", () => handlers.onOutcome(slot, value));
      const label = el("label", undefined, value === 1 ? "yes" : "no");
      label.htmlFor = id;
      row.appendChild(input);
      row.appendChild(label);
    }
    form.appendChild(row);
  });
  const submit = el("button", "submit", "Submit outcomes") as HTMLButtonElement;
  submit.disabled = !canSubmit(session);
  submit.addEventListener("click", handlers.onSubmit);
  form.appendChild(submit);
  card.appendChild(form);
  return card;
}

function whatIfCard(session: ConsoleSession, handlers: Handlers): HTMLElement {
  const card = el("section", "card what-if");
  card.appendChild(el("h2", undefined, "What-if feasibility bound"));
  card.appendChild(
    el(
      "p",
      "hint",
      "Preview the doses the design would recommend at a different alpha. " +
        "Non-binding; the protocol schedule stays in force.",
    ),
  );
  const row = el("div", "what-if-row");
  const input = el("input") as HTMLInputElement;
  input.type = "number";
  input.min = "0.05";
  input.max = "0.5";
  input.step = "0.05";
  input.id = "what-if-alpha";
  input.value =
    session.whatIfAlpha !== null ? String(session.whatIfAlpha) : "";
  row.appendChild(input);
  const go = el("button", undefined, "Preview") as HTMLButtonElement;
  go.addEventListener("click", () => {
    const alpha = Number(input.value);
    if (!(alpha > 0 && alpha <= 0.5)) {
      input.setCustomValidity("alpha must lie in (0, 0.5]");
      input.reportValidity();
      return;
    }
    input.setCustomValidity("");
    handlers.onWhatIf(alpha);
  });
  row.appendChild(go);
  const clear = el("button", undefined, "Clear") as HTMLButtonElement;
  clear.addEventListener("click", handlers.onClearWhatIf);
  row.appendChild(clear);
  card.appendChild(row);
  if (session.whatIf) {
    card.appendChild(
      el(
        "p",
        "preview-note",
        `Non-binding preview at alpha = ${fmtAlpha(session.whatIf.alpha)}:`,
      ),
    );
    card.appendChild(doseList(session, session.whatIf, "what-if-doses"));
  }
  return card;
}

function safetyCard(session: ConsoleSession): HTMLElement {
  const card = el("section", "card safety");
  card.appendChild(el("h2", undefined, "Safety gauge"));
  const s = session.safety;
  if (!s) {
    card.appendChild(el("p", undefined, "No posterior yet."));
    return card;
  }
  card.appendChild(
    el(
      "p",
      undefined,
      `P(DLT rate at minimum combination > ${fmtStd(s.threshold)}) = ` +
        fmtProbability(s.exceedance_probability),
    ),
  );
  const meter = el("div", "meter");
  const fill = el("div", "meter-fill");
  fill.style.width = `${Math.round(100 * s.exceedance_probability)}%`;
  if (s.would_stop) fill.classList.add("meter-hot");
  meter.appendChild(fill);
  card.appendChild(meter);
  card.appendChild(
    el(
      "p",
      "hint",
      s.rule_active
        ? `Stopping rule active (suspends above ${fmtProbability(s.xi2)}).`
        : "Stopping rule not yet active (too few evaluable patients).",
    ),
  );
  return card;
}

function estimateCard(session: ConsoleSession): HTMLElement | null {
  const est = session.trial?.estimate ?? null;
  if (!est) return null;
  const card = el("section", "card estimate");
  card.appendChild(el("h2", undefined, "Current MTD-curve estimate"));
  card.appendChild(
    el(
      "p",
      "estimate-params",
      `rho00 ${fmtStd(est.rho00_hat)}, rho01 ${fmtStd(est.rho01_hat)}, ` +
        `rho10 ${fmtStd(est.rho10_hat)}, beta3 ${est.beta3_hat.toFixed(2)}`,
    ),
  );
  return card;
}

export function renderDashboard(
  root: HTMLElement,
  session: ConsoleSession,
  handlers: Handlers,
): void {
  root.textContent = "";
  if (!session.trial) {
    root.appendChild(el("p", "loading", "Loading trial state..."));
    return;
  }
  const trial = session.trial;
  const header = el("header");
  header.appendChild(el("h1", undefined, `Trial ${trial.trial_id}`));
  const meta = el(
    "p",
    "meta",
    `${trial.working_link} working model, ` +
      `${trial.interaction ? "with" : "without"} interaction, ` +
      `theta = ${fmtStd(trial.theta)}, ` +
      `${trial.transcript.length}/${trial.n_max} patients, ` +
      `revision ${trial.revision}`,
  );
  header.appendChild(meta);
  const toggle = el(
    "button",
    "units-toggle",
    `Show ${session.units === "raw" ? "standardized" : "raw"} units`,
  ) as HTMLButtonElement;
  toggle.addEventListener("click", handlers.onToggleUnits);
  header.appendChild(toggle);
  const refresh = el("button", "refresh", "Refresh") as HTMLButtonElement;
  refresh.addEventListener("click", handlers.onRefresh);
  header.appendChild(refresh);
  root.appendChild(header);
  root.appendChild(statusBanner(session));

  const grid = el("div", "grid");
  const left = el("div", "col");
  left.appendChild(recommendationCard(session, handlers));
  left.appendChild(whatIfCard(session, handlers));
  left.appendChild(safetyCard(session));
  const estimate = estimateCard(session);
  if (estimate) left.appendChild(estimate);
  grid.appendChild(left);

  const right = el("div", "col");
  const plotCard = el("section", "card plot");
  plotCard.appendChild(el("h2", undefined, "MTD curve with quantile bands"));
  if (session.curve) {
    const holder = el("div", "plot-holder");
    holder.innerHTML = renderCurveSvg(
      session.curve,
      trial.transcript,
      trial.pending?.patients ?? [],
    );
    plotCard.appendChild(holder);
    const exportBtn = el(
      "button",
      "export",
      "Export curve (CSV)",
    ) as HTMLButtonElement;
    exportBtn.addEventListener("click", handlers.onExportCurve);
    plotCard.appendChild(exportBtn);
  } else {
    plotCard.appendChild(
      el("p", undefined, "Curve appears after the first cohort outcomes."),
    );
  }
  right.appendChild(plotCard);
  const tableCard = el("section", "card transcript");
  tableCard.appendChild(el("h2", undefined, "Patients"));
  tableCard.appendChild(patientTable(session));
  right.appendChild(tableCard);
  grid.appendChild(right);
  root.appendChild(grid);
}

export function curveCsv(session: ConsoleSession): string {
  const curve = session.curve;
  if (!curve) return "";
  const header = ["x", "y_estimate", "raw_x", "raw_y"];
  const alphas = curve.band_alphas.map((a) => String(a));
  const lines = [header.concat(alphas.map((a) => `band_${a}`)).join(",")];
  for (const p of curve.points) {
    const row = [p.x, p.y_estimate, p.raw_x, p.raw_y]
      .map((v) => String(v))
      .concat(alphas.map((a) => String(p.bands[a] ?? "")));
    lines.push(row.join(","));
  }
  return lines.join("\n") + "\n";
}
