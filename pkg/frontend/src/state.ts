// Console session state and its pure transitions. Rendering reads this
// snapshot; event handlers produce the next one. No dosing math here.

import type {
  CurvePayload,
  SafetyPayload,
  TrialStatePayload,
  WhatIfPreview,
} from "./types";
import type { Units } from "./format";

export type Outcome = 0 | 1 | null;

export interface ConsoleSession {
  trialId: string;
  revision: number;
  trial: TrialStatePayload | null;
  curve: CurvePayload | null;
  safety: SafetyPayload | null;
  form: { t1: Outcome; t2: Outcome };
  units: Units;
  whatIf: WhatIfPreview | null;
  whatIfAlpha: number | null;
  banner: string | null;
  busy: boolean;
}

export function initialSession(trialId: string): ConsoleSession {
  return {
    trialId,
    revision: 0,
    trial: null,
    curve: null,
    safety: null,
    form: { t1: null, t2: null },
    units: "raw",
    whatIf: null,
    whatIfAlpha: null,
    banner: null,
    busy: false,
  };
}

export function applyTrialState(
  session: ConsoleSession,
  trial: TrialStatePayload,
): ConsoleSession {
  const revisionChanged = trial.revision !== session.revision;
  return {
    ...session,
    revision: trial.revision,
    trial,
    banner: null,
    // a new cohort means the previous form entries no longer apply
    form: revisionChanged ? { t1: null, t2: null } : session.form,
    whatIf: revisionChanged ? null : session.whatIf,
    whatIfAlpha: revisionChanged ? null : session.whatIfAlpha,
  };
}

export function applyCurve(
  session: ConsoleSession,
  curve: CurvePayload,
): ConsoleSession {
  return {
    ...session,
    curve,
    whatIf: curve.what_if ?? session.whatIf,
  };
}

export function applySafety(
  session: ConsoleSession,
  safety: SafetyPayload,
): ConsoleSession {
  return { ...session, safety };
}

export function setOutcome(
  session: ConsoleSession,
  slot: "t1" | "t2",
  value: Outcome,
): ConsoleSession {
  return { ...session, form: { ...session.form, [slot]: value } };
}

export function toggleUnits(session: ConsoleSession): ConsoleSession {
  return {
    ...session,
    units: session.units === "raw" ? "standardized" : "raw",
  };
}

export function markConflict(
  session: ConsoleSession,
  detail: string,
): ConsoleSession {
  // keep the unsent outcomes; the caller refetches and re-renders
  return { ...session, banner: `Revision conflict: ${detail}. Refreshed.` };
}

export function markBanner(
  session: ConsoleSession,
  message: string | null,
): ConsoleSession {
  return { ...session, banner: message };
}

export function setWhatIf(
  session: ConsoleSession,
  alpha: number | null,
  preview: WhatIfPreview | null,
): ConsoleSession {
  return { ...session, whatIfAlpha: alpha, whatIf: preview };
}

export function canSubmit(session: ConsoleSession): boolean {
  return (
    !session.busy &&
    session.trial !== null &&
    session.trial.status === "enrolling" &&
    session.trial.pending !== null &&
    session.trial.revision === session.revision &&
    session.form.t1 !== null &&
    session.form.t2 !== null
  );
}
