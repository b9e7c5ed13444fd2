/** View state machine for the dialogue. */

import type { ComparisonView, Progress, Report } from "./api.js";
import type { LabelSymbol } from "./labels.js";

export type Phase = "loading" | "comparing" | "complete" | "learning" | "results";

export interface ResultsView {
  initialErrorPercent: number;
  learntErrorPercent: number;
  learntWeights: { name: string; weight: number }[];
  learntPower: number;
  report: Report;
}

export interface ReviewView {
  comparison: ComparisonView;
  label: LabelSymbol | null;
}

export interface ViewState {
  phase: Phase;
  sessionId: string | null;
  comparison: ComparisonView | null;
  progress: Progress;
  /** submission in flight: buttons disabled */
  submitting: boolean;
  /** label that failed to send; offered for retry, never dropped */
  pendingLabel: LabelSymbol | null;
  errorMessage: string | null;
  jobId: string | null;
  results: ResultsView | null;
  /** read-only re-display of an answered comparison from the results list */
  review: ReviewView | null;
}

export function initialState(): ViewState {
  return {
    phase: "loading",
    sessionId: null,
    comparison: null,
    progress: { answered: 0, total: 0 },
    submitting: false,
    pendingLabel: null,
    errorMessage: null,
    jobId: null,
    results: null,
    review: null,
  };
}

/** Legal phase transitions; results loops back to comparing when a new
 * session loads. "loading" may enter comparing or complete. */
const TRANSITIONS: Record<Phase, Phase[]> = {
  loading: ["comparing", "complete"],
  comparing: ["comparing", "complete"],
  complete: ["learning"],
  learning: ["results"],
  results: ["comparing", "loading"],
};

export function transition(state: ViewState, to: Phase): ViewState {
  if (state.phase !== to && !TRANSITIONS[state.phase].includes(to)) {
    throw new Error(`illegal phase transition ${state.phase} -> ${to}`);
  }
  return { ...state, phase: to };
}

export function canTransition(from: Phase, to: Phase): boolean {
  return from === to || TRANSITIONS[from].includes(to);
}
