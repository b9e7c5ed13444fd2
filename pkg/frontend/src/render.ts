/** Pure rendering: ViewState in, markup out. Event wiring stays in the app
 * (delegation on data-action attributes), so the same state always yields
 * the same screen. */

import type { ComparisonView } from "./api.js";
import { isDegenerate, ringPoints, sharedViewBox, viewBoxAttr } from "./geometry.js";
import { LABELS, captionFor } from "./labels.js";
import type { ViewState } from "./state.js";

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ({
    "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
  })[ch] as string);
}

function panel(comparison: ComparisonView, side: "a" | "b"): string {
  const candidate = comparison[side];
  const name = side.toUpperCase();
  if (isDegenerate(candidate.geometry) || isDegenerate(comparison.initial_geometry)) {
    return `<div class="panel panel-error" data-side="${side}">
      <h3>${name}</h3>
      <p class="geometry-error">geometry unavailable for this candidate</p>
    </div>`;
  }
  const vb = viewBoxAttr(sharedViewBox([
    comparison.initial_geometry,
    comparison.a.geometry,
    comparison.b.geometry,
  ]));
  return `<div class="panel" data-side="${side}">
    <h3>${name}</h3>
    <svg viewBox="${vb}" preserveAspectRatio="xMidYMid meet" role="img"
         aria-label="generalisation ${name}">
      <polygon class="initial" points="${ringPoints(comparison.initial_geometry)}"></polygon>
      <polygon class="candidate" points="${ringPoints(candidate.geometry)}"></polygon>
    </svg>
  </div>`;
}

function labelButtons(enabled: boolean): string {
  return `<div class="choices">${LABELS.map((l) => `
    <button class="choice" data-action="submit" data-label="${l.symbol}"
            ${enabled ? "" : "disabled"}>
      <kbd>${l.key}</kbd> ${escapeHtml(l.caption)}
    </button>`).join("")}
  </div>`;
}

function progressBar(state: ViewState): string {
  const { answered, total } = state.progress;
  return `<div class="progress" data-answered="${answered}" data-total="${total}">
    ${answered} / ${total} answered</div>`;
}

function errorBanner(state: ViewState): string {
  if (!state.errorMessage) return "";
  const retry = state.pendingLabel
    ? `<button data-action="retry">retry "${escapeHtml(captionFor(state.pendingLabel))}"</button>`
    : "";
  return `<div class="error-banner">${escapeHtml(state.errorMessage)} ${retry}</div>`;
}

function comparingScreen(state: ViewState): string {
  const c = state.comparison;
  if (!c) return `<p class="status">no comparison loaded</p>`;
  const degenerate = isDegenerate(c.initial_geometry)
    || isDegenerate(c.a.geometry) || isDegenerate(c.b.geometry);
  const enabled = !state.submitting && !degenerate;
  return `
    ${progressBar(state)}
    ${errorBanner(state)}
    <div class="panels" data-comparison="${c.id}">
      ${panel(c, "a")}
      ${panel(c, "b")}
    </div>
    ${labelButtons(enabled)}`;
}

function completeScreen(state: ViewState): string {
  return `
    ${progressBar(state)}
    ${errorBanner(state)}
    <p class="status">all comparisons answered</p>
    <button class="primary" data-action="learn">start learning</button>`;
}

function learningScreen(state: ViewState): string {
  return `
    <p class="status">learning from ${state.progress.answered} preferences
      (job ${state.jobId ?? "?"})&hellip;</p>
    <div class="spinner" aria-label="learning in progress"></div>`;
}

function resultsScreen(state: ViewState): string {
  const r = state.results;
  if (!r) return `<p class="status">no results</p>`;
  if (state.review) {
    const review = state.review;
    const caption = review.label ? captionFor(review.label) : "(unanswered)";
    return `
      <button data-action="back-to-results">&larr; back to results</button>
      <p class="status">your answer: <strong class="review-label">${escapeHtml(caption)}</strong></p>
      <div class="panels review" data-comparison="${review.comparison.id}">
        ${panel(review.comparison, "a")}
        ${panel(review.comparison, "b")}
      </div>`;
  }
  const incompatible = r.report.rows.filter((row) => !row.compatible);
  return `
    ${errorBanner(state)}
    <div class="errors-side-by-side">
      <div class="error-card">
        <h3>initial function</h3>
        <div class="error-value" data-role="initial-error">${r.initialErrorPercent.toFixed(1)}%</div>
      </div>
      <div class="error-card">
        <h3>learnt function</h3>
        <div class="error-value" data-role="learnt-error">${r.learntErrorPercent.toFixed(1)}%</div>
      </div>
    </div>
    <h3>learnt parameters (p = <span data-role="learnt-p">${r.learntPower}</span>)</h3>
    <table class="weights">
      <thead><tr><th>constraint</th><th>weight</th></tr></thead>
      <tbody>${r.learntWeights.map((w) => `
        <tr><td>${escapeHtml(w.name)}</td><td>${w.weight}</td></tr>`).join("")}
      </tbody>
    </table>
    <h3>incompatible comparisons (${incompatible.length})</h3>
    <ul class="incompatible">${incompatible.map((row) => `
      <li><button data-action="review" data-comparison="${row.comparison_id}">
        ${row.comparison_id}</button>
        <span class="row-label">${escapeHtml(captionFor(row.label))}</span>
        <span class="row-diff">diff ${row.diff.toFixed(3)}</span></li>`).join("")}
    </ul>
    <button data-action="new-session">label another session</button>`;
}

export function renderApp(state: ViewState): string {
  let screen: string;
  switch (state.phase) {
    case "loading":
      screen = `<p class="status">loading&hellip;</p>${errorBanner(state)}`;
      break;
    case "comparing":
      screen = comparingScreen(state);
      break;
    case "complete":
      screen = completeScreen(state);
      break;
    case "learning":
      screen = learningScreen(state);
      break;
    case "results":
      screen = resultsScreen(state);
      break;
  }
  return `<main class="app" data-phase="${state.phase}">
    <header><h1>geneval</h1>
      <span class="session">${state.sessionId ? `session ${state.sessionId}` : ""}</span>
    </header>
    ${screen}
  </main>`;
}
