/** Application shell: owns the ViewState, talks to the service, renders. */

import { ApiClient, ApiError } from "./api.js";
import type { LabelSymbol } from "./labels.js";
import { labelForKey } from "./labels.js";
import { initialState, transition, ViewState } from "./state.js";
import { renderApp } from "./render.js";

export interface AppOptions {
  baseUrl?: string;
  /** learning-status poll interval; 1 s in production, short in tests */
  pollIntervalMs?: number;
  /** pin the app to one session instead of discovering the first open one */
  sessionId?: string;
}

export class App {
  readonly api: ApiClient;
  state: ViewState;
  private readonly pollIntervalMs: number;
  private inflight: Promise<void> = Promise.resolve();
  private submitShownAt = 0;

  private readonly pinnedSession: string | null;

  constructor(private root: HTMLElement, options: AppOptions = {}) {
    this.api = new ApiClient(options.baseUrl ?? "");
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
    this.pinnedSession = options.sessionId ?? null;
    this.state = initialState();
    this.root.addEventListener("click", (e) => this.handleClick(e));
    this.root.ownerDocument.addEventListener("keydown", (e) => this.handleKey(e));
  }

  /** Resolves when the current chain of requests has settled. */
  settled(): Promise<void> {
    return this.inflight;
  }

  private enqueue(work: () => Promise<void>): Promise<void> {
    this.inflight = this.inflight.then(work, work);
    return this.inflight;
  }

  private setState(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    this.render();
  }

  render(): void {
    this.root.innerHTML = renderApp(this.state);
  }

  async start(): Promise<void> {
    this.render();
    await this.enqueue(async () => {
      try {
        if (this.pinnedSession) {
          this.setState({ sessionId: this.pinnedSession });
        } else {
          const { sessions } = await this.api.listSessions();
          if (sessions.length === 0) {
            this.setState({ errorMessage: "no sessions on the server; start it with --comps" });
            return;
          }
          const open = sessions.find((s) => s.answered < s.total) ?? sessions[0];
          this.setState({ sessionId: open.session_id });
        }
        await this.loadNext();
      } catch (err) {
        this.setState({ errorMessage: describe(err) });
      }
    });
  }

  private async loadNext(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const next = await this.api.next(sessionId);
    if (next.status === "comparison" && next.comparison) {
      this.state = transition(this.state, "comparing");
      this.submitShownAt = Date.now();
      this.setState({ comparison: next.comparison, progress: next.progress,
                      submitting: false });
    } else {
      this.state = transition(this.state, "complete");
      this.setState({ comparison: null, progress: next.progress, submitting: false });
    }
  }

  /** intendedComparisonId is captured at click time: late duplicate clicks
   * whose comparison has already advanced are dropped, never misfiled. */
  submit(label: LabelSymbol,
         intendedComparisonId: string | undefined = this.state.comparison?.id,
  ): Promise<void> {
    return this.enqueue(async () => {
      if (this.state.phase !== "comparing" || this.state.submitting
          || !this.state.comparison || !this.state.sessionId
          || this.state.comparison.id !== intendedComparisonId) {
        return;
      }
      const comparisonId = this.state.comparison.id;
      this.setState({ submitting: true, errorMessage: null });
      try {
        const progress = await this.api.submitPreference(
          this.state.sessionId, comparisonId, label,
          Date.now() - this.submitShownAt);
        this.setState({ progress, pendingLabel: null, errorMessage: null });
        await this.loadNext();
      } catch (err) {
        // keep the label for retry: an acknowledged click is never dropped
        this.setState({ submitting: false, pendingLabel: label,
                        errorMessage: `submission failed: ${describe(err)}` });
      }
    });
  }

  retry(): Promise<void> {
    const pending = this.state.pendingLabel;
    if (!pending) return this.inflight;
    return this.submit(pending);
  }

  startLearning(): Promise<void> {
    return this.enqueue(async () => {
      if (this.state.phase !== "complete" || !this.state.sessionId) return;
      try {
        const { job_id } = await this.api.startLearn(this.state.sessionId);
        this.state = transition(this.state, "learning");
        this.setState({ jobId: job_id, errorMessage: null });
        await this.pollJob(job_id);
      } catch (err) {
        this.setState({ errorMessage: describe(err) });
      }
    });
  }

  private async pollJob(jobId: string): Promise<void> {
    for (;;) {
      const job = await this.api.job(jobId);
      if (job.status === "done" && job.result) {
        await this.showResults(job.result.best_function);
        return;
      }
      if (job.status === "failed") {
        this.state = transition(this.state, "complete");
        this.setState({ jobId: null,
                        errorMessage: `learning failed: ${job.error_message}` });
        return;
      }
      await sleep(this.pollIntervalMs);
    }
  }

  private async showResults(learntFunction: { constraints: string[];
                                              weights: number[]; p: number }): Promise<void> {
    const sessionId = this.state.sessionId!;
    const initialReport = await this.api.report(sessionId, "initial");
    const learntReport = await this.api.report(sessionId, "learnt");
    this.state = transition(this.state, "results");
    this.setState({
      results: {
        initialErrorPercent: initialReport.global_error_percent,
        learntErrorPercent: learntReport.global_error_percent,
        learntWeights: learntFunction.constraints.map((name, i) => ({
          name, weight: learntFunction.weights[i],
        })),
        learntPower: learntFunction.p,
        report: learntReport,
      },
      review: null,
    });
  }

  openReview(comparisonId: string): Promise<void> {
    return this.enqueue(async () => {
      if (this.state.phase !== "results" || !this.state.sessionId) return;
      try {
        const { comparison, label } = await this.api.comparison(
          this.state.sessionId, comparisonId);
        this.setState({ review: { comparison, label } });
      } catch (err) {
        this.setState({ errorMessage: describe(err) });
      }
    });
  }

  backToResults(): void {
    this.setState({ review: null });
  }

  newSession(): Promise<void> {
    this.state = transition(this.state, "loading");
    this.setState({ results: null, review: null, comparison: null,
                    jobId: null, errorMessage: null });
    return this.start();
  }

  private handleClick(event: Event): void {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!target) return;
    const action = target.getAttribute("data-action");
    if (action === "submit" && !target.hasAttribute("disabled")) {
      void this.submit(target.getAttribute("data-label") as LabelSymbol);
    } else if (action === "retry") {
      void this.retry();
    } else if (action === "learn") {
      void this.startLearning();
    } else if (action === "review") {
      void this.openReview(target.getAttribute("data-comparison")!);
    } else if (action === "back-to-results") {
      this.backToResults();
    } else if (action === "new-session") {
      void this.newSession();
    }
  }

  private handleKey(event: KeyboardEvent): void {
    if (this.state.phase !== "comparing" || this.state.submitting) return;
    const choice = labelForKey(event.key);
    if (choice) void this.submit(choice.symbol);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.message} (HTTP ${err.status})`;
  return err instanceof Error ? err.message : String(err);
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
