// Session flow state machine, kept free of DOM so the scripted
// end-to-end test can drive exactly the code the browser runs. Every
// number shown to the operator comes from the server; the controller
// only validates input locally and sequences requests.

import { ApiClient, ApiError, SessionState } from "./api.js";

export interface View {
  renderWizard(): void;
  renderSession(model: SessionViewModel): void;
  showBanner(message: string): void;
  clearBanner(): void;
  showInlineError(message: string): void;
  renderWhatIf(preview: WhatIfPreview | null): void;
}

export interface SessionViewModel {
  state: SessionState;
  progress: number; // min(criterion_sum, 1)
  terminalMessage: string | null;
}

export interface WhatIfPreview {
  observable: string;
  value: number;
  recommendation: string | null;
}

export const STRATEGIES = ["forest", "tree", "bayes"] as const;
export const SUPPORTED_QUBITS = [2, 3, 4, 5] as const;

export function validateValue(raw: string): number | null {
  if (raw.trim() === "") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) return null;
  if (value < -1 || value > 1) return null;
  return value;
}

export function noisePreview(value: number, noise: number): number {
  return value * (1 - noise);
}

export function terminalMessage(state: SessionState): string | null {
  if (state.status === "entangled") {
    return `Entangled in ${state.history.length} measurements`;
  }
  if (state.status === "exhausted") {
    return `Exhausted after ${state.history.length} measurements without certifying entanglement`;
  }
  return null;
}

export function progress(state: SessionState): number {
  return Math.min(state.criterion_sum, 1);
}

export class SessionController {
  state: SessionState | null = null;
  whatIfAvailable = true;

  constructor(
    private api: ApiClient,
    private view: View,
  ) {}

  private model(state: SessionState): SessionViewModel {
    return {
      state,
      progress: progress(state),
      terminalMessage: terminalMessage(state),
    };
  }

  private render(state: SessionState): void {
    this.state = state;
    this.view.renderSession(this.model(state));
  }

  async showWizard(): Promise<void> {
    this.state = null;
    this.view.renderWizard();
    if (!(await this.api.health())) {
      this.view.showBanner("service unreachable; retry when it is up");
    } else {
      this.view.clearBanner();
    }
  }

  async start(nQubits: number, strategy: string): Promise<void> {
    try {
      const state = await this.api.createSession({
        n_qubits: nQubits,
        strategy,
      });
      this.view.clearBanner();
      this.render(state);
    } catch (err) {
      this.view.showBanner(describe(err));
    }
  }

  /** Rehydrate from a session id (page reload with #id in the URL). */
  async attach(id: string): Promise<void> {
    try {
      const state = await this.api.getSession(id);
      this.view.clearBanner();
      this.render(state);
    } catch (err) {
      this.view.showBanner(describe(err));
    }
  }

  /**
   * Submit a measured value for the recommended observable (or an
   * explicit override from the advanced form). A duplicate conflict
   * means the view was stale: re-sync from the server.
   */
  async submit(raw: string, observableOverride?: string): Promise<void> {
    if (!this.state) return;
    const value = validateValue(raw);
    if (value === null) {
      this.view.showInlineError("enter a number between -1 and 1");
      return;
    }
    const observable = observableOverride ?? this.state.recommendation;
    if (!observable) {
      this.view.showInlineError("no observable to measure");
      return;
    }
    try {
      const state = await this.api.postResult(this.state.id, observable, value);
      this.render(state);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.view.showInlineError("already recorded; refreshed the session");
        const state = await this.api.getSession(this.state.id);
        this.render(state);
        return;
      }
      this.view.showInlineError(describe(err));
    }
  }

  /**
   * Preview the recommendation that would follow a hypothetical value
   * for the current recommendation, without committing: replay the
   * history (same strategy and seed) into a shadow session, post the
   * hypothetical, read the shadow's recommendation, discard it.
   */
  async whatIf(raw: string): Promise<string | null> {
    if (!this.state || !this.state.recommendation) return null;
    const value = validateValue(raw);
    if (value === null) {
      this.view.showInlineError("enter a number between -1 and 1");
      return null;
    }
    let shadowId: string | null = null;
    try {
      const shadow = await this.api.createSession({
        n_qubits: this.state.n_qubits,
        strategy: this.state.strategy,
        seed: this.state.seed,
        b_star: this.state.b_star ?? undefined,
      });
      shadowId = shadow.id;
      for (const row of this.state.history) {
        await this.api.postResult(shadowId, row.observable, row.value);
      }
      const after = await this.api.postResult(
        shadowId,
        this.state.recommendation,
        value,
      );
      const preview: WhatIfPreview = {
        observable: this.state.recommendation,
        value,
        recommendation: after.recommendation,
      };
      this.view.renderWhatIf(preview);
      return after.recommendation;
    } catch (err) {
      this.whatIfAvailable = false;
      this.view.renderWhatIf(null);
      return null;
    } finally {
      if (shadowId) {
        await this.api.deleteSession(shadowId).catch(() => undefined);
      }
      if (this.state) {
        // the main session must never be touched by the preview
        const fresh = await this.api.getSession(this.state.id);
        this.render(fresh);
      }
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.status}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
