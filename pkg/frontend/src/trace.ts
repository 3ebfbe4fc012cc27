/** Step-wise reveal of a generalization run.
 *
 * The service computes the whole loop in one call; the panel walks the
 * trace one step per click so the user can follow each substitution, and
 * surfaces every optimal branch the solver reported at a step.
 */

import type { GeneralizeResult, GeneralizeStep } from "./api.js";

export class TraceStepper {
  private revealed = 0;

  constructor(public readonly result: GeneralizeResult) {}

  get steps(): GeneralizeStep[] {
    return this.result.trace.slice(0, this.revealed);
  }

  get finished(): boolean {
    return this.revealed >= this.result.trace.length;
  }

  /** Reveal the next step; returns null once the trace is exhausted. */
  step(): GeneralizeStep | null {
    if (this.finished) return null;
    const next = this.result.trace[this.revealed];
    this.revealed += 1;
    return next;
  }

  /** Branches of the latest revealed step (a chooser is shown when > 1). */
  currentBranches(): string[][] {
    if (this.revealed === 0) return [];
    return this.result.trace[this.revealed - 1].all_optimal;
  }

  varMapEntries(): [string, string][] {
    return Object.entries(this.result.var_map);
  }

  generalized(): string[] {
    return this.result.generalized;
  }
}
