/** Session view-model: one mutation in flight at a time, pure API client. */

import { ApiClient, ApiError } from "./api.js";
import type { GraphPayload, SessionSummary, SolutionDiff, SolveBundle } from "./api.js";
import { validateFactText } from "./atoms.js";
import { TraceStepper } from "./trace.js";

export interface SessionView {
  sessionId: string | null;
  rulesText: string;
  taskText: string;
  summary: SessionSummary | null;
  solution: { abduced: string[]; cost: number | null } | null;
  allOptimal: string[][];
  diff: SolutionDiff | null;
  graph: GraphPayload | null;
  facts: { base: string[]; dynamic: string[] };
  timeline: string[];
  error: string | null;
  trace: TraceStepper | null;
  busy: boolean;
}

type Listener = (view: SessionView) => void;

export class SessionStore {
  view: SessionView = {
    sessionId: null,
    rulesText: "",
    taskText: "",
    summary: null,
    solution: null,
    allOptimal: [],
    diff: null,
    graph: null,
    facts: { base: [], dynamic: [] },
    timeline: [],
    error: null,
    trace: null,
    busy: false,
  };

  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.view);
  }

  private patch(changes: Partial<SessionView>): void {
    this.view = { ...this.view, ...changes };
    this.emit();
  }

  private applyBundle(bundle: SolveBundle): void {
    this.patch({
      solution: { abduced: bundle.abduced, cost: bundle.cost },
      allOptimal: bundle.all_optimal,
      diff: bundle.diff ?? null,
      graph: bundle.graph,
      facts: bundle.facts,
      error: null,
    });
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    if (this.view.busy) return;
    this.patch({ busy: true });
    try {
      await action();
    } catch (err) {
      const message = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      this.patch({ error: message });
    } finally {
      this.patch({ busy: false });
    }
  }

  async create(rulesText: string, taskText: string): Promise<void> {
    await this.guarded(async () => {
      const { id } = await this.api.createSession(rulesText, taskText);
      const summary = await this.api.summary(id);
      this.patch({
        sessionId: id,
        rulesText,
        taskText,
        summary,
        solution: null,
        allOptimal: [],
        diff: null,
        graph: null,
        facts: summary.facts,
        timeline: [],
        trace: null,
        error: null,
      });
    });
  }

  async solve(): Promise<void> {
    await this.guarded(async () => {
      const bundle = await this.api.solve(this.requireSession());
      this.applyBundle(bundle);
      this.logAction(`solve (cost ${bundle.cost ?? "-"})`);
    });
  }

  /** Adds a fact; invalid atom text never reaches the service. */
  async submitFact(atomText: string): Promise<void> {
    const problem = validateFactText(atomText);
    if (problem) {
      this.patch({ error: problem });
      return;
    }
    await this.guarded(async () => {
      const bundle = await this.api.addFact(this.requireSession(), atomText.trim());
      this.applyBundle(bundle);
      this.logAction(`add ${atomText.trim()} (cost ${bundle.cost ?? "-"})`);
    });
  }

  async removeFact(atomText: string): Promise<void> {
    await this.guarded(async () => {
      const bundle = await this.api.removeFact(this.requireSession(), atomText);
      this.applyBundle(bundle);
      this.logAction(`remove ${atomText} (cost ${bundle.cost ?? "-"})`);
    });
  }

  /** One generalization step per call; fetches the run on first use. */
  async stepGeneralize(pick?: string): Promise<void> {
    if (this.view.trace && !pick) {
      if (!this.view.trace.finished) {
        this.view.trace.step();
        this.patch({ error: null });
      }
      return;
    }
    await this.guarded(async () => {
      const result = await this.api.generalize(this.requireSession(), pick ? { pick } : {});
      const stepper = new TraceStepper(result);
      stepper.step();
      this.patch({ trace: stepper, error: null });
    });
  }

  private logAction(entry: string): void {
    this.patch({ timeline: [...this.view.timeline, entry] });
  }

  private requireSession(): string {
    if (!this.view.sessionId) throw new Error("no session yet");
    return this.view.sessionId;
  }
}
