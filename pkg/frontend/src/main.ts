/** DOM shell wiring the panels to the session store. */

import { ApiClient } from "./api.js";
import { containsExtVar } from "./atoms.js";
import { renderDiffPanel } from "./diff.js";
import { renderGraph } from "./graph.js";
import { SessionStore } from "./state.js";
import type { SessionView } from "./state.js";

const EXAMPLE_RULES = `relA(X,Y):-relB(X,Y), relD(Y), not relE(Y).
relE(Y):-relD(Y), not relF(Y).`;

const EXAMPLE_TASK = `{
  "query": "relA(P,R)",
  "depth": 4,
  "variant": "exp",
  "block": ["relA(_,_)"]
}`;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mountApp(root: HTMLElement, store: SessionStore): void {
  root.textContent = "";

  const setup = el("section", "setup-panel");
  setup.appendChild(el("h2", undefined, "Session"));
  const rulesInput = el("textarea", "rules-input");
  rulesInput.value = EXAMPLE_RULES;
  rulesInput.rows = 6;
  const taskInput = el("textarea", "task-input");
  taskInput.value = EXAMPLE_TASK;
  taskInput.rows = 8;
  const createButton = el("button", "create-session", "Create session");
  const solveButton = el("button", "solve-session", "Solve");
  setup.append(
    el("label", undefined, "Rules"),
    rulesInput,
    el("label", undefined, "Task"),
    taskInput,
    createButton,
    solveButton
  );

  const status = el("p", "status-line");
  const errorLine = el("p", "error-line");

  const solutionPanel = el("section", "solution-panel");
  solutionPanel.appendChild(el("h2", undefined, "Optimal solution"));
  const solutionList = el("ul", "solution-atoms");
  const costLine = el("p", "cost-line");
  const branches = el("div", "optimal-branches");
  solutionPanel.append(costLine, solutionList, branches);

  const factPanel = el("section", "fact-panel");
  factPanel.appendChild(el("h2", undefined, "Facts"));
  const factInput = el("input", "fact-input");
  factInput.placeholder = "relB(john,james)";
  const factButton = el("button", "fact-submit", "Add fact");
  const factList = el("ul", "fact-list");
  factPanel.append(factInput, factButton, factList);

  const diffPanel = el("section", "diff-host");
  diffPanel.appendChild(el("h2", undefined, "Solution diff"));
  const diffBody = el("div", "diff-body");
  diffPanel.appendChild(diffBody);

  const graphPanel = el("section", "graph-host");
  graphPanel.appendChild(el("h2", undefined, "Justification graph"));
  const graphBody = el("div", "graph-body");
  graphPanel.appendChild(graphBody);

  const historyPanel = el("section", "history-panel");
  historyPanel.appendChild(el("h2", undefined, "History"));
  const historyList = el("ol", "history-timeline");
  historyPanel.appendChild(historyList);

  const tracePanel = el("section", "trace-panel");
  tracePanel.appendChild(el("h2", undefined, "Generalize"));
  const stepButton = el("button", "trace-step", "Step");
  const traceList = el("ol", "trace-steps");
  const traceResult = el("p", "trace-result");
  tracePanel.append(stepButton, traceList, traceResult);

  root.append(
    setup,
    status,
    errorLine,
    solutionPanel,
    factPanel,
    diffPanel,
    graphPanel,
    historyPanel,
    tracePanel
  );

  createButton.addEventListener("click", () => {
    void store.create(rulesInput.value, taskInput.value);
  });
  solveButton.addEventListener("click", () => void store.solve());
  factButton.addEventListener("click", () => {
    void store.submitFact(factInput.value).then(() => {
      if (!store.view.error) factInput.value = "";
    });
  });
  stepButton.addEventListener("click", () => void store.stepGeneralize());

  store.subscribe((view) => render(view));

  function render(view: SessionView): void {
    status.textContent = view.sessionId
      ? `session ${view.sessionId}${view.busy ? " (working...)" : ""}`
      : "no session";
    errorLine.textContent = view.error ?? "";
    errorLine.classList.toggle("visible", view.error !== null);

    solutionList.textContent = "";
    if (view.solution) {
      costLine.textContent = `cost ${view.solution.cost ?? "-"}`;
      for (const atom of view.solution.abduced) {
        const item = el("li", "solution-atom", atom);
        if (containsExtVar(atom)) item.classList.add("substitutable");
        solutionList.appendChild(item);
      }
    } else {
      costLine.textContent = "not solved yet";
    }

    branches.textContent = "";
    if (view.allOptimal.length > 1) {
      branches.appendChild(el("p", "branch-note", `${view.allOptimal.length} optimal solutions`));
    }

    factList.textContent = "";
    for (const atom of view.facts.base) {
      factList.appendChild(el("li", "fact fact-base", atom));
    }
    for (const atom of view.facts.dynamic) {
      const item = el("li", "fact fact-dynamic", atom);
      const remove = el("button", "fact-remove", "remove");
      remove.addEventListener("click", () => void store.removeFact(atom));
      item.appendChild(remove);
      factList.appendChild(item);
    }

    historyList.textContent = "";
    for (const entry of view.timeline) {
      historyList.appendChild(el("li", "history-entry", entry));
    }

    renderDiffPanel(diffBody, view.diff);
    renderGraph(graphBody, view.graph ?? { roots: [], edges: [] });

    traceList.textContent = "";
    traceResult.textContent = "";
    if (view.trace) {
      for (const step of view.trace.steps) {
        const item = el("li", "trace-step-item");
        const fact = step.added_fact ? `after adding ${step.added_fact}: ` : "start: ";
        item.textContent = fact + step.solution.join(", ");
        if (step.all_optimal.length > 1) {
          const chooser = el("ul", "branch-chooser");
          for (const branch of step.all_optimal) {
            chooser.appendChild(el("li", "branch-option", branch.join(", ")));
          }
          item.appendChild(chooser);
        }
        traceList.appendChild(item);
      }
      if (view.trace.finished) {
        const vars = view.trace
          .varMapEntries()
          .map(([c, v]) => `${c} -> ${v}`)
          .join(", ");
        traceResult.textContent =
          `generalized: ${view.trace.generalized().join(", ")}` + (vars ? ` (${vars})` : "");
      }
    }
  }

  render(store.view);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!, new SessionStore(new ApiClient("")));
}
