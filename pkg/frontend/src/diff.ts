/** Before/after diff panel for the abduced solution. */

import type { SolutionDiff } from "./api.js";

export function renderDiffPanel(container: HTMLElement, diff: SolutionDiff | null): void {
  container.textContent = "";
  container.classList.add("diff-panel");
  if (!diff || (diff.entered.length === 0 && diff.left.length === 0)) {
    const empty = document.createElement("p");
    empty.className = "diff-empty";
    empty.textContent = diff ? "solution unchanged" : "no diff yet";
    container.appendChild(empty);
    return;
  }
  container.appendChild(diffList("leaving", diff.left));
  container.appendChild(diffList("entering", diff.entered));
}

function diffList(kind: "entering" | "leaving", atoms: string[]): HTMLElement {
  const section = document.createElement("div");
  section.className = `diff-${kind}`;
  const heading = document.createElement("h4");
  heading.textContent = `${kind} (${atoms.length})`;
  section.appendChild(heading);
  const list = document.createElement("ul");
  for (const atom of atoms) {
    const item = document.createElement("li");
    item.className = `diff-atom diff-atom-${kind}`;
    item.textContent = atom;
    list.appendChild(item);
  }
  section.appendChild(list);
  return section;
}
