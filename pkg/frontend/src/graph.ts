/** Layered SVG rendering of the justification DAG.
 *
 * Edges run from a supporting atom (or the userFact marker) to the atom it
 * supports; roots sit on top and each supporter is drawn one layer below
 * the deepest atom it supports.  Negative edges are dashed and labelled,
 * userFact is a filled box, and atoms still containing extVar are
 * highlighted as substitutable.
 */

import type { GraphPayload } from "./api.js";
import { containsExtVar } from "./atoms.js";

export interface LayeredNode {
  id: string;
  level: number;
  isUserFact: boolean;
  isRoot: boolean;
  substitutable: boolean;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_W = 170;
const NODE_H = 30;
const H_GAP = 24;
const V_GAP = 60;

export function isGraphPayload(value: unknown): value is GraphPayload {
  if (typeof value !== "object" || value === null) return false;
  const candidate = value as GraphPayload;
  return (
    Array.isArray(candidate.roots) &&
    Array.isArray(candidate.edges) &&
    candidate.edges.every(
      (e) =>
        typeof e === "object" &&
        e !== null &&
        (e.sign === "pos" || e.sign === "neg") &&
        typeof e.from === "string" &&
        typeof e.to === "string"
    )
  );
}

export function layerGraph(payload: GraphPayload): LayeredNode[] {
  const supporters = new Map<string, string[]>();
  const ids = new Set<string>(payload.roots);
  for (const edge of payload.edges) {
    ids.add(edge.from);
    ids.add(edge.to);
    const list = supporters.get(edge.to) ?? [];
    list.push(edge.from);
    supporters.set(edge.to, list);
  }
  const levels = new Map<string, number>();
  const queue: string[] = [];
  for (const root of payload.roots) {
    levels.set(root, 0);
    queue.push(root);
  }
  // supporters land one layer below the deepest atom they support
  while (queue.length > 0) {
    const node = queue.shift()!;
    const level = levels.get(node)!;
    for (const parent of supporters.get(node) ?? []) {
      const next = level + 1;
      if ((levels.get(parent) ?? -1) < next) {
        levels.set(parent, next);
        queue.push(parent);
      }
    }
  }
  const deepest = Math.max(0, ...levels.values());
  const nodes: LayeredNode[] = [];
  for (const id of [...ids].sort()) {
    nodes.push({
      id,
      level: levels.get(id) ?? deepest + 1,
      isUserFact: id === "userFact",
      isRoot: payload.roots.includes(id),
      substitutable: containsExtVar(id),
    });
  }
  return nodes;
}

export function renderGraph(container: HTMLElement, payload: unknown): void {
  container.textContent = "";
  container.classList.add("graph-panel");
  if (!isGraphPayload(payload)) {
    const placeholder = document.createElement("p");
    placeholder.className = "graph-placeholder";
    placeholder.textContent = "justification graph unavailable (malformed payload)";
    container.appendChild(placeholder);
    return;
  }
  if (payload.edges.length === 0 && payload.roots.length === 0) {
    const empty = document.createElement("p");
    empty.className = "graph-empty";
    empty.textContent = "no justification edges for this solution";
    container.appendChild(empty);
    return;
  }

  const nodes = layerGraph(payload);
  const byLevel = new Map<number, LayeredNode[]>();
  for (const node of nodes) {
    const row = byLevel.get(node.level) ?? [];
    row.push(node);
    byLevel.set(node.level, row);
  }
  const positions = new Map<string, { x: number; y: number }>();
  const widest = Math.max(...[...byLevel.values()].map((row) => row.length));
  const width = widest * (NODE_W + H_GAP) + H_GAP;
  const height = (byLevel.size + 1) * V_GAP + NODE_H;
  for (const [level, row] of byLevel) {
    row.forEach((node, i) => {
      const rowWidth = row.length * (NODE_W + H_GAP);
      const x = (width - rowWidth) / 2 + i * (NODE_W + H_GAP) + H_GAP / 2;
      positions.set(node.id, { x, y: level * V_GAP + 10 });
    });
  }

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "justification-graph");

  for (const edge of payload.edges) {
    const from = positions.get(edge.from)!;
    const to = positions.get(edge.to)!;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x + NODE_W / 2));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x + NODE_W / 2));
    line.setAttribute("y2", String(to.y + NODE_H));
    line.setAttribute("class", `edge edge-${edge.sign}`);
    line.setAttribute("data-sign", edge.sign);
    line.setAttribute("data-from", edge.from);
    line.setAttribute("data-to", edge.to);
    if (edge.sign === "neg") {
      line.setAttribute("stroke-dasharray", "6 4");
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((from.x + to.x + NODE_W) / 2));
      label.setAttribute("y", String((from.y + to.y + NODE_H) / 2));
      label.setAttribute("class", "edge-label");
      label.textContent = "not";
      svg.appendChild(label);
    }
    svg.appendChild(line);
  }

  for (const node of nodes) {
    const pos = positions.get(node.id)!;
    const group = document.createElementNS(SVG_NS, "g");
    const classes = ["node"];
    if (node.isUserFact) classes.push("node-userfact");
    if (node.isRoot) classes.push("node-root");
    if (node.substitutable) classes.push("node-substitutable");
    group.setAttribute("class", classes.join(" "));
    group.setAttribute("data-atom", node.id);

    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(pos.x));
    rect.setAttribute("y", String(pos.y));
    rect.setAttribute("width", String(NODE_W));
    rect.setAttribute("height", String(NODE_H));
    rect.setAttribute("rx", node.isUserFact ? "0" : "10");
    group.appendChild(rect);

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(pos.x + NODE_W / 2));
    text.setAttribute("y", String(pos.y + NODE_H / 2 + 4));
    text.setAttribute("text-anchor", "middle");
    text.textContent = node.id;
    group.appendChild(text);

    group.addEventListener("click", () => {
      for (const other of svg.querySelectorAll(".node.selected")) {
        other.classList.remove("selected");
      }
      group.classList.add("selected");
      for (const line of svg.querySelectorAll(".edge")) {
        const touches =
          line.getAttribute("data-from") === node.id || line.getAttribute("data-to") === node.id;
        line.classList.toggle("edge-dimmed", !touches);
      }
    });
    svg.appendChild(group);
  }
  container.appendChild(svg);
}
