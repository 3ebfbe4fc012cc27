import { describe, expect, it } from "vitest";

import { renderDiffPanel } from "../src/diff.js";
import { isGraphPayload, layerGraph, renderGraph } from "../src/graph.js";
import type { GraphPayload, SolutionDiff } from "../src/api.js";
import addBundle from "./fixtures/naf_pair_add_relB.json";
import graphPayload from "./fixtures/graphdemo_graph.json";
import chainBundle from "./fixtures/chain_solve.json";

describe("diff panel", () => {
  it("shows three atoms leaving and two entering after the first fact", () => {
    const host = document.createElement("div");
    renderDiffPanel(host, addBundle.diff as SolutionDiff);
    expect(host.querySelectorAll(".diff-atom-leaving")).toHaveLength(3);
    expect(host.querySelectorAll(".diff-atom-entering")).toHaveLength(2);
    const leaving = [...host.querySelectorAll(".diff-atom-leaving")].map((n) => n.textContent);
    expect(leaving).toEqual(["relB(v1,v2)", "relD(v2)", "relF(v2)"]);
    const entering = [...host.querySelectorAll(".diff-atom-entering")].map((n) => n.textContent);
    expect(entering).toEqual(["relD(james)", "relF(james)"]);
  });

  it("renders an empty state without a diff", () => {
    const host = document.createElement("div");
    renderDiffPanel(host, null);
    expect(host.querySelector(".diff-empty")).not.toBeNull();
  });
});

describe("justification graph", () => {
  it("renders six edges with exactly one dashed negative edge", () => {
    const host = document.createElement("div");
    renderGraph(host, graphPayload);
    const edges = host.querySelectorAll(".edge");
    expect(edges).toHaveLength(6);
    const dashed = host.querySelectorAll('.edge[stroke-dasharray]');
    expect(dashed).toHaveLength(1);
    expect(dashed[0].getAttribute("data-sign")).toBe("neg");
    const labels = [...host.querySelectorAll(".edge-label")].map((n) => n.textContent);
    expect(labels).toEqual(["not"]);
  });

  it("draws the userFact marker as a distinct box and highlights the root", () => {
    const host = document.createElement("div");
    renderGraph(host, graphPayload);
    expect(host.querySelector('.node-userfact [rx="0"]')).not.toBeNull();
    const root = host.querySelector(".node-root");
    expect(root?.getAttribute("data-atom")).toBe("relA(john)");
    // node count matches the payload's atom set plus the marker
    const atoms = new Set<string>();
    for (const e of (graphPayload as GraphPayload).edges) {
      atoms.add(e.from);
      atoms.add(e.to);
    }
    expect(host.querySelectorAll(".node")).toHaveLength(atoms.size);
  });

  it("layers supporters below the atoms they support", () => {
    const nodes = layerGraph(graphPayload as GraphPayload);
    const byId = new Map(nodes.map((n) => [n.id, n.level]));
    expect(byId.get("relA(john)")).toBe(0);
    expect(byId.get("relB(john,james)")).toBe(1);
    expect(byId.get("relC(john,james)")).toBe(1);
    expect(byId.get("relD(john,james,mary)")).toBe(2);
    expect(byId.get("userFact")).toBe(3);
  });

  it("marks extVar atoms as substitutable", () => {
    const host = document.createElement("div");
    renderGraph(host, chainBundle.graph);
    const highlighted = host.querySelectorAll(".node-substitutable");
    expect(highlighted.length).toBeGreaterThan(0);
    for (const node of highlighted) {
      expect(node.getAttribute("data-atom")).toContain("extVar");
    }
  });

  it("falls back to a placeholder on malformed payloads", () => {
    const host = document.createElement("div");
    renderGraph(host, { bogus: true });
    expect(host.querySelector(".graph-placeholder")).not.toBeNull();
    expect(isGraphPayload({ roots: [], edges: [{ sign: "maybe", from: 1 }] })).toBe(false);
  });

  it("renders an empty-state message for empty graphs", () => {
    const host = document.createElement("div");
    renderGraph(host, { roots: [], edges: [] });
    expect(host.querySelector(".graph-empty")).not.toBeNull();
  });

  it("click selection dims unrelated edges", () => {
    const host = document.createElement("div");
    renderGraph(host, graphPayload);
    const node = [...host.querySelectorAll(".node")].find(
      (n) => n.getAttribute("data-atom") === "relB(john,james)"
    )!;
    (node as SVGGElement).dispatchEvent(new MouseEvent("click"));
    expect(node.classList.contains("selected")).toBe(true);
    // three of the six edges touch relB: from relD, from relE, into relA
    const dimmed = host.querySelectorAll(".edge-dimmed");
    expect(dimmed).toHaveLength(3);
  });
});
