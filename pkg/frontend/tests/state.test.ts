import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/state.js";
import { TraceStepper } from "../src/trace.js";
import createResponse from "./fixtures/naf_pair_create.json";
import summary from "./fixtures/naf_pair_summary.json";
import solveBundle from "./fixtures/naf_pair_solve.json";
import addBundle from "./fixtures/naf_pair_add_relB.json";
import removeBundle from "./fixtures/naf_pair_remove_relB.json";
import chainGeneralize from "./fixtures/chain_generalize.json";
import overlapGeneralize from "./fixtures/overlap_generalize.json";

function stubbedApi(): { api: ApiClient; calls: string[] } {
  const api = new ApiClient("");
  const calls: string[] = [];
  vi.spyOn(api, "createSession").mockImplementation(async () => {
    calls.push("create");
    return createResponse as { id: string };
  });
  vi.spyOn(api, "summary").mockImplementation(async () => {
    calls.push("summary");
    return summary as never;
  });
  vi.spyOn(api, "solve").mockImplementation(async () => {
    calls.push("solve");
    return solveBundle as never;
  });
  vi.spyOn(api, "addFact").mockImplementation(async () => {
    calls.push("addFact");
    return addBundle as never;
  });
  vi.spyOn(api, "removeFact").mockImplementation(async () => {
    calls.push("removeFact");
    return removeBundle as never;
  });
  vi.spyOn(api, "generalize").mockImplementation(async () => {
    calls.push("generalize");
    return chainGeneralize as never;
  });
  return { api, calls };
}

describe("SessionStore", () => {
  let api: ApiClient;
  let calls: string[];
  let store: SessionStore;

  beforeEach(async () => {
    ({ api, calls } = stubbedApi());
    store = new SessionStore(api);
    await store.create("rules", "task");
  });

  it("creates a session and loads the summary", () => {
    expect(store.view.sessionId).toBe(createResponse.id);
    expect(store.view.summary?.query).toBe("relA(P,R)");
    expect(calls).toEqual(["create", "summary"]);
  });

  it("solve fills the solution panel state", async () => {
    await store.solve();
    expect(store.view.solution?.abduced).toEqual(["relB(v1,v2)", "relD(v2)", "relF(v2)"]);
    expect(store.view.solution?.cost).toBe(3);
    expect(store.view.graph).not.toBeNull();
  });

  it("submitFact applies the bundle and diff", async () => {
    await store.solve();
    await store.submitFact("relB(john,james)");
    expect(store.view.solution?.abduced).toEqual(["relD(james)", "relF(james)"]);
    expect(store.view.diff).toEqual({
      entered: ["relD(james)", "relF(james)"],
      left: ["relB(v1,v2)", "relD(v2)", "relF(v2)"],
    });
  });

  it("rejects non-ground facts inline without any request", async () => {
    await store.submitFact("relB(X,james)");
    expect(store.view.error).toMatch(/ground/);
    expect(calls.filter((c) => c === "addFact")).toHaveLength(0);
  });

  it("removeFact restores the previous solution", async () => {
    await store.submitFact("relB(john,james)");
    await store.removeFact("relB(john,james)");
    expect(store.view.solution?.abduced).toEqual(["relB(v1,v2)", "relD(v2)", "relF(v2)"]);
  });

  it("stepGeneralize reveals one step per call", async () => {
    await store.stepGeneralize();
    expect(store.view.trace?.steps).toHaveLength(1);
    expect(store.view.trace?.steps[0].added_fact).toBeNull();
    await store.stepGeneralize();
    await store.stepGeneralize();
    expect(store.view.trace?.steps).toHaveLength(3);
    expect(store.view.trace?.finished).toBe(true);
    expect(store.view.trace?.steps[2].solution).toEqual(["relE(john,v1,v2)"]);
    expect(calls.filter((c) => c === "generalize")).toHaveLength(1);
    // stepping past the end is a no-op
    await store.stepGeneralize();
    expect(store.view.trace?.steps).toHaveLength(3);
  });
});

describe("TraceStepper", () => {
  it("walks the three-step chain run and exposes the variable map", () => {
    const stepper = new TraceStepper(chainGeneralize as never);
    expect(stepper.step()?.solution).toEqual([
      "relC(john,extVar)",
      "relD(john,extVar,extVar)",
      "relE(john,extVar,extVar)",
    ]);
    expect(stepper.step()?.added_fact).toBe("relC(john,v1)");
    expect(stepper.step()?.added_fact).toBe("relD(john,v1,v2)");
    expect(stepper.finished).toBe(true);
    expect(stepper.step()).toBeNull();
    expect(stepper.varMapEntries()).toEqual([
      ["v1", "Y"],
      ["v2", "Z"],
    ]);
    expect(stepper.generalized()).toEqual(["relC(john,Y)", "relD(john,Y,Z)", "relE(john,Y,Z)"]);
  });

  it("exposes both optimal branches for the overlapping-rule run", () => {
    const stepper = new TraceStepper(overlapGeneralize as never);
    stepper.step();
    expect(stepper.currentBranches()).toHaveLength(2);
    expect(stepper.currentBranches()).toContainEqual(["relB(john)", "relC(extVar)"]);
    expect(stepper.currentBranches()).toContainEqual(["relB(john)", "relC(john)"]);
  });
});
