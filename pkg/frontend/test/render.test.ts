import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { createApp } from "../src/app.js";
import type { SessionState } from "../src/types.js";

/** Rendering against a stubbed client: the view must mirror service state
 * verbatim, badges included, with no logic of its own. */

const LAYOUT = {
  text: "!X|Y",
  nodes: [
    { path: [0, 0], start: 1, end: 2, kind: "var" },
    { path: [0], start: 0, end: 2, kind: "not" },
    { path: [1], start: 3, end: 4, kind: "var" },
    { path: [], start: 0, end: 4, kind: "or", members: [[0, 2], [3, 4]] as [number, number][] },
  ],
};

function stubState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    id: "s1",
    task_id: "t1",
    mode: "RULE",
    feedback: true,
    phase: "Marking",
    formula: "!X|Y",
    layout: LAYOUT,
    stage: "5",
    task_vars: ["X", "Y"],
    marked: null,
    steps: [],
    completed: false,
    ...overrides,
  };
}

function stubClient(state: SessionState): ApiClient {
  const stub = {
    createSession: async () => state,
    getSession: async () => state,
    mark: async () => ({ state, applicable: [] }),
    applyRule: async () => ({ state, verdict: null }),
    inputFormula: async () => ({ state, verdict: null }),
    undo: async () => ({ state, verdict: null }),
    exportAttempt: async () => "{}",
    rules: async () => ({ rules: [] }),
  };
  return stub as unknown as ApiClient;
}

describe("view rendering", () => {
  it("renders one selectable span per character", async () => {
    const root = document.createElement("div");
    const app = createApp(root, stubClient(stubState()));
    await app.start({ formula: "!X|Y", mode: "RULE", feedback: true });
    const chars = root.querySelectorAll(".formula [data-off]");
    expect(chars.length).toBe(4);
    expect(Array.from(chars, (c) => c.textContent).join("")).toBe("!X|Y");
  });

  it("badges mirror the verdicts exactly", async () => {
    const state = stubState({
      steps: [
        { op: "apply", formula: "!X|Y", verdict: { ok: true, stage: "1", error: null, message: null, clue: null } },
        { op: "undo" },
        { op: "apply", formula: "!X|Y", verdict: { ok: false, stage: "5", error: "E12", message: "m", clue: null } },
        { op: "apply", formula: "!X|Y", verdict: null },
      ],
    });
    const root = document.createElement("div");
    const app = createApp(root, stubClient(state));
    await app.start({ formula: "!X|Y", mode: "RULE", feedback: true });
    expect(app.badges()).toEqual(["OK", "UNDO", "E12", null]);
  });

  it("highlights the marked span", async () => {
    const state = stubState({ marked: { path: [0] }, phase: "Replacing" });
    const root = document.createElement("div");
    const app = createApp(root, stubClient(state));
    await app.start({ formula: "!X|Y", mode: "RULE", feedback: true });
    const selected = Array.from(root.querySelectorAll(".formula .sel"), (c) => c.textContent);
    expect(selected.join("")).toBe("!X");
  });

  it("shows the input row only in INPUT mode with a mark", async () => {
    const root = document.createElement("div");
    const app = createApp(root, stubClient(stubState({ mode: "INPUT", marked: { path: [] } })));
    await app.start({ formula: "!X|Y", mode: "INPUT", feedback: true });
    expect((root.querySelector(".inputrow") as HTMLElement).hidden).toBe(false);
    const ruleButtons = root.querySelectorAll(".rules button");
    expect(ruleButtons.length).toBe(0);
  });
});
