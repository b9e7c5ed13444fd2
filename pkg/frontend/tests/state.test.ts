import { describe, expect, it } from "vitest";
import { canTransition, initialState, transition } from "../src/state.js";

describe("phase transitions", () => {
  it("follows comparing -> complete -> learning -> results", () => {
    let s = { ...initialState(), phase: "comparing" as const };
    s = transition(s, "complete");
    s = transition(s, "learning");
    s = transition(s, "results");
    expect(s.phase).toBe("results");
  });

  it("results may return to comparing when a new session loads", () => {
    expect(canTransition("results", "comparing")).toBe(true);
    expect(canTransition("results", "loading")).toBe(true);
  });

  it("rejects skipping phases", () => {
    expect(canTransition("comparing", "learning")).toBe(false);
    expect(canTransition("comparing", "results")).toBe(false);
    expect(canTransition("complete", "results")).toBe(false);
    expect(() => transition({ ...initialState(), phase: "comparing" }, "results"))
      .toThrow(/illegal/);
  });

  it("staying in the same phase is always legal", () => {
    for (const phase of ["loading", "comparing", "complete", "learning", "results"] as const) {
      expect(canTransition(phase, phase)).toBe(true);
    }
  });
});
