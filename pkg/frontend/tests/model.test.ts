import { describe, expect, it } from "vitest";

import type { InstanceSummary, SolveResponse } from "../src/api.js";
import {
  applyFailure,
  applySolve,
  pinnedIds,
  sessionFromSummary,
  startSolve,
  togglePin,
} from "../src/model.js";

const summary: InstanceSummary = {
  id: "abc123",
  num_photos: 3,
  num_locations: 3,
  true_location: 2,
  score_kind: "raw",
  photo_scores: [
    { id: "p0", true_score: 1.0 },
    { id: "p1", true_score: 1.0 },
    { id: "p2", true_score: 0.0 },
  ],
  top: [
    { location: 2, score: 2.0, is_true: true },
    { location: 0, score: -3.0, is_true: false },
    { location: 1, score: -3.0, is_true: false },
  ],
  protected_k: 0,
};

const solveResponse: SolveResponse = {
  plan: { deleted: ["p0"], kept: ["p1", "p2"], protected_k: 1, status: "optimal" },
  report: { proved_optimal: true, nodes_explored: 0, best_bound: 2 },
  photo_scores: summary.photo_scores,
  before: summary.top && { top: summary.top, protected_k: 0 },
  after: {
    top: [
      { location: 1, score: 2.0, is_true: false },
      { location: 2, score: 1.0, is_true: true },
      { location: 0, score: -3.0, is_true: false },
    ],
    protected_k: 1,
  },
};

describe("sessionFromSummary", () => {
  it("sorts cards by true-location score, highest first", () => {
    const vm = sessionFromSummary(summary);
    expect(vm.photos.map((p) => p.id)).toEqual(["p0", "p1", "p2"]);
    expect(vm.photos[2].trueScore).toBe(0.0);
  });

  it("keeps the server baseline ranking", () => {
    const vm = sessionFromSummary(summary);
    expect(vm.baseline?.protected_k).toBe(0);
    expect(vm.baseline?.top[0].is_true).toBe(true);
  });

  it("attaches optional thumbnails by photo id", () => {
    const vm = sessionFromSummary(summary, { p1: "http://x/1.jpg" });
    expect(vm.photos.find((p) => p.id === "p1")?.imageUrl).toBe("http://x/1.jpg");
    expect(vm.photos.find((p) => p.id === "p0")?.imageUrl).toBeUndefined();
  });
});

describe("togglePin", () => {
  it("flips the pin and reports pinned ids", () => {
    let vm = sessionFromSummary(summary);
    vm = togglePin(vm, "p2");
    expect(pinnedIds(vm)).toEqual(["p2"]);
    vm = togglePin(vm, "p2");
    expect(pinnedIds(vm)).toEqual([]);
  });

  it("clears a stale deletion mark when pinning", () => {
    let vm = sessionFromSummary(summary);
    vm = applySolve(vm, solveResponse);
    expect(vm.photos.find((p) => p.id === "p0")?.deleted).toBe(true);
    vm = togglePin(vm, "p0");
    const card = vm.photos.find((p) => p.id === "p0")!;
    expect(card.pinned).toBe(true);
    expect(card.deleted).toBe(false);
  });
});

describe("applySolve", () => {
  it("marks deleted cards and stores only server-sent numbers", () => {
    let vm = sessionFromSummary(summary);
    vm = applySolve(startSolve(vm), solveResponse);
    expect(vm.solving).toBe(false);
    expect(vm.photos.filter((p) => p.deleted).map((p) => p.id)).toEqual(["p0"]);
    expect(vm.result?.protectedK).toBe(1);
    expect(vm.result?.provedOptimal).toBe(true);
  });

  it("never renders a pinned photo as deleted", () => {
    let vm = sessionFromSummary(summary);
    vm = togglePin(vm, "p0");
    vm = applySolve(vm, solveResponse); // server response deletes p0
    const card = vm.photos.find((p) => p.id === "p0")!;
    expect(card.pinned).toBe(true);
    expect(card.deleted).toBe(false);
  });
});

describe("applyFailure", () => {
  it("shows the banner and keeps prior state", () => {
    let vm = sessionFromSummary(summary);
    vm = applySolve(vm, solveResponse);
    const failed = applyFailure(startSolve(vm), "no deletion set satisfies");
    expect(failed.banner).toContain("no deletion set");
    expect(failed.solving).toBe(false);
    expect(failed.result).toEqual(vm.result);
    expect(failed.photos).toEqual(vm.photos);
  });
});

describe("startSolve", () => {
  it("sets the in-flight flag and clears the banner", () => {
    let vm = applyFailure(sessionFromSummary(summary), "old error");
    vm = startSolve(vm);
    expect(vm.solving).toBe(true);
    expect(vm.banner).toBeNull();
  });
});
