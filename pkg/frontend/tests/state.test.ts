import { beforeEach, describe, expect, it } from "vitest";

import { WorkbenchState } from "../src/state.js";
import { clearStaged, loadStaged, saveStaged } from "../src/storage.js";

const make = (): WorkbenchState => new WorkbenchState("pair-1", [1, 2, 4], 0);

describe("selection", () => {
  it("toggles edit ops on and off", () => {
    const state = make();
    expect(state.toggleSelect(1)).toBe(true);
    expect(state.isSelected(1)).toBe(true);
    expect(state.toggleSelect(1)).toBe(true);
    expect(state.isSelected(1)).toBe(false);
  });

  it("refuses keep and out-of-range ops", () => {
    const state = make();
    expect(state.toggleSelect(0)).toBe(false);
    expect(state.toggleSelect(99)).toBe(false);
    expect(state.selectedOps).toEqual([]);
  });

  it("reports selected ops sorted", () => {
    const state = make();
    state.toggleSelect(4);
    state.toggleSelect(1);
    expect(state.selectedOps).toEqual([1, 4]);
  });
});

describe("staging groups", () => {
  it("throws with nothing selected", () => {
    expect(() => make().stageGroup("lexical")).toThrow(/select at least one/);
  });

  it("stages the selection sorted and clears it", () => {
    const state = make();
    state.toggleSelect(4);
    state.toggleSelect(1);
    const group = state.stageGroup("lexical");
    expect(group).toEqual({ category: "lexical", opIndices: [1, 4] });
    expect(state.selectedOps).toEqual([]);
    expect(state.stagedGroups).toHaveLength(1);
  });

  it("allows overlapping groups", () => {
    const state = make();
    state.toggleSelect(1);
    state.toggleSelect(2);
    state.stageGroup("lexical");
    state.toggleSelect(2);
    state.toggleSelect(4);
    state.stageGroup("semantic_deletion");
    expect(state.groupCountFor(2)).toBe(2);
    expect(state.groupCountFor(1)).toBe(1);
    expect(state.groupCountFor(0)).toBe(0);
  });

  it("removes groups by index", () => {
    const state = make();
    state.toggleSelect(1);
    state.stageGroup("format");
    state.removeGroup(0);
    expect(state.stagedGroups).toHaveLength(0);
    state.removeGroup(5); // out of range is a no-op
  });
});

describe("coverage and submitability", () => {
  it("starts with every edit op uncovered", () => {
    const state = make();
    expect(state.uncovered()).toEqual([1, 2, 4]);
    expect(state.complete).toBe(false);
    expect(state.canSubmit()).toBe(false);
  });

  it("submits once coverage is complete", () => {
    const state = make();
    state.toggleSelect(1);
    state.toggleSelect(2);
    state.stageGroup("lexical");
    expect(state.canSubmit()).toBe(false);
    state.toggleSelect(4);
    state.stageGroup("semantic_deletion");
    expect(state.uncovered()).toEqual([]);
    expect(state.canSubmit()).toBe(true);
  });

  it("a pair with no edit ops is never submittable", () => {
    const state = new WorkbenchState("empty", [], 0);
    expect(state.complete).toBe(true);
    expect(state.canSubmit()).toBe(false);
  });

  it("unaligned flag enables submit with zero groups, not with groups", () => {
    const state = make();
    state.toggleUnaligned();
    expect(state.canSubmit()).toBe(true);
    state.toggleSelect(1);
    state.stageGroup("lexical");
    expect(state.canSubmit()).toBe(false);
  });
});

describe("payload", () => {
  it("matches the service record shape, op indices sorted", () => {
    const state = make();
    state.toggleSelect(2);
    state.toggleSelect(1);
    state.stageGroup("lexical");
    expect(state.payload("annotator1")).toEqual({
      pair_id: "pair-1",
      annotator_id: "annotator1",
      unaligned_flag: false,
      groups: [{ category: "lexical", op_indices: [1, 2] }],
    });
  });

  it("every payload op index is an edit index", () => {
    const state = make();
    for (const idx of [1, 2, 4]) {
      state.toggleSelect(idx);
      state.stageGroup("format");
    }
    const payload = state.payload("a");
    for (const group of payload.groups) {
      for (const idx of group.op_indices) {
        expect(state.editIndices.has(idx)).toBe(true);
      }
    }
  });
});

describe("snapshot, restore, and storage", () => {
  beforeEach(() => {
    window.localStorage.clear();
  });

  it("round-trips staged work", () => {
    const state = make();
    state.toggleSelect(1);
    state.stageGroup("lexical");
    state.toggleSelect(2);
    state.toggleUnaligned();
    const copy = new WorkbenchState("pair-1", [1, 2, 4], 3);
    expect(copy.restore(state.snapshot())).toBe(0);
    expect(copy.stagedGroups).toEqual([{ category: "lexical", opIndices: [1] }]);
    expect(copy.selectedOps).toEqual([2]);
    expect(copy.flagged).toBe(true);
  });

  it("drops whole groups that reference vanished ops", () => {
    const state = make();
    state.toggleSelect(1);
    state.toggleSelect(4);
    state.stageGroup("lexical");
    state.toggleSelect(2);
    state.stageGroup("format");
    // the re-served sequence no longer has op 4 as an edit
    const fresh = new WorkbenchState("pair-1", [1, 2], 1);
    expect(fresh.restore(state.snapshot())).toBe(1);
    expect(fresh.stagedGroups).toEqual([{ category: "format", opIndices: [2] }]);
  });

  it("ignores snapshots from a different pair", () => {
    const state = make();
    state.toggleSelect(1);
    state.stageGroup("lexical");
    const other = new WorkbenchState("pair-2", [1], 0);
    expect(other.restore(state.snapshot())).toBe(0);
    expect(other.stagedGroups).toEqual([]);
  });

  it("persists through localStorage and clears after submit", () => {
    const state = make();
    state.toggleSelect(1);
    state.stageGroup("lexical");
    saveStaged(window.localStorage, state.snapshot());
    const loaded = loadStaged(window.localStorage, "pair-1");
    expect(loaded?.groups).toEqual([{ category: "lexical", opIndices: [1] }]);
    clearStaged(window.localStorage, "pair-1");
    expect(loadStaged(window.localStorage, "pair-1")).toBeNull();
  });

  it("treats corrupted storage as empty", () => {
    window.localStorage.setItem("docsimp.staged.pair-1", "{not json");
    expect(loadStaged(window.localStorage, "pair-1")).toBeNull();
    window.localStorage.setItem(
      "docsimp.staged.pair-1",
      JSON.stringify({ pairId: "other" }),
    );
    expect(loadStaged(window.localStorage, "pair-1")).toBeNull();
  });

  it("notifies listeners on every mutation", () => {
    const state = make();
    let calls = 0;
    state.onChange(() => {
      calls += 1;
    });
    state.toggleSelect(1); // 1
    state.stageGroup("lexical"); // 2
    state.toggleUnaligned(); // 3
    state.removeGroup(0); // 4
    expect(calls).toBe(4);
  });
});
