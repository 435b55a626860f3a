import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { Workbench } from "../src/app.js";
import type { PairDetail } from "../src/types.js";
import {
  click,
  fakeService,
  mariinskyDetail,
  noEditsDetail,
  settle,
  TAXONOMY,
  type FakeService,
} from "./helpers.js";

let root: HTMLElement;
const benches: Workbench[] = [];

function mount(service: FakeService, annotator = "annotator1"): Workbench {
  const bench = new Workbench(root, {
    apiBase: "http://fake.test",
    annotatorId: annotator,
    fetchImpl: service.fetch,
  });
  benches.push(bench);
  return bench;
}

beforeEach(() => {
  window.localStorage.clear();
  root = document.createElement("main");
  document.body.append(root);
});

afterEach(() => {
  for (const bench of benches.splice(0)) bench.dispose();
  root.remove();
});

describe("rendering a pair", () => {
  it("shows one insert chip and one delete chip for the Mariinsky fixture", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");

    const ins = root.querySelectorAll("button.op.ins");
    const del = root.querySelectorAll("button.op.del");
    expect(ins).toHaveLength(1);
    expect(del).toHaveLength(1);
    expect(ins[0]?.textContent).toContain("very famous");
    expect(del[0]?.textContent).toContain("historic");
    // keep text renders as plain spans, not clickable buttons
    const keeps = root.querySelectorAll("span.op.keep");
    expect(keeps).toHaveLength(2);
    expect(keeps[0]?.textContent).toBe("The Mariinsky Theatre is a");
  });

  it("shows the uncovered counter equal to the edit-op count before grouping", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");
    const label = root.querySelector(".coverage-label");
    expect(label?.getAttribute("data-uncovered")).toBe("2");
    expect(label?.textContent).toBe("2 of 2 edit ops uncovered");
  });

  it("shows a banner when there is nothing to annotate", async () => {
    const service = fakeService({ detail: noEditsDetail() });
    await mount(service).load("plain");
    expect(root.querySelector(".banner")?.textContent).toBe("nothing to annotate");
    expect(root.querySelectorAll("button.op")).toHaveLength(0);
  });

  it("renders an error panel and no document for a malformed payload", async () => {
    const broken = { ...mariinskyDetail(), operations: "nope" };
    const service = fakeService({ detail: broken });
    await mount(service).load("mariinsky");
    expect(root.querySelector(".error-panel")).not.toBeNull();
    expect(root.querySelector(".error-panel")?.textContent).toContain(
      "operations is not an array",
    );
    expect(root.querySelector(".doc")).toBeNull();
    expect(root.querySelectorAll("button.op")).toHaveLength(0);
  });

  it("groups the 19 categories under the 5 classes with definitions on hover", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");
    const blocks = root.querySelectorAll(".picker fieldset");
    expect(blocks).toHaveLength(5);
    expect(blocks[0]?.querySelector("legend")?.textContent).toBe("[1] Lexical");
    const buttons = root.querySelectorAll(".picker button.category");
    expect(buttons).toHaveLength(19);
    const lexical = root.querySelector('.picker button[data-category="lexical"]');
    expect(lexical?.getAttribute("title")).toContain("definition of lexical");
    expect(lexical?.textContent).toBe("[a] lexical");
  });
});

describe("building and submitting groups", () => {
  it("stages a 2-op lexical group from clicks and posts the exact record", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");

    click(root.querySelector('button[data-op="1"]'));
    click(root.querySelector('button[data-op="2"]'));
    expect(root.querySelectorAll("button.op.selected")).toHaveLength(2);

    click(root.querySelector('button[data-category="lexical"]'));
    const chip = root.querySelector(".group-chip");
    expect(chip?.textContent).toContain("lexical");
    expect(chip?.textContent).toContain("2 ops");
    expect(root.querySelector(".coverage-label")?.getAttribute("data-uncovered")).toBe("0");

    const submit = root.querySelector('button[data-action="submit"]');
    expect(submit?.getAttribute("aria-disabled")).toBe("false");
    click(submit);
    await settle();

    expect(service.posts).toEqual([
      {
        pair_id: "mariinsky",
        annotator_id: "annotator1",
        unaligned_flag: false,
        groups: [{ category: "lexical", op_indices: [1, 2] }],
        if_version: 0,
      },
    ]);
    expect(root.querySelector(".saved")?.textContent).toBe("saved at version 1");
  });

  it("blocks submit client-side while an op is uncovered, highlighting it", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");

    click(root.querySelector('button[data-op="1"]'));
    click(root.querySelector('button[data-category="lexical"]'));

    const submit = root.querySelector('button[data-action="submit"]');
    expect(submit?.getAttribute("aria-disabled")).toBe("true");
    click(submit);
    await settle();

    expect(service.posts).toHaveLength(0); // nothing left the browser
    expect(root.querySelector('button[data-op="2"]')?.classList.contains("uncovered")).toBe(
      true,
    );
    expect(root.querySelector(".messages")?.textContent).toContain("cover ops 2");
  });

  it("flagging unaligned enables submit with zero groups", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");

    click(root.querySelector('button[data-action="toggle-flag"]'));
    const submit = root.querySelector('button[data-action="submit"]');
    expect(submit?.getAttribute("aria-disabled")).toBe("false");
    click(submit);
    await settle();

    expect(service.posts).toEqual([
      {
        pair_id: "mariinsky",
        annotator_id: "annotator1",
        unaligned_flag: true,
        groups: [],
        if_version: 0,
      },
    ]);
  });

  it("surfaces 422 violations inline on the ops they name", async () => {
    const service = fakeService({
      detail: mariinskyDetail(),
      onAnnotation: () => ({
        status: 422,
        json: {
          message: "annotation rejected",
          violations: [
            "group 0: op 2 is a keep, not an edit op",
            "edit ops not covered by any group: 1",
          ],
        },
      }),
    });
    await mount(service).load("mariinsky");

    click(root.querySelector('button[data-op="1"]'));
    click(root.querySelector('button[data-op="2"]'));
    click(root.querySelector('button[data-category="lexical"]'));
    click(root.querySelector('button[data-action="submit"]'));
    await settle();

    const messages = root.querySelectorAll(".messages li");
    expect(messages).toHaveLength(2);
    expect(root.querySelector('button[data-op="2"]')?.classList.contains("violation")).toBe(
      true,
    );
    expect(root.querySelector('button[data-op="1"]')?.classList.contains("violation")).toBe(
      true,
    );
  });

  it("shows a reload prompt on 409 and keeps staged work through the reload", async () => {
    const service = fakeService({
      detail: mariinskyDetail(),
      onAnnotation: () => ({
        status: 409,
        json: { message: "stale if_version; current version is 5", current_version: 5 },
      }),
    });
    await mount(service).load("mariinsky");

    click(root.querySelector('button[data-op="1"]'));
    click(root.querySelector('button[data-op="2"]'));
    click(root.querySelector('button[data-category="lexical"]'));
    click(root.querySelector('button[data-action="submit"]'));
    await settle();

    const conflict = root.querySelector(".conflict");
    expect(conflict?.textContent).toContain("server version 5");

    const fresh: PairDetail = { ...mariinskyDetail(), version: 5 };
    service.setDetail(fresh);
    click(root.querySelector('button[data-action="reload"]'));
    await settle();

    // staged group survived the reload and rebased onto version 5
    expect(root.querySelector(".group-chip")?.textContent).toContain("lexical");
    expect(root.querySelector(".version")?.textContent).toBe("v5");
    expect(root.querySelector(".conflict")).toBeNull();
  });
});

describe("keyboard flow", () => {
  it("digit activates a class, letter stages the category, Escape clears", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    const bench = mount(service);
    await bench.load("mariinsky");

    click(root.querySelector('button[data-op="1"]'));
    click(root.querySelector('button[data-op="2"]'));

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "1", bubbles: true }));
    expect(
      root.querySelector('.picker fieldset[data-class="lexical"]')?.classList.contains("active"),
    ).toBe(true);

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "a", bubbles: true }));
    expect(root.querySelector(".group-chip")?.textContent).toContain("lexical");
    expect(root.querySelectorAll("button.op.selected")).toHaveLength(0);

    click(root.querySelector('button[data-op="1"]'));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "Escape", bubbles: true }));
    expect(root.querySelectorAll("button.op.selected")).toHaveLength(0);
  });

  it("taxonomy order drives the keymap hints", async () => {
    const service = fakeService({ detail: mariinskyDetail() });
    await mount(service).load("mariinsky");
    expect(TAXONOMY[0]?.category).toBe("lexical");
    const semantic = root.querySelector('.picker fieldset[data-class="semantic"] legend');
    expect(semantic?.textContent).toBe("[4] Semantic");
    const example = root.querySelector('.picker button[data-category="elaboration_example"]');
    expect(example?.textContent).toBe("[b] elaboration example");
  });
});
