/** DOM rendering for the workbench. Rebuilds the whole view on each change;
 * event handling is delegated from the root via `data-action` attributes, so
 * listeners survive re-renders.
 */

import type { Keymap } from "./keyboard.js";
import type { WorkbenchState } from "./state.js";
import type { OperationView, PairDetail, TaxonomyEntry } from "./types.js";

export interface View {
  detail: PairDetail;
  taxonomy: TaxonomyEntry[];
  keymap: Keymap;
  state: WorkbenchState;
  annotatorId: string;
  activeClass: string | null;
  /** op index -> validation messages naming it (from a 422 response) */
  opViolations: ReadonlyMap<number, string[]>;
  messages: readonly string[];
  /** server version from a 409; non-null shows the reload prompt */
  conflict: number | null;
  savedVersion: number | null;
  /** set after a blocked submit attempt so uncovered ops light up */
  highlightUncovered: boolean;
}

const CLASS_LABELS: Record<string, string> = {
  lexical: "Lexical",
  syntactic: "Syntactic",
  discourse: "Discourse",
  semantic: "Semantic",
  non_simplification: "Non-simplification",
};

export function classLabel(editClass: string): string {
  return CLASS_LABELS[editClass] ?? editClass;
}

export function categoryLabel(category: string): string {
  return category.replace(/_/g, " ");
}

// -- payload validation -----------------------------------------------------

const OP_KINDS = new Set(["keep", "insert", "delete"]);

/**
 * Structural check of a pair payload before rendering. Returns a list of
 * problems; any problem means the error panel is shown instead of a
 * partially rendered document.
 */
export function validateDetail(data: unknown): string[] {
  const problems: string[] = [];
  if (data === null || typeof data !== "object") {
    return ["payload is not an object"];
  }
  const obj = data as Record<string, unknown>;
  if (typeof obj.pair_id !== "string" || obj.pair_id === "") {
    problems.push("missing pair_id");
  }
  if (typeof obj.version !== "number") {
    problems.push("missing version");
  }
  if (typeof obj.markup !== "string") {
    problems.push("missing markup");
  }
  if (!Array.isArray(obj.operations)) {
    problems.push("operations is not an array");
  } else {
    obj.operations.forEach((op: unknown, i: number) => {
      if (op === null || typeof op !== "object") {
        problems.push(`operation ${i} is not an object`);
        return;
      }
      const o = op as Record<string, unknown>;
      if (o.index !== i) problems.push(`operation ${i} has index ${String(o.index)}`);
      if (typeof o.kind !== "string" || !OP_KINDS.has(o.kind)) {
        problems.push(`operation ${i} has unknown kind ${String(o.kind)}`);
      }
      if (!Array.isArray(o.tokens) || !o.tokens.every((t) => typeof t === "string")) {
        problems.push(`operation ${i} tokens are not strings`);
      }
    });
  }
  if (!Array.isArray(obj.annotations)) {
    problems.push("annotations is not an array");
  }
  return problems;
}

/**
 * Map service validation messages to the op indices they mention, so they
 * can be surfaced inline on the chips. Messages that name no op (or an op
 * outside the sequence) still show in the message panel.
 */
export function parseViolationOps(violations: string[]): Map<number, string[]> {
  const out = new Map<number, string[]>();
  const add = (idx: number, message: string): void => {
    const bucket = out.get(idx);
    if (bucket === undefined) out.set(idx, [message]);
    else bucket.push(message);
  };
  for (const message of violations) {
    const uncovered = message.match(/not covered by any group: ([\d,\s]+)/);
    if (uncovered?.[1] !== undefined) {
      for (const part of uncovered[1].split(",")) {
        const idx = Number.parseInt(part.trim(), 10);
        if (Number.isInteger(idx)) add(idx, message);
      }
      continue;
    }
    for (const match of message.matchAll(/\bop(?: index)? (\d+)/g)) {
      const idx = Number.parseInt(match[1] ?? "", 10);
      if (Number.isInteger(idx)) add(idx, message);
    }
  }
  return out;
}

// -- DOM helpers ------------------------------------------------------------

type Child = Node | string;

function el(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

// -- sections ---------------------------------------------------------------

export function renderError(root: HTMLElement, problems: string[]): void {
  const doc = root.ownerDocument;
  root.replaceChildren(
    el(doc, "div", { class: "error-panel", role: "alert" }, [
      el(doc, "h2", {}, ["Could not load pair"]),
      el(
        doc,
        "ul",
        {},
        problems.map((p) => el(doc, "li", {}, [p])),
      ),
    ]),
  );
}

function opNode(doc: Document, op: OperationView, view: View): HTMLElement {
  const text = op.tokens.join(" ");
  if (op.kind === "keep") {
    return el(doc, "span", { class: "op keep" }, [text]);
  }
  const classes = ["op", op.kind === "insert" ? "ins" : "del"];
  const attrs: Record<string, string> = {
    class: "",
    type: "button",
    "data-action": "toggle-op",
    "data-op": String(op.index),
  };
  if (view.state.isSelected(op.index)) classes.push("selected");
  const nGroups = view.state.groupCountFor(op.index);
  if (nGroups > 0) classes.push("grouped");
  if (view.highlightUncovered && view.state.uncovered().includes(op.index)) {
    classes.push("uncovered");
  }
  const violations = view.opViolations.get(op.index);
  const titleParts: string[] = [
    op.kind === "insert" ? "inserted in the simple version" : "deleted from the complex version",
  ];
  if (violations !== undefined) {
    classes.push("violation");
    titleParts.push(...violations);
  }
  attrs.class = classes.join(" ");
  attrs.title = titleParts.join("\n");
  attrs["aria-pressed"] = view.state.isSelected(op.index) ? "true" : "false";
  const children: Child[] = [text];
  if (nGroups > 0) {
    children.push(el(doc, "sup", { class: "group-count" }, [`×${nGroups}`]));
  }
  return el(doc, "button", attrs, children);
}

function docSection(doc: Document, view: View): HTMLElement {
  const ops = view.detail.operations;
  const section = el(doc, "section", { class: "doc" });
  if (view.state.editIndices.size === 0) {
    section.append(
      el(doc, "div", { class: "banner" }, ["nothing to annotate"]),
    );
  }
  const flow = el(doc, "p", { class: "flow" });
  ops.forEach((op, i) => {
    if (i > 0) flow.append(" ");
    flow.append(opNode(doc, op, view));
  });
  section.append(flow);
  return section;
}

function coverageSection(doc: Document, view: View): HTMLElement {
  const uncovered = view.state.uncovered();
  const total = view.state.editIndices.size;
  const label =
    total === 0
      ? "no edit operations"
      : uncovered.length === 0
        ? `all ${total} edit ops covered`
        : `${uncovered.length} of ${total} edit ops uncovered`;
  const children: Child[] = [
    el(doc, "span", { class: "coverage-label", "data-uncovered": String(uncovered.length) }, [
      label,
    ]),
  ];
  if (uncovered.length > 0) {
    children.push(
      el(doc, "span", { class: "coverage-ops" }, [
        ` (ops ${uncovered.join(", ")})`,
      ]),
    );
  }
  return el(doc, "section", { class: "coverage" }, children);
}

function groupsSection(doc: Document, view: View): HTMLElement {
  const section = el(doc, "section", { class: "groups" });
  section.append(el(doc, "h2", {}, ["Staged groups"]));
  if (view.state.stagedGroups.length === 0) {
    section.append(el(doc, "p", { class: "empty" }, ["none yet"]));
    return section;
  }
  const list = el(doc, "ul");
  view.state.stagedGroups.forEach((group, i) => {
    list.append(
      el(doc, "li", { class: "group-chip", "data-category": group.category }, [
        el(doc, "span", { class: "group-cat" }, [categoryLabel(group.category)]),
        el(doc, "span", { class: "group-size" }, [
          ` ${group.opIndices.length} op${group.opIndices.length === 1 ? "" : "s"}`,
        ]),
        el(doc, "span", { class: "group-ops" }, [` [${group.opIndices.join(", ")}]`]),
        el(
          doc,
          "button",
          {
            type: "button",
            class: "remove",
            "data-action": "remove-group",
            "data-group": String(i),
            "aria-label": `remove group ${i}`,
          },
          ["✕"],
        ),
      ]),
    );
  });
  section.append(list);
  return section;
}

function pickerSection(doc: Document, view: View): HTMLElement {
  const section = el(doc, "section", { class: "picker" });
  section.append(el(doc, "h2", {}, ["Assign a category"]));
  for (const editClass of view.keymap.classOrder) {
    const entries = view.keymap.byClass.get(editClass) ?? [];
    const digit = view.keymap.digitFor(editClass);
    const fieldset = el(doc, "fieldset", {
      class: `class-block${view.activeClass === editClass ? " active" : ""}`,
      "data-class": editClass,
    });
    fieldset.append(
      el(doc, "legend", {}, [
        digit === null ? classLabel(editClass) : `[${digit}] ${classLabel(editClass)}`,
      ]),
    );
    for (const entry of entries) {
      const letter = view.keymap.letterFor(entry.category);
      fieldset.append(
        el(
          doc,
          "button",
          {
            type: "button",
            class: "category",
            "data-action": "stage",
            "data-category": entry.category,
            title: `${entry.definition}\nExample: ${entry.example}`,
          },
          [letter === null ? categoryLabel(entry.category) : `[${letter}] ${categoryLabel(entry.category)}`],
        ),
      );
    }
    section.append(fieldset);
  }
  return section;
}

function footerSection(doc: Document, view: View): HTMLElement {
  const submittable = view.state.canSubmit();
  const footer = el(doc, "footer", { class: "actions" });
  const flagLabel = view.state.flagged ? "Unflag pair" : "Mark pair unaligned";
  footer.append(
    el(
      doc,
      "button",
      { type: "button", class: "flag", "data-action": "toggle-flag" },
      [flagLabel],
    ),
  );
  footer.append(
    el(
      doc,
      "button",
      {
        type: "button",
        class: `submit${submittable ? "" : " disabled"}`,
        "data-action": "submit",
        "aria-disabled": submittable ? "false" : "true",
      },
      ["Submit annotation"],
    ),
  );
  if (view.savedVersion !== null) {
    footer.append(
      el(doc, "span", { class: "saved" }, [`saved at version ${view.savedVersion}`]),
    );
  }
  return footer;
}

function messagesSection(doc: Document, view: View): HTMLElement | null {
  if (view.conflict !== null) {
    return el(doc, "section", { class: "conflict", role: "alert" }, [
      el(doc, "p", {}, [
        `Someone else updated this pair (server version ${view.conflict}). ` +
          "Reload to continue; your staged groups are kept locally.",
      ]),
      el(
        doc,
        "button",
        { type: "button", class: "reload", "data-action": "reload" },
        ["Reload pair"],
      ),
    ]);
  }
  if (view.messages.length === 0) return null;
  return el(
    doc,
    "section",
    { class: "messages", role: "alert" },
    [
      el(
        doc,
        "ul",
        {},
        view.messages.map((m) => el(doc, "li", {}, [m])),
      ),
    ],
  );
}

function annotationsSection(doc: Document, view: View): HTMLElement | null {
  const done = view.detail.annotations;
  if (done.length === 0) return null;
  const section = el(doc, "section", { class: "existing" });
  section.append(el(doc, "h2", {}, ["Submitted annotations"]));
  const list = el(doc, "ul");
  for (const record of done) {
    const summary = record.unaligned_flag
      ? "flagged unaligned"
      : record.groups
          .map((g) => `${categoryLabel(g.category)} [${g.op_indices.join(", ")}]`)
          .join("; ");
    list.append(
      el(doc, "li", { "data-annotator": record.annotator_id }, [
        el(doc, "strong", {}, [record.annotator_id]),
        `: ${summary || "empty"}`,
      ]),
    );
  }
  section.append(list);
  return section;
}

export function renderWorkbench(root: HTMLElement, view: View): void {
  const doc = root.ownerDocument;
  const header = el(doc, "header", { class: "pair-head" }, [
    el(doc, "h1", {}, [view.detail.pair_id]),
    el(doc, "span", { class: `status status-${view.detail.status}` }, [
      view.detail.status,
    ]),
    el(doc, "span", { class: "version" }, [`v${view.detail.version}`]),
    el(doc, "span", { class: "annotator" }, [`annotating as ${view.annotatorId}`]),
  ]);
  const parts: (HTMLElement | null)[] = [
    header,
    docSection(doc, view),
    coverageSection(doc, view),
    groupsSection(doc, view),
    pickerSection(doc, view),
    footerSection(doc, view),
    messagesSection(doc, view),
    annotationsSection(doc, view),
  ];
  root.replaceChildren(...parts.filter((p): p is HTMLElement => p !== null));
}
