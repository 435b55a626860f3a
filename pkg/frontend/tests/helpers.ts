/** Shared fixtures and a scriptable fake service for the UI tests. */

import type { FetchLike } from "../src/api.js";
import type { PairDetail, TaxonomyEntry } from "../src/types.js";

type Tax = [category: string, editClass: string];

const ENTRIES: Tax[] = [
  ["lexical", "lexical"],
  ["lexical_entity", "lexical"],
  ["sentence_split", "syntactic"],
  ["sentence_fusion", "syntactic"],
  ["syntactic_deletion", "syntactic"],
  ["syntactic_generic", "syntactic"],
  ["reordering", "discourse"],
  ["anaphora_resolution", "discourse"],
  ["anaphora_insertion", "discourse"],
  ["elaboration_background", "semantic"],
  ["elaboration_example", "semantic"],
  ["elaboration_generic", "semantic"],
  ["semantic_deletion", "semantic"],
  ["specific_to_general", "semantic"],
  ["format", "non_simplification"],
  ["noise_deletion", "non_simplification"],
  ["fact_correction", "non_simplification"],
  ["extraneous_information", "non_simplification"],
  ["miscellaneous", "non_simplification"],
];

export const TAXONOMY: TaxonomyEntry[] = ENTRIES.map(([category, edit_class]) => ({
  category,
  edit_class,
  definition: `definition of ${category}`,
  example: `example of ${category}`,
}));

export const MARIINSKY_MARKUP =
  "The Mariinsky Theatre is a <INS>very famous</INS> <DEL>historic</DEL> " +
  "theater of opera and ballet in Saint Petersburg .";

export function mariinskyDetail(): PairDetail {
  return {
    pair_id: "mariinsky",
    status: "unassigned",
    assigned_to: [],
    annotators_done: [],
    version: 0,
    markup: MARIINSKY_MARKUP,
    operations: [
      {
        index: 0,
        kind: "keep",
        tokens: ["The", "Mariinsky", "Theatre", "is", "a"],
      },
      { index: 1, kind: "insert", tokens: ["very", "famous"] },
      { index: 2, kind: "delete", tokens: ["historic"] },
      {
        index: 3,
        kind: "keep",
        tokens: ["theater", "of", "opera", "and", "ballet", "in", "Saint", "Petersburg", "."],
      },
    ],
    annotations: [],
  };
}

export function noEditsDetail(): PairDetail {
  return {
    pair_id: "plain",
    status: "unassigned",
    assigned_to: [],
    annotators_done: [],
    version: 0,
    markup: "Nothing changed here .",
    operations: [{ index: 0, kind: "keep", tokens: ["Nothing", "changed", "here", "."] }],
    annotations: [],
  };
}

export interface FakeService {
  fetch: FetchLike;
  /** bodies of every POST .../annotation observed, in order */
  posts: unknown[];
  /** swap in a new detail payload for subsequent GETs */
  setDetail(detail: unknown): void;
}

export interface FakeServiceOptions {
  detail: unknown;
  /** respond to an annotation POST; default accepts and echoes the record */
  onAnnotation?(body: Record<string, unknown>): { status: number; json: unknown };
}

function jsonResponse(status: number, json: unknown): Response {
  return new Response(JSON.stringify(json), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function fakeService(options: FakeServiceOptions): FakeService {
  let detail = options.detail;
  const posts: unknown[] = [];
  const onAnnotation =
    options.onAnnotation ??
    ((body: Record<string, unknown>) => ({
      status: 200,
      json: {
        pair_id: body.pair_id,
        version: ((detail as PairDetail).version ?? 0) + 1,
        status: "complete",
        record: body,
      },
    }));

  const impl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://fake.test");
    const path = url.pathname;
    const method = init?.method ?? "GET";
    if (method === "GET" && path === "/api/taxonomy") {
      return jsonResponse(200, TAXONOMY);
    }
    if (method === "GET" && path === "/api/pairs") {
      const d = detail as PairDetail;
      return jsonResponse(200, { total: 1, offset: 0, limit: 50, items: [d] });
    }
    if (method === "GET" && /^\/api\/pairs\/[^/]+$/.test(path)) {
      return jsonResponse(200, detail);
    }
    if (method === "POST" && /^\/api\/pairs\/[^/]+\/annotation$/.test(path)) {
      const body = JSON.parse(String(init?.body ?? "{}")) as Record<string, unknown>;
      posts.push(body);
      const reply = onAnnotation(body);
      if (reply.status >= 400) {
        return jsonResponse(reply.status, { detail: reply.json });
      }
      return jsonResponse(reply.status, reply.json);
    }
    return jsonResponse(404, { detail: `no route ${method} ${path}` });
  };

  return {
    fetch: impl,
    posts,
    setDetail(d) {
      detail = d;
    },
  };
}

export function click(element: Element | null): void {
  if (element === null) throw new Error("click target not found");
  (element as HTMLElement).dispatchEvent(
    new MouseEvent("click", { bubbles: true, cancelable: true }),
  );
}

/** Wait until queued microtasks (async click handlers) settle. */
export async function settle(): Promise<void> {
  for (let i = 0; i < 10; i += 1) {
    await Promise.resolve();
  }
  await new Promise((resolve) => setTimeout(resolve, 0));
}
