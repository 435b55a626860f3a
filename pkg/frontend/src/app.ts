/** Workbench orchestration: load a pair, stage groups, submit, recover.
 *
 * One annotator per browser session; server-side versioning handles
 * cross-session conflicts. A 409 on submit switches the view into a reload
 * prompt — staged work is already persisted locally, so reloading rebases
 * it onto the fresh server version instead of losing it.
 */

import { ApiClient, ApiError, type FetchLike } from "./api.js";
import { buildKeymap, type Keymap } from "./keyboard.js";
import {
  parseViolationOps,
  renderError,
  renderWorkbench,
  validateDetail,
  type View,
} from "./render.js";
import { WorkbenchState } from "./state.js";
import { clearStaged, loadStaged, saveStaged } from "./storage.js";
import type { PairDetail, TaxonomyEntry } from "./types.js";

export interface WorkbenchConfig {
  apiBase: string;
  annotatorId: string;
  token?: string;
  fetchImpl?: FetchLike;
  storage?: Storage;
}

export class Workbench {
  readonly client: ApiClient;
  private readonly root: HTMLElement;
  private readonly config: WorkbenchConfig;
  private readonly storage: Storage | null;

  private taxonomy: TaxonomyEntry[] = [];
  private keymap: Keymap = buildKeymap([]);
  private detail: PairDetail | null = null;
  state: WorkbenchState | null = null;

  private activeClass: string | null = null;
  private opViolations: Map<number, string[]> = new Map();
  private messages: string[] = [];
  private conflict: number | null = null;
  private savedVersion: number | null = null;
  private highlightUncovered = false;

  private readonly keyListener: (ev: KeyboardEvent) => void;

  constructor(root: HTMLElement, config: WorkbenchConfig) {
    this.root = root;
    this.config = config;
    this.client = new ApiClient(config.apiBase, config.token, config.fetchImpl);
    this.storage = config.storage ?? root.ownerDocument.defaultView?.localStorage ?? null;
    root.addEventListener("click", (ev) => this.handleClick(ev));
    this.keyListener = (ev) => this.handleKey(ev);
    root.ownerDocument.addEventListener("keydown", this.keyListener);
  }

  /** Detach the document-level key listener (for tests and teardown). */
  dispose(): void {
    this.root.ownerDocument.removeEventListener("keydown", this.keyListener);
  }

  async load(pairId: string): Promise<void> {
    if (this.taxonomy.length === 0) {
      this.taxonomy = await this.client.taxonomy();
      this.keymap = buildKeymap(this.taxonomy);
    }
    let payload: unknown;
    try {
      payload = await this.client.getPair(pairId);
    } catch (err) {
      renderError(this.root, [err instanceof Error ? err.message : String(err)]);
      return;
    }
    const problems = validateDetail(payload);
    if (problems.length > 0) {
      renderError(this.root, problems);
      return;
    }
    const detail = payload as PairDetail;
    this.detail = detail;
    const editIndices = detail.operations
      .filter((op) => op.kind !== "keep")
      .map((op) => op.index);
    const state = new WorkbenchState(detail.pair_id, editIndices, detail.version);
    if (this.storage !== null) {
      const staged = loadStaged(this.storage, detail.pair_id);
      if (staged !== null) {
        const dropped = state.restore(staged);
        if (dropped > 0) {
          this.messages = [
            `${dropped} staged group(s) no longer matched the sequence and were dropped`,
          ];
        }
      }
    }
    state.onChange(() => {
      this.highlightUncovered = false;
      if (this.storage !== null) saveStaged(this.storage, state.snapshot());
      this.rerender();
    });
    this.state = state;
    this.conflict = null;
    this.opViolations = new Map();
    this.rerender();
  }

  private view(): View {
    if (this.detail === null || this.state === null) {
      throw new Error("no pair loaded");
    }
    return {
      detail: this.detail,
      taxonomy: this.taxonomy,
      keymap: this.keymap,
      state: this.state,
      annotatorId: this.config.annotatorId,
      activeClass: this.activeClass,
      opViolations: this.opViolations,
      messages: this.messages,
      conflict: this.conflict,
      savedVersion: this.savedVersion,
      highlightUncovered: this.highlightUncovered,
    };
  }

  rerender(): void {
    if (this.detail === null || this.state === null) return;
    renderWorkbench(this.root, this.view());
  }

  // -- actions ------------------------------------------------------------

  private handleClick(ev: Event): void {
    const target = (ev.target as HTMLElement | null)?.closest?.("[data-action]");
    if (!(target instanceof HTMLElement)) return;
    const action = target.dataset.action;
    if (action === "toggle-op") {
      this.state?.toggleSelect(Number(target.dataset.op));
    } else if (action === "stage") {
      this.stage(target.dataset.category ?? "");
    } else if (action === "remove-group") {
      this.state?.removeGroup(Number(target.dataset.group));
    } else if (action === "toggle-flag") {
      this.state?.toggleUnaligned();
    } else if (action === "submit") {
      void this.submit();
    } else if (action === "reload") {
      void this.reload();
    }
  }

  handleKey(ev: KeyboardEvent): void {
    if (this.state === null) return;
    const key = ev.key;
    if (key === "Escape") {
      this.state.clearSelection();
      return;
    }
    if (key === "Enter") {
      void this.submit();
      return;
    }
    if (/^[1-9]$/.test(key)) {
      const cls = this.keymap.classForDigit(key);
      if (cls !== null) {
        this.activeClass = this.activeClass === cls ? null : cls;
        this.rerender();
      }
      return;
    }
    if (/^[a-z]$/i.test(key)) {
      const category = this.keymap.categoryForLetter(this.activeClass, key);
      if (category !== null) this.stage(category);
    }
  }

  private stage(category: string): void {
    if (this.state === null || category === "") return;
    try {
      this.state.stageGroup(category);
      this.messages = [];
    } catch (err) {
      this.messages = [err instanceof Error ? err.message : String(err)];
      this.rerender();
    }
  }

  async submit(): Promise<void> {
    if (this.detail === null || this.state === null) return;
    if (!this.state.canSubmit()) {
      // blocked client-side: nothing is posted, offending ops light up
      this.highlightUncovered = true;
      const uncovered = this.state.uncovered();
      this.messages =
        this.state.flagged && this.state.stagedGroups.length > 0
          ? ["remove staged groups before submitting an unaligned flag"]
          : uncovered.length > 0
            ? [`cover ops ${uncovered.join(", ")} (or mark the pair unaligned)`]
            : ["nothing to submit"];
      this.rerender();
      return;
    }
    const body = {
      ...this.state.payload(this.config.annotatorId),
      if_version: this.state.version,
    };
    try {
      const result = await this.client.submitAnnotation(this.detail.pair_id, body);
      if (this.storage !== null) clearStaged(this.storage, this.detail.pair_id);
      this.savedVersion = result.version;
      this.messages = [];
      this.opViolations = new Map();
      await this.load(this.detail.pair_id);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.conflict = err.currentVersion ?? -1;
      } else if (err instanceof ApiError && err.status === 422) {
        this.messages = err.violations;
        this.opViolations = parseViolationOps(err.violations);
      } else {
        this.messages = [err instanceof Error ? err.message : String(err)];
      }
      this.rerender();
    }
  }

  private async reload(): Promise<void> {
    if (this.detail === null) return;
    this.conflict = null;
    // staged snapshot is already in storage; load() rebases it on the
    // fresh server version
    await this.load(this.detail.pair_id);
  }
}

/** Mount the workbench: pick the pair from ?pair= or the first listed one. */
export async function bootstrap(
  root: HTMLElement,
  config: WorkbenchConfig,
  pairId?: string,
): Promise<Workbench> {
  const bench = new Workbench(root, config);
  let target = pairId;
  if (target === undefined) {
    const list = await bench.client.listPairs({ limit: 1 });
    const first = list.items[0];
    if (first === undefined) {
      renderError(root, ["the service has no pairs to annotate"]);
      return bench;
    }
    target = first.pair_id;
  }
  await bench.load(target);
  return bench;
}
