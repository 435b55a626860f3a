/** Local persistence of staged (unsubmitted) work, keyed per pair.
 *
 * Staged state must survive a page reload until the submit succeeds; after
 * that it is cleared. All failures (quota, disabled storage) are swallowed —
 * persistence is best-effort and never blocks annotating.
 */

import type { StagedSnapshot } from "./state.js";

const keyFor = (pairId: string): string => `docsimp.staged.${pairId}`;

export function saveStaged(storage: Storage, snapshot: StagedSnapshot): void {
  try {
    storage.setItem(keyFor(snapshot.pairId), JSON.stringify(snapshot));
  } catch {
    // best effort
  }
}

export function loadStaged(storage: Storage, pairId: string): StagedSnapshot | null {
  let raw: string | null = null;
  try {
    raw = storage.getItem(keyFor(pairId));
  } catch {
    return null;
  }
  if (raw === null) return null;
  try {
    const data = JSON.parse(raw) as StagedSnapshot;
    if (
      typeof data !== "object" ||
      data === null ||
      data.pairId !== pairId ||
      !Array.isArray(data.groups) ||
      !Array.isArray(data.selected)
    ) {
      return null;
    }
    return data;
  } catch {
    return null;
  }
}

export function clearStaged(storage: Storage, pairId: string): void {
  try {
    storage.removeItem(keyFor(pairId));
  } catch {
    // best effort
  }
}
