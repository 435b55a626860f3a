/** Staged annotation state for one pair. Pure data, no DOM.
 *
 * Invariant held throughout: every staged group's op indices are a subset of
 * the sequence's edit-op indices. The UI can therefore never post an
 * annotation that references a keep op or an out-of-range op.
 */

export interface StagedGroup {
  category: string;
  opIndices: number[]; // sorted ascending
}

export interface StagedSnapshot {
  pairId: string;
  version: number;
  selected: number[];
  groups: StagedGroup[];
  unalignedFlag: boolean;
}

export interface AnnotationPayload {
  pair_id: string;
  annotator_id: string;
  unaligned_flag: boolean;
  groups: { category: string; op_indices: number[] }[];
}

export class WorkbenchState {
  readonly pairId: string;
  readonly editIndices: ReadonlySet<number>;
  /** Server version the staged work is based on (sent as if_version). */
  version: number;

  private selected = new Set<number>();
  private groups: StagedGroup[] = [];
  private unalignedFlag = false;
  private listeners: (() => void)[] = [];

  constructor(pairId: string, editIndices: Iterable<number>, version: number) {
    this.pairId = pairId;
    this.editIndices = new Set(editIndices);
    this.version = version;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  // -- selection ----------------------------------------------------------

  get selectedOps(): number[] {
    return [...this.selected].sort((a, b) => a - b);
  }

  isSelected(opIndex: number): boolean {
    return this.selected.has(opIndex);
  }

  /** Toggle an op in the current selection. Keep ops are not selectable. */
  toggleSelect(opIndex: number): boolean {
    if (!this.editIndices.has(opIndex)) return false;
    if (this.selected.has(opIndex)) this.selected.delete(opIndex);
    else this.selected.add(opIndex);
    this.emit();
    return true;
  }

  clearSelection(): void {
    if (this.selected.size === 0) return;
    this.selected.clear();
    this.emit();
  }

  // -- groups -------------------------------------------------------------

  get stagedGroups(): readonly StagedGroup[] {
    return this.groups;
  }

  /**
   * Turn the current selection into a staged group with `category`.
   * Groups may overlap freely. Throws if nothing is selected.
   */
  stageGroup(category: string): StagedGroup {
    if (this.selected.size === 0) {
      throw new Error("select at least one edit operation first");
    }
    for (const idx of this.selected) {
      if (!this.editIndices.has(idx)) {
        throw new Error(`op ${idx} is not an edit operation`);
      }
    }
    const group: StagedGroup = { category, opIndices: this.selectedOps };
    this.groups.push(group);
    this.selected.clear();
    this.emit();
    return group;
  }

  removeGroup(index: number): void {
    if (index < 0 || index >= this.groups.length) return;
    this.groups.splice(index, 1);
    this.emit();
  }

  /** How many staged groups contain this op (overlap shows as >1). */
  groupCountFor(opIndex: number): number {
    let n = 0;
    for (const group of this.groups) {
      if (group.opIndices.includes(opIndex)) n += 1;
    }
    return n;
  }

  // -- flag ---------------------------------------------------------------

  get flagged(): boolean {
    return this.unalignedFlag;
  }

  toggleUnaligned(): void {
    this.unalignedFlag = !this.unalignedFlag;
    this.emit();
  }

  // -- coverage / submit --------------------------------------------------

  /** Edit ops not yet covered by any staged group, sorted. */
  uncovered(): number[] {
    const covered = new Set<number>();
    for (const group of this.groups) {
      for (const idx of group.opIndices) covered.add(idx);
    }
    return [...this.editIndices].filter((i) => !covered.has(i)).sort((a, b) => a - b);
  }

  get complete(): boolean {
    return this.uncovered().length === 0;
  }

  /**
   * Submittable when either the pair is flagged unaligned (with no staged
   * groups — the service rejects flag+groups), or it has edit ops and every
   * one of them is covered.
   */
  canSubmit(): boolean {
    if (this.unalignedFlag) return this.groups.length === 0;
    return this.editIndices.size > 0 && this.complete;
  }

  payload(annotatorId: string): AnnotationPayload {
    return {
      pair_id: this.pairId,
      annotator_id: annotatorId,
      unaligned_flag: this.unalignedFlag,
      groups: this.groups.map((g) => ({
        category: g.category,
        op_indices: [...g.opIndices],
      })),
    };
  }

  // -- persistence --------------------------------------------------------

  snapshot(): StagedSnapshot {
    return {
      pairId: this.pairId,
      version: this.version,
      selected: this.selectedOps,
      groups: this.groups.map((g) => ({ ...g, opIndices: [...g.opIndices] })),
      unalignedFlag: this.unalignedFlag,
    };
  }

  /**
   * Restore staged work from a snapshot. Groups or selections referencing
   * ops that are no longer edit ops of the served sequence are dropped
   * whole (a trimmed group would misstate what the annotator chose).
   * Returns the number of groups dropped.
   */
  restore(snapshot: StagedSnapshot): number {
    if (snapshot.pairId !== this.pairId) return 0;
    let dropped = 0;
    this.groups = [];
    for (const group of snapshot.groups) {
      if (group.opIndices.every((i) => this.editIndices.has(i))) {
        this.groups.push({
          category: group.category,
          opIndices: [...group.opIndices].sort((a, b) => a - b),
        });
      } else {
        dropped += 1;
      }
    }
    this.selected = new Set(snapshot.selected.filter((i) => this.editIndices.has(i)));
    this.unalignedFlag = snapshot.unalignedFlag;
    this.emit();
    return dropped;
  }
}
