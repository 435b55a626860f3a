/** Keyboard-first category picking.
 *
 * Number keys 1-5 activate one of the five edit classes; letter keys pick a
 * category inside the active class and stage the current selection as a
 * group of that category. Layout is derived from the taxonomy payload, so
 * the hints shown always match what the server will accept.
 */

import type { TaxonomyEntry } from "./types.js";

export interface Keymap {
  /** Edit classes in first-appearance order of the taxonomy. */
  classOrder: string[];
  byClass: Map<string, TaxonomyEntry[]>;
  classForDigit(digit: string): string | null;
  categoryForLetter(editClass: string | null, letter: string): string | null;
  digitFor(editClass: string): string | null;
  letterFor(category: string): string | null;
}

const LETTERS = "abcdefghijklmnopqrstuvwxyz";

export function buildKeymap(taxonomy: TaxonomyEntry[]): Keymap {
  const classOrder: string[] = [];
  const byClass = new Map<string, TaxonomyEntry[]>();
  for (const entry of taxonomy) {
    let bucket = byClass.get(entry.edit_class);
    if (bucket === undefined) {
      bucket = [];
      byClass.set(entry.edit_class, bucket);
      classOrder.push(entry.edit_class);
    }
    bucket.push(entry);
  }

  const letterByCategory = new Map<string, string>();
  for (const entries of byClass.values()) {
    entries.forEach((entry, i) => {
      const letter = LETTERS[i];
      if (letter !== undefined) letterByCategory.set(entry.category, letter);
    });
  }

  return {
    classOrder,
    byClass,
    classForDigit(digit) {
      const n = Number.parseInt(digit, 10);
      if (!Number.isInteger(n) || n < 1 || n > classOrder.length) return null;
      return classOrder[n - 1] ?? null;
    },
    categoryForLetter(editClass, letter) {
      if (editClass === null) return null;
      const entries = byClass.get(editClass);
      if (entries === undefined) return null;
      const pos = LETTERS.indexOf(letter.toLowerCase());
      if (pos < 0 || pos >= entries.length) return null;
      return entries[pos]?.category ?? null;
    },
    digitFor(editClass) {
      const pos = classOrder.indexOf(editClass);
      return pos >= 0 ? String(pos + 1) : null;
    },
    letterFor(category) {
      return letterByCategory.get(category) ?? null;
    },
  };
}
