"""Edit-distance kernels.

Three dynamic programs, all vectorised row-by-row with numpy so that
document-length inputs stay fast:

* classic Levenshtein (substitution allowed) for the matching ratios,
* best-window ("pattern somewhere inside text") Levenshtein for the
  partial ratio,
* the LCS length table used by the indel-only aligner.

The sequential in-row dependency ``D[i][j] <- D[i][j-1] + 1`` is resolved
with the running-minimum identity ``D[i][j] = j + min_{k<=j}(T[k] - k)``
where ``T`` holds the candidates that only look at the previous row; that
turns each row into a handful of whole-array numpy ops.
"""
from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np


def as_codes(seq: str | Sequence[Hashable], table: dict[Hashable, int] | None = None) -> np.ndarray:
    """Encode a string or token sequence as an int array.

    Pass the same ``table`` for two sequences that must share a code space.
    """
    if isinstance(seq, str):
        if table is None:
            return np.frombuffer(seq.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
        return np.array([table.setdefault(c, len(table)) for c in seq], dtype=np.int64)
    if table is None:
        table = {}
    return np.array([table.setdefault(t, len(table)) for t in seq], dtype=np.int64)


def _shared_codes(a, b) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, str) and isinstance(b, str):
        return as_codes(a), as_codes(b)
    table: dict[Hashable, int] = {}
    return as_codes(a, table), as_codes(b, table)


def levenshtein(a: str | Sequence[Hashable], b: str | Sequence[Hashable]) -> int:
    """Classic edit distance: unit-cost insert, delete, substitute."""
    ca, cb = _shared_codes(a, b)
    n, m = len(ca), len(cb)
    if n == 0:
        return m
    if m == 0:
        return n
    if n < m:  # fewer rows is cheaper
        ca, cb, n, m = cb, ca, m, n
    offsets = np.arange(m + 1, dtype=np.int64)
    prev = offsets.copy()
    cand = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cand[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (ca[i - 1] != cb), out=cand[1:])
        prev = np.minimum.accumulate(cand - offsets) + offsets
    return int(prev[m])


def window_cost(pattern: str | Sequence[Hashable], text: str | Sequence[Hashable]) -> int:
    """Minimum Levenshtein distance from ``pattern`` to any contiguous window of ``text``.

    Leading and trailing characters of ``text`` outside the window are free;
    the whole pattern must be consumed. ``window_cost(p, t) <= levenshtein(p, t)``
    always (the full text is one of the windows).
    """
    cp, ct = _shared_codes(pattern, text)
    n, m = len(cp), len(ct)
    if n == 0:
        return 0
    if m == 0:
        return n
    offsets = np.arange(m + 1, dtype=np.int64)
    prev = np.zeros(m + 1, dtype=np.int64)  # empty pattern matches anywhere for free
    cand = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cand[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (cp[i - 1] != ct), out=cand[1:])
        prev = np.minimum.accumulate(cand - offsets) + offsets
    return int(prev.min())


def indel_cost(a: str | Sequence[Hashable], b: str | Sequence[Hashable]) -> int:
    """Edit distance when only insert and delete are allowed (no substitution).

    Equals ``len(a) + len(b) - 2 * lcs(a, b)``.
    """
    ca, cb = _shared_codes(a, b)
    if len(ca) == 0 or len(cb) == 0:
        return len(ca) + len(cb)
    table = lcs_table(ca, cb)
    return len(ca) + len(cb) - 2 * int(table[-1, -1])


def lcs_table(ca: np.ndarray, cb: np.ndarray) -> np.ndarray:
    """Full (n+1) x (m+1) LCS length table for backtracing.

    Row recurrence: with ``T[j] = max(L[i-1][j], L[i-1][j-1] + eq[j])`` the
    row is ``np.maximum.accumulate(T)`` because LCS rows are non-decreasing.
    """
    n, m = len(ca), len(cb)
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(1, n + 1):
        eq = (ca[i - 1] == cb).astype(np.int32)
        cand = np.maximum(table[i - 1, 1:], table[i - 1, :-1] + eq)
        np.maximum.accumulate(cand, out=table[i, 1:])
    return table
