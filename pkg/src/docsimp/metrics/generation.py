"""Generation-quality metrics for end-to-end simplification output.

The SARI implementation follows one fixed set of conventions (documented on
:func:`sari`) rather than reproducing any particular historical script;
together with the pinned tokenizer this makes scores comparable across runs
of this toolkit.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core import EditCategory
from ..align import tokenize
from .textstats import compression_ratio, fkgl


def _grams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _scale(counter: Counter, factor: int) -> Counter:
    return Counter({g: c * factor for g, c in counter.items()})


def _minus(a: Counter, b: Counter) -> Counter:
    out = Counter()
    for g, c in a.items():
        d = c - b.get(g, 0)
        if d > 0:
            out[g] = d
    return out


def _intersect(a: Counter, b: Counter) -> Counter:
    return Counter({g: min(c, b[g]) for g, c in a.items() if g in b})


def _component_f1(cand: Counter, ref: Counter) -> float:
    """F1 of a multiset component; vacuously 1.0 when both sides are empty."""
    n_cand, n_ref = sum(cand.values()), sum(ref.values())
    if n_cand == 0 and n_ref == 0:
        return 1.0
    correct = sum(_intersect(cand, ref).values())
    p = correct / n_cand if n_cand else 0.0
    r = correct / n_ref if n_ref else 0.0
    return 2 * p * r / (p + r) if p + r else 0.0


def _component_precision(cand: Counter, ref: Counter) -> float:
    n_cand, n_ref = sum(cand.values()), sum(ref.values())
    if n_cand == 0 and n_ref == 0:
        return 1.0
    if n_cand == 0:
        return 0.0
    return sum(_intersect(cand, ref).values()) / n_cand


def sari(source: str, candidate: str, references: Sequence[str], max_n: int = 4) -> float:
    """SARI score of one candidate simplification, 0-100.

    Conventions: shared tokenizer, lowercased tokens, n = 1..4 averaged
    uniformly; keep and add components use F1, the delete component uses
    precision only; counts are multisets with source/candidate counts scaled
    by the number of references; a component whose candidate and reference
    sides are both empty is vacuously correct (1.0). A perfect copy of the
    sole reference therefore scores 100.
    """
    if not references:
        raise ValueError("sari needs at least one reference")
    src = [t.surface.lower() for t in tokenize(source)]
    cand = [t.surface.lower() for t in tokenize(candidate)]
    refs = [[t.surface.lower() for t in tokenize(r)] for r in references]
    n_refs = len(refs)

    total = 0.0
    for n in range(1, max_n + 1):
        s = _scale(_grams(src, n), n_refs)
        c = _scale(_grams(cand, n), n_refs)
        r = Counter()
        for ref in refs:
            r.update(_grams(ref, n))

        keep_cand = _intersect(s, c)
        keep_ref = _intersect(s, r)
        f_keep = _component_f1(keep_cand, keep_ref)

        add_cand = _minus(c, s)
        add_ref = _minus(r, s)
        f_add = _component_f1(add_cand, add_ref)

        del_cand = _minus(s, c)
        del_ref = _minus(s, r)
        p_del = _component_precision(del_cand, del_ref)

        total += (f_keep + f_add + p_del) / 3.0
    return 100.0 * total / max_n


@dataclass(frozen=True, slots=True)
class GenerationReport:
    """Corpus-level generation metrics plus an optional edit profile."""

    n_docs: int
    sari_mean: float
    fkgl_mean: float | None
    compression_mean: float
    n_fkgl_skipped: int
    category_distribution: Mapping[EditCategory, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_docs": self.n_docs,
            "sari_mean": self.sari_mean,
            "fkgl_mean": self.fkgl_mean,
            "compression_mean": self.compression_mean,
            "n_fkgl_skipped": self.n_fkgl_skipped,
            "category_distribution": {
                k.value: v for k, v in self.category_distribution.items()
            },
        }


def build_generation_report(
    docs: Sequence[tuple[str, str, Sequence[str]]],
    category_counts: Mapping[EditCategory, int] | None = None,
) -> GenerationReport:
    """Average SARI/FKGL/compression over (source, candidate, references) docs.

    Candidates without any words are skipped for FKGL (counted). When
    ``category_counts`` from a silver tagging of the candidates is given,
    it is normalised into a percentage distribution.
    """
    if not docs:
        raise ValueError("no documents to score")
    saris, fkgls, compressions = [], [], []
    skipped = 0
    for source, candidate, references in docs:
        saris.append(sari(source, candidate, references))
        compressions.append(compression_ratio(source, candidate))
        try:
            fkgls.append(fkgl(candidate))
        except ValueError:
            skipped += 1
    dist: dict[EditCategory, float] = {}
    if category_counts:
        total = sum(category_counts.values())
        if total:
            dist = {
                cat: 100.0 * category_counts.get(cat, 0) / total
                for cat in EditCategory
                if category_counts.get(cat, 0)
            }
    return GenerationReport(
        n_docs=len(docs),
        sari_mean=sum(saris) / len(saris),
        fkgl_mean=sum(fkgls) / len(fkgls) if fkgls else None,
        compression_mean=sum(compressions) / len(compressions),
        n_fkgl_skipped=skipped,
        category_distribution=dist,
    )
