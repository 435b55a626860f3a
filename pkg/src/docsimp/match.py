"""Mining aligned revision pairs from parallel wiki revision histories.

A scorer maps a (simple-wiki revision, complex-wiki revision) candidate to a
similarity score; a calibrated threshold turns scores into aligned /
unaligned decisions; :func:`match_revisions` then walks the simple-side
history chronologically, picks each revision's best complex-side partner,
and suppresses near-duplicate simple revisions so one page contributes
distinct pairs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .core import DocumentRevision
from .distance import levenshtein, window_cost

logger = logging.getLogger(__name__)

#: A scorer takes (sew_rev, ew_rev) and returns a similarity score.
Scorer = Callable[[DocumentRevision, DocumentRevision], float]


class CalibrationError(ValueError):
    """Raised when threshold calibration is impossible (one-class labels)."""


class UnknownPairError(KeyError):
    """An external score file has no entry for a requested revision pair."""


@dataclass(frozen=True, slots=True)
class ScoredPair:
    """One scored (and possibly labeled) candidate revision pair."""

    sew_rev: DocumentRevision
    ew_rev: DocumentRevision
    scorer_id: str
    score: float
    label: str | None = None  # "aligned" | "unaligned" | None

    def __post_init__(self) -> None:
        if self.label not in (None, "aligned", "unaligned"):
            raise ValueError(f"label must be 'aligned', 'unaligned' or None, got {self.label!r}")


@dataclass(frozen=True, slots=True)
class MatcherConfig:
    scorer_id: str = "levenshtein"
    threshold: float = 0.5
    dedup_similarity_max: float = 0.3


def revision_pair_id(sew_rev: DocumentRevision, ew_rev: DocumentRevision) -> str:
    """Stable identifier for a candidate pair, used by external score files."""
    return f"{sew_rev.page_id}:{sew_rev.revision_id}--{ew_rev.page_id}:{ew_rev.revision_id}"


# ---------------------------------------------------------------------------
# scorers

def levenshtein_ratio(a: str, b: str) -> float:
    """1 - dist/max(len): 1.0 for identical strings (and two empties)."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def partial_levenshtein_ratio(a: str, b: str) -> float:
    """Best-window similarity: how well does one string sit inside the other.

    The cost is the smaller of aligning ``a`` against the best contiguous
    window of ``b`` and vice versa; the denominator is the shorter length,
    and the result is clamped to [0, 1]. Either side empty scores 1.0 (the
    empty string is a perfect window). Symmetric by construction.
    """
    if not a or not b:
        return 1.0
    cost = min(window_cost(a, b), window_cost(b, a))
    ratio = 1.0 - cost / min(len(a), len(b))
    return max(0.0, min(1.0, ratio))


def default_entity_extractor(text: str) -> frozenset[str]:
    """Cheap entity heuristic: maximal runs of capitalised tokens, skipping
    sentence-initial words, lowercased. Swap in a real NER for serious use.
    """
    from .align import tokenize  # local import: align depends on nothing here

    entities: set[str] = set()
    run: list[str] = []
    sentence_start = True
    for tok in tokenize(text):
        if tok.is_punct:
            if run:
                entities.add(" ".join(run).lower())
                run = []
            if tok.surface and tok.surface[0] in ".!?":
                sentence_start = True
            continue
        capitalised = tok.surface[0].isupper()
        if capitalised and not sentence_start:
            run.append(tok.surface)
        else:
            if run:
                entities.add(" ".join(run).lower())
                run = []
        sentence_start = False
    if run:
        entities.add(" ".join(run).lower())
    return frozenset(entities)


def entity_overlap(
    a: str,
    b: str,
    extractor: Callable[[str], frozenset[str]] = default_entity_extractor,
) -> float:
    """Jaccard overlap of the two texts' entity sets; 1.0 when both are empty."""
    ea, eb = extractor(a), extractor(b)
    if not ea and not eb:
        return 1.0
    return len(ea & eb) / len(ea | eb)


def delta_publish(sew_rev: DocumentRevision, ew_rev: DocumentRevision) -> float:
    """Negated absolute publication-time gap in seconds (0 is best)."""
    return -abs((sew_rev.timestamp - ew_rev.timestamp).total_seconds())


def majority_scorer(sew_rev: DocumentRevision, ew_rev: DocumentRevision) -> float:
    """Constant 1.0: the always-aligned baseline."""
    return 1.0


def _text_scorer(fn: Callable[[str, str], float]) -> Scorer:
    def scorer(sew_rev: DocumentRevision, ew_rev: DocumentRevision) -> float:
        return fn(sew_rev.text, ew_rev.text)

    return scorer


SCORERS: dict[str, Scorer] = {
    "majority": majority_scorer,
    "delta_publish": delta_publish,
    "levenshtein": _text_scorer(levenshtein_ratio),
    "partial_levenshtein": _text_scorer(partial_levenshtein_ratio),
    "entity_overlap": _text_scorer(entity_overlap),
}


class ExternalScorer:
    """Scores looked up from a pre-computed ``pair_id -> score`` mapping."""

    def __init__(self, scores: Mapping[str, float], scorer_id: str = "external"):
        self.scores = dict(scores)
        self.scorer_id = scorer_id

    def __call__(self, sew_rev: DocumentRevision, ew_rev: DocumentRevision) -> float:
        key = revision_pair_id(sew_rev, ew_rev)
        try:
            return self.scores[key]
        except KeyError:
            raise UnknownPairError(f"no external score for pair {key}") from None


def resolve_scorer(scorer_id: str, external: Mapping[str, float] | None = None) -> Scorer:
    if scorer_id == "external":
        if external is None:
            raise ValueError("scorer 'external' needs a score mapping")
        return ExternalScorer(external)
    try:
        return SCORERS[scorer_id]
    except KeyError:
        raise ValueError(
            f"unknown scorer {scorer_id!r}; known: {', '.join(sorted(SCORERS))}, external"
        ) from None


# ---------------------------------------------------------------------------
# calibration

def _confusion(scored: Sequence[tuple[float, str]], threshold: float) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for score, label in scored:
        predicted = score >= threshold
        if predicted and label == "aligned":
            tp += 1
        elif predicted:
            fp += 1
        elif label == "aligned":
            fn += 1
    return tp, fp, fn


def precision_recall_f1(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return precision, recall, f1


def evaluate_at_threshold(scored: Iterable[ScoredPair], threshold: float) -> tuple[float, float, float]:
    """(precision, recall, F1) of the aligned class at a fixed threshold."""
    labeled = [(p.score, p.label) for p in scored if p.label is not None]
    return precision_recall_f1(*_confusion(labeled, threshold))


def calibrate_threshold(scored: Iterable[ScoredPair]) -> float:
    """Threshold maximising aligned-class F1 over the labeled pairs.

    Candidates are midpoints between adjacent distinct scores plus the two
    infinities; F1 ties resolve toward the lower threshold (higher recall).
    Comparisons use exact integer arithmetic, so the result is reproducible
    bit-for-bit. Raises :class:`CalibrationError` unless both labels occur.
    """
    labeled = [(p.score, p.label) for p in scored if p.label is not None]
    labels = {label for _, label in labeled}
    if "aligned" not in labels or "unaligned" not in labels:
        raise CalibrationError("calibration needs at least one aligned and one unaligned pair")
    distinct = sorted({score for score, _ in labeled})
    candidates = [float("-inf")]
    candidates += [(lo + hi) / 2.0 for lo, hi in zip(distinct, distinct[1:])]
    candidates.append(float("inf"))
    best_t = None
    best_num = best_den = 0  # F1 = num/den compared by cross-multiplication
    for t in candidates:
        tp, fp, fn = _confusion(labeled, t)
        num, den = 2 * tp, 2 * tp + fp + fn
        if best_t is None or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    assert best_t is not None
    return best_t


# ---------------------------------------------------------------------------
# matching

def match_revisions(
    sew_revs: Sequence[DocumentRevision],
    ew_revs: Sequence[DocumentRevision],
    config: MatcherConfig,
    scorer: Scorer | None = None,
) -> list[ScoredPair]:
    """Pick aligned (simple, complex) revision pairs for one page pair.

    Walks simple-wiki revisions in the given (chronological) order. Each
    takes the highest-scoring complex revision (earliest on ties); the pair
    is accepted only if the score clears the threshold, the complex revision
    is still unused, and the simple text is sufficiently different
    (character-level similarity <= ``dedup_similarity_max``) from every
    already-accepted simple text. Candidates failing any check are dropped,
    not reassigned.
    """
    scorer = scorer or resolve_scorer(config.scorer_id)
    accepted: list[ScoredPair] = []
    used_ew: set[tuple[int, int]] = set()
    kept_texts: list[str] = []
    for sew in sew_revs:
        if not ew_revs:
            break
        best_score = None
        best_ew = None
        for ew in ew_revs:
            s = scorer(sew, ew)
            if best_score is None or s > best_score:
                best_score, best_ew = s, ew
        assert best_ew is not None and best_score is not None
        if best_score < config.threshold:
            continue
        key = (best_ew.page_id, best_ew.revision_id)
        if key in used_ew:
            logger.debug("dropping sew %s: best ew %s already used", sew.revision_id, key)
            continue
        if any(
            levenshtein_ratio(sew.text, prev) > config.dedup_similarity_max
            for prev in kept_texts
        ):
            logger.debug("dropping sew %s: near-duplicate of an accepted revision", sew.revision_id)
            continue
        used_ew.add(key)
        kept_texts.append(sew.text)
        accepted.append(
            ScoredPair(
                sew_rev=sew,
                ew_rev=best_ew,
                scorer_id=config.scorer_id,
                score=best_score,
                label=None,
            )
        )
    return accepted


def score_pairs(
    sew_revs: Sequence[DocumentRevision],
    ew_revs: Sequence[DocumentRevision],
    scorer_id: str,
    labels: Mapping[str, str] | None = None,
    external: Mapping[str, float] | None = None,
) -> list[ScoredPair]:
    """Score the full cross product, attaching labels where provided."""
    scorer = resolve_scorer(scorer_id, external)
    labels = labels or {}
    out: list[ScoredPair] = []
    for sew in sew_revs:
        for ew in ew_revs:
            out.append(
                ScoredPair(
                    sew_rev=sew,
                    ew_rev=ew,
                    scorer_id=scorer_id,
                    score=scorer(sew, ew),
                    label=labels.get(revision_pair_id(sew, ew)),
                )
            )
    return out
