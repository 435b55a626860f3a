"""Seeded synthetic corpora for benchmarks, smoke tests, and demos.

The generated pairs are nonsense prose, but they exercise the whole
pipeline: multi-sentence documents, entity-looking tokens, and simple
sides produced by applying deletion/substitution/insertion edits to the
complex side, so alignment recovers real edit structure.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from docsimp.core import DocumentRevision
from docsimp.corpus import PairRecord

_EPOCH = datetime(2021, 1, 1, tzinfo=timezone.utc)

_WORDS = (
    "the a an on in of and with for to near was is are were has had city "
    "river theater bridge project team season company village school story "
    "music public local major small old new famous early modern narrow wide "
    "northern southern central stone winter summer long short busy quiet "
    "built opened closed moved played walked crossed followed became held"
).split()

_ENTITIES = (
    "Mariinsky Petersburg Neva Volga Orlov Kirov Glinka Ladoga Vyborg Tosno"
).split()


def _sentence(rng: random.Random) -> list[str]:
    n = rng.randint(5, 12)
    words = [rng.choice(_WORDS) for _ in range(n)]
    if rng.random() < 0.6:
        words[rng.randrange(n)] = rng.choice(_ENTITIES)
    words[-1] = words[-1] + "."
    return words


def _perturb(rng: random.Random, tokens: list[str]) -> list[str]:
    """Apply a handful of span edits so the pair has non-trivial alignment."""
    out = list(tokens)
    for _ in range(rng.randint(1, 4)):
        if not out:
            break
        kind = rng.random()
        pos = rng.randrange(len(out))
        if kind < 0.4:  # delete a short span
            del out[pos : pos + rng.randint(1, 3)]
        elif kind < 0.75:  # substitute a span
            repl = [rng.choice(_WORDS) for _ in range(rng.randint(1, 2))]
            out[pos : pos + rng.randint(1, 2)] = repl
        else:  # insert a short span
            out[pos:pos] = [rng.choice(_WORDS) for _ in range(rng.randint(1, 3))]
    return out


def make_pair(rng: random.Random, pair_id: str, serial: int = 0) -> PairRecord:
    source: list[str] = []
    for _ in range(rng.randint(2, 4)):
        source.extend(_sentence(rng))
    target = _perturb(rng, source)
    title = f"Synthetic page {serial}"
    when = _EPOCH + timedelta(days=serial)
    return PairRecord(
        pair_id=pair_id,
        complex=DocumentRevision(
            page_id=1000 + serial,
            revision_id=10_000 + serial,
            timestamp=when,
            title=title,
            text=" ".join(source),
            source_wiki="complex",
        ),
        simple=DocumentRevision(
            page_id=5000 + serial,
            revision_id=50_000 + serial,
            timestamp=when + timedelta(hours=1),
            title=title,
            text=" ".join(target),
            source_wiki="simple",
        ),
    )


def make_pair_corpus(n: int, seed: int = 0) -> list[PairRecord]:
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = random.Random(seed)
    return [make_pair(rng, f"synth-{i:04d}", serial=i) for i in range(n)]
