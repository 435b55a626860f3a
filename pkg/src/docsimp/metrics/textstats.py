"""Readability and compression statistics.

All conventions are pinned so the numbers are reproducible: sentences end
at runs of ``.!?`` followed by whitespace (or end of text), a word is any
token containing an alphanumeric character, and a word's syllable count is
its number of maximal ``aeiouy`` runs, floored at one.
"""
from __future__ import annotations

import re

from ..align import tokenize

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")
_VOWEL_RUN = re.compile(r"[aeiouy]+")


def split_sentences(text: str) -> list[str]:
    """Naive terminal-punctuation sentence splitter (no abbreviation list)."""
    return [s for s in _SENTENCE_BREAK.split(text) if s.strip()]


def syllable_count(word: str) -> int:
    """Maximal vowel-group count of the word's letters, at least 1."""
    letters = "".join(c for c in word.lower() if c.isalpha())
    return max(1, len(_VOWEL_RUN.findall(letters)))


def _is_word(surface: str) -> bool:
    return any(c.isalnum() for c in surface)


def fkgl(text: str) -> float:
    """Flesch-Kincaid grade level.

    ``0.39 * words/sentences + 11.8 * syllables/words - 15.59`` with the
    conventions above. Raises ValueError on text with no words or no
    sentences, rather than returning a meaningless number.
    """
    words = [t.surface for t in tokenize(text) if _is_word(t.surface)]
    sentences = [s for s in split_sentences(text) if any(_is_word(w) for w in s.split())]
    if not words or not sentences:
        raise ValueError("fkgl needs at least one word in at least one sentence")
    syllables = sum(syllable_count(w) for w in words)
    return 0.39 * len(words) / len(sentences) + 11.8 * syllables / len(words) - 15.59


def compression_ratio(complex_text: str, simple_text: str) -> float:
    """Token-count ratio simple/complex under the shared tokenizer.

    1.0 for equal lengths, 0.0 for an empty simple side. An empty complex
    side is an error unless both are empty.
    """
    n_complex = len(tokenize(complex_text))
    n_simple = len(tokenize(simple_text))
    if n_complex == 0:
        if n_simple == 0:
            return 1.0
        raise ValueError("compression ratio undefined: complex side has no tokens")
    return n_simple / n_complex
