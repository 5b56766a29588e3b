"""Verbatim-leak scanning before anything is published.

Eleven consecutive words can already attract copyright, and quoted posts
are trivially findable through search engines, so the scanner reports
every maximal run of words an output shares with the source corpus at or
above the threshold.

Normalisation (applied to both sides, documented so matches are
reproducible): lowercase, every non-alphanumeric character becomes a
separator, then whitespace tokenisation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

_SEPARATORS = re.compile(r"[^0-9a-z]+")

DEFAULT_THRESHOLD_WORDS = 11


def normalise_tokens(text: str) -> list[str]:
    return [token for token in _SEPARATORS.split(text.lower()) if token]


@dataclass(frozen=True)
class LeakMatch:
    output_start: int  # token index into the normalised output
    output_end: int  # exclusive
    corpus_doc_id: str
    length_words: int
    text: str

    def to_dict(self) -> dict:
        return {
            "output_start": self.output_start,
            "output_end": self.output_end,
            "corpus_doc_id": self.corpus_doc_id,
            "length_words": self.length_words,
            "text": self.text,
        }


@dataclass(frozen=True)
class LeakScanReport:
    threshold_words: int
    matches: tuple[LeakMatch, ...]

    @property
    def clean(self) -> bool:
        return not self.matches

    def to_dict(self) -> dict:
        return {
            "threshold_words": self.threshold_words,
            "clean": self.clean,
            "matches": [m.to_dict() for m in self.matches],
        }


def _maximal_runs(out_tokens: list[str], doc_tokens: list[str]) -> set[tuple[int, int]]:
    """All (start, length) of maximal common word runs, via the classic
    longest-common-run recurrence with two rolling rows."""
    n, m = len(out_tokens), len(doc_tokens)
    runs: set[tuple[int, int]] = set()
    prev = [0] * (m + 1)
    for i in range(n):
        cur = [0] * (m + 1)
        for j in range(m):
            if out_tokens[i] != doc_tokens[j]:
                continue
            length = prev[j] + 1
            cur[j + 1] = length
            right_blocked = i + 1 >= n or j + 1 >= m or out_tokens[i + 1] != doc_tokens[j + 1]
            if right_blocked:
                runs.add((i - length + 1, length))
        prev = cur
    return runs


def scan_verbatim_leak(
    output_text: str,
    corpus: Mapping[str, str],
    threshold_words: int = DEFAULT_THRESHOLD_WORDS,
) -> LeakScanReport:
    """Report every maximal shared word run of at least ``threshold_words``.

    ``corpus`` maps document ids to their text. A run that occurs at
    several places in the same document is reported once per output span.
    """
    if threshold_words < 1:
        raise ValueError("threshold_words must be at least 1")
    out_tokens = normalise_tokens(output_text)
    matches: list[LeakMatch] = []
    for doc_id in sorted(corpus):
        doc_tokens = normalise_tokens(corpus[doc_id])
        for start, length in sorted(_maximal_runs(out_tokens, doc_tokens)):
            if length >= threshold_words:
                matches.append(
                    LeakMatch(
                        output_start=start,
                        output_end=start + length,
                        corpus_doc_id=doc_id,
                        length_words=length,
                        text=" ".join(out_tokens[start : start + length]),
                    )
                )
    matches.sort(key=lambda m: (m.output_start, m.corpus_doc_id, m.length_words))
    return LeakScanReport(threshold_words=threshold_words, matches=tuple(matches))
