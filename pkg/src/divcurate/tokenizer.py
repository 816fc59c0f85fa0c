"""Whitespace tokenizer shared by every text metric.

The convention is deliberately simple so token counts are reproducible
everywhere: split on Unicode whitespace, strip leading and trailing
punctuation from each piece, lowercase, and drop pieces that end up
empty. Interior punctuation (hyphens, apostrophes) is preserved.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punct(piece: str) -> str:
    start, end = 0, len(piece)
    while start < end and _is_punct(piece[start]):
        start += 1
    while end > start and _is_punct(piece[end - 1]):
        end -= 1
    return piece[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens of *text*; may be empty."""
    out = []
    for piece in text.split():
        piece = _strip_punct(piece)
        if piece:
            out.append(piece.lower())
    return out


def word_count(text: str) -> int:
    return len(tokenize(text))


@dataclass(frozen=True)
class TokenizedText:
    """A text together with its token sequence."""

    source: str
    tokens: tuple[str, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.tokens is None:
            object.__setattr__(self, "tokens", tuple(tokenize(self.source)))

    @property
    def word_count(self) -> int:
        return len(self.tokens)
