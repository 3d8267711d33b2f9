"""Thai text utilities: grapheme segmentation and script detection.

Thai has no word spaces and uses combining vowel/tone marks, so all length
and cut operations work on extended grapheme clusters, never code points.
"""
from __future__ import annotations

import regex

_GRAPHEME = regex.compile(r"\X")
# Thai Unicode block
_THAI = regex.compile(r"[\u0E00-\u0E7F]")


def segment(text: str) -> list[str]:
    """Split text into extended grapheme clusters (UAX #29).

    Concatenating the result reproduces the input exactly.
    """
    if not text:
        return []
    return _GRAPHEME.findall(text)


def grapheme_len(text: str) -> int:
    return len(segment(text))


def has_thai(text: str) -> bool:
    """True if the text contains at least one Thai-block code point."""
    return _THAI.search(text) is not None
