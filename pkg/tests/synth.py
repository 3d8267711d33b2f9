"""Seeded synthetic Thai-like corpus generator for tests.

Sentences are random open syllables ending in a sentence-final particle
(ครับ/ค่ะ/นะ/จ้ะ). Particles also appear mid-sentence (hesitation style) so
the raw EOT probability at a particle stays well below 0.5: the trained
n-gram scorer then mirrors the fine-tuned-decoder behavior where a fixed
0.5 threshold is useless but a validation-calibrated one works.
"""
from __future__ import annotations

import random

CONSONANTS = list("กขคงจชซดตทนบปพฟมยรลวสหอ")
# trailing vowels/marks only, so syllables never start with a combining mark
VOWEL_TAILS = ["ะ", "า", "ิ", "ี", "ึ", "ื", "ุ", "ู", "ัน", "อง", "าย", "อน"]
PARTICLES = ["ครับ", "ค่ะ", "นะ", "จ้ะ"]

MID_PARTICLE_P = 0.25


def syllable(rng: random.Random) -> str:
    return rng.choice(CONSONANTS) + rng.choice(VOWEL_TAILS)


def sentence(rng: random.Random, min_syllables: int = 5, max_syllables: int = 14) -> str:
    n = rng.randint(min_syllables, max_syllables)
    parts = []
    for i in range(n):
        parts.append(syllable(rng))
        # mid-sentence particles are always followed by another syllable, so
        # any particle context occurs in both continued and final positions
        if i < n - 1 and rng.random() < MID_PARTICLE_P:
            parts.append(rng.choice(PARTICLES))
    parts.append(rng.choice(PARTICLES))
    return "".join(parts)


def corpus_lines(n_sentences: int, seed: int = 0, with_noise: bool = True) -> list[str]:
    """Raw input lines: Thai sentences plus filterable noise lines."""
    rng = random.Random(seed)
    lines = [sentence(rng) for _ in range(n_sentences)]
    if with_noise:
        lines.insert(0, "no thai content at all")
        lines.insert(5, "ๆ")  # Thai but too short at default min_len=3
        lines.insert(9, "ก" * 300)  # too long at default max_len=200
        lines.insert(13, "   ")
    return lines
