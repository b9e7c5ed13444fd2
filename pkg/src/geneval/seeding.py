"""Deterministic RNG derivation shared by the generators."""

from __future__ import annotations

import random


def derive_rng(*parts) -> random.Random:
    """Random stream keyed by the given parts.

    String seeding goes through SHA-512 in CPython, so streams are stable
    across runs and platforms and independent for different keys.
    """
    return random.Random("|".join(str(p) for p in parts))
