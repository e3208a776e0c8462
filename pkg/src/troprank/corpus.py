"""Seeded random 5-row matrices of tropical rank at most 3.

A min-plus product of a 5x3 and a 3xn matrix has tropical rank at most 3,
but the generator does not lean on that: every candidate is re-checked with
:func:`troprank.tropical.trop_rank` and rejected if the rank is too high.
"""

from __future__ import annotations

import random
from typing import Iterator

from .tropical import TropMatrix, min_plus_product, trop_rank

ROWS, INNER, MAX_RANK = 5, 3, 3


def _product(rng: random.Random, n: int, bound: int) -> TropMatrix:
    U = TropMatrix([[rng.randint(0, bound) for _ in range(INNER)] for _ in range(ROWS)])
    V = TropMatrix([[rng.randint(0, bound) for _ in range(n)] for _ in range(INNER)], cols=n)
    if n == 0:
        return TropMatrix([[] for _ in range(ROWS)], cols=0)
    return min_plus_product(U, V)


def sample(rng: random.Random, n: int, entry_bound: int = 5, max_tries: int = 1000) -> TropMatrix:
    for _ in range(max_tries):
        B = _product(rng, n, entry_bound)
        if trop_rank(B) <= MAX_RANK:
            return B
    raise RuntimeError(f"no rank <= {MAX_RANK} sample in {max_tries} tries")


def generate(n: int, seed: int, entry_bound: int = 5) -> TropMatrix:
    """One ``5 x n`` matrix, a deterministic function of ``(n, seed, entry_bound)``."""
    return sample(random.Random(seed), n, entry_bound)


def corpus(count: int, seed: int = 0, n_range=(3, 8), entry_bound: int = 5) -> Iterator[TropMatrix]:
    """``count`` matrices with widths drawn uniformly from ``n_range``."""
    rng = random.Random(seed)
    lo, hi = n_range
    for _ in range(count):
        yield sample(rng, rng.randint(lo, hi), entry_bound)
