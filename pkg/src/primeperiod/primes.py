"""Prime generation, gaps, gap statistics and the twin-killed K2 subsequence."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .csvio import write_csv
from .errors import ResourceLimitError, TooShortInputError

MAX_PRIME_COUNT = 10**7
MAX_SIEVE_LIMIT = 2 * 10**8

FULL = "full"
K2_FILTERED = "k2-filtered"


@dataclass(frozen=True)
class PrimeSequence:
    values: np.ndarray
    origin: str = FULL

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        if vals.ndim != 1:
            raise ValueError("prime sequence must be one-dimensional")
        if vals.size and vals[0] < 2:
            raise ValueError("prime sequence elements must be >= 2")
        if vals.size > 1 and np.any(np.diff(vals) <= 0):
            raise ValueError("prime sequence must be strictly increasing")
        if self.origin not in (FULL, K2_FILTERED):
            raise ValueError(f"unknown origin tag {self.origin!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return int(self.values.size)

    def tolist(self) -> list[int]:
        return self.values.tolist()


@dataclass(frozen=True)
class GapSequence:
    gaps: np.ndarray
    source_count: int

    def __post_init__(self):
        g = np.asarray(self.gaps, dtype=np.int64)
        object.__setattr__(self, "gaps", g)
        if g.size != self.source_count - 1:
            raise ValueError("gap count must equal source_count - 1")

    def __len__(self):
        return int(self.gaps.size)


@dataclass(frozen=True)
class GapHistogram:
    counts: dict[int, int] = field(default_factory=dict)
    mode: int = 0


def _sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_up_to(limit: int, max_limit: int = MAX_SIEVE_LIMIT) -> PrimeSequence:
    """All primes <= ``limit`` in increasing order."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit > max_limit:
        raise ResourceLimitError(f"limit {limit} exceeds configured maximum {max_limit}")
    return PrimeSequence(_sieve(int(limit)))


def _upper_bound(count: int) -> int:
    # p_n < n (ln n + ln ln n) for n >= 6
    if count < 6:
        return 13
    return int(count * (math.log(count) + math.log(math.log(count)))) + 1


def first_n_primes(count: int, max_count: int = MAX_PRIME_COUNT) -> PrimeSequence:
    """The first ``count`` primes, starting at 2."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > max_count:
        raise ResourceLimitError(f"count {count} exceeds configured maximum {max_count}")
    bound = _upper_bound(count)
    while True:
        found = _sieve(bound)
        if found.size >= count:
            return PrimeSequence(found[:count])
        bound *= 2


def gaps(seq: PrimeSequence) -> GapSequence:
    if len(seq) < 2:
        raise TooShortInputError("need at least 2 elements to form a gap")
    return GapSequence(np.diff(seq.values), len(seq))


def twin_pairs(seq: PrimeSequence) -> list[tuple[int, int]]:
    """Every (p, p+2) with both members in ``seq``; chains yield overlapping pairs."""
    v = seq.values
    if v.size < 2:
        return []
    lower = v[np.isin(v + 2, v, assume_unique=True)]
    return [(int(p), int(p) + 2) for p in lower]


def kill_twins(seq: PrimeSequence) -> PrimeSequence:
    """Drop the larger member of each twin pair found in the original sequence."""
    v = seq.values
    larger = v[np.isin(v - 2, v, assume_unique=True)]
    kept = v[~np.isin(v, larger, assume_unique=True)]
    return PrimeSequence(kept, origin=K2_FILTERED)


def gap_histogram(g: GapSequence) -> GapHistogram:
    if len(g) == 0:
        raise TooShortInputError("gap sequence is empty")
    counts = dict(sorted(Counter(g.gaps.tolist()).items()))
    top = max(counts.values())
    mode = min(k for k, c in counts.items() if c == top)
    return GapHistogram(counts=counts, mode=mode)


def gap_growth_diagnostic(seq: PrimeSequence, window: int) -> list[tuple[int, float, float]]:
    """Sliding mean gap over ``window`` consecutive primes.

    Each row is ``(p_center, mean_gap, ln p_center)``; the window slides by one
    prime. The ratio ``mean_gap / ln p_center`` is the quantity of interest for
    checking nonstationarity of the raw gaps.
    """
    n = len(seq)
    if window < 2:
        raise ValueError("window must be >= 2")
    if window > n:
        raise TooShortInputError(f"window {window} larger than sequence length {n}")
    v = seq.values
    starts = np.arange(n - window + 1)
    mean_gap = (v[starts + window - 1] - v[starts]) / (window - 1)
    centers = v[starts + (window - 1) // 2]
    return [(int(c), float(m), math.log(c)) for c, m in zip(centers, mean_gap)]


def to_csv(seq: PrimeSequence | GapSequence, path: str | Path, config: Mapping | None = None) -> Path:
    values = seq.gaps if isinstance(seq, GapSequence) else seq.values
    return write_csv(path, ["value"], [values.tolist()], config)
