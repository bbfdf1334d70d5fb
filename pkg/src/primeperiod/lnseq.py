"""Logarithmic-gap transform: scaled, rounded cumulative log-gaps."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .csvio import write_csv
from .errors import LogDomainError
from .primes import GapSequence

DEFAULT_SCALE = 10.0


@dataclass(frozen=True)
class LnSequence:
    values: np.ndarray
    scale: float
    source_gap_count: int
    # entries below 1 (the 0 produced by a unit gap) that were discarded
    discarded_below_one: int = 0
    # rounded entries that failed to increase and were dropped
    duplicates_dropped: int = 0

    def __len__(self):
        return int(self.values.size)


def _gap_array(g: GapSequence | Sequence[int]) -> np.ndarray:
    return np.asarray(g.gaps if isinstance(g, GapSequence) else g, dtype=float)


def log_gaps(g: GapSequence | Sequence[int]) -> np.ndarray:
    arr = _gap_array(g)
    if np.any(arr <= 0):
        bad = arr[arr <= 0][0]
        raise LogDomainError(f"logarithm undefined for nonpositive gap {bad:g}")
    return np.log(arr)


def cumulative_log_gaps(g: GapSequence | Sequence[int], scale: float = DEFAULT_SCALE) -> np.ndarray:
    """``scale * cumsum(ln gap)`` before rounding."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return scale * np.cumsum(log_gaps(g))


def round_half_away(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def ln_sequence(g: GapSequence | Sequence[int], scale: float = DEFAULT_SCALE) -> LnSequence:
    """Round the scaled cumulative log-gaps to natural numbers.

    Values below 1 are discarded, and any rounded value that does not exceed
    its retained predecessor is dropped; both events are counted on the
    returned object.
    """
    raw = cumulative_log_gaps(g, scale)
    rounded = round_half_away(raw).astype(np.int64)
    positive = rounded[rounded >= 1]
    discarded = int(rounded.size - positive.size)
    if positive.size:
        # cumulative sums never decrease, so a non-increase is always a repeat
        keep = np.concatenate(([True], np.diff(positive) > 0))
        kept = positive[keep]
    else:
        kept = positive
    return LnSequence(
        values=kept,
        scale=float(scale),
        source_gap_count=int(raw.size),
        discarded_below_one=discarded,
        duplicates_dropped=int(positive.size - kept.size),
    )


def to_csv(seq: LnSequence, path: str | Path, config: Mapping | None = None) -> Path:
    return write_csv(path, ["lnseq"], [seq.values.tolist()], config)
