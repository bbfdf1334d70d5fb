"""Dominant-period estimation by peak picking on a windowed, zero-padded DFT."""

from __future__ import annotations

import numpy as np

from .errors import NoPeakError


def dominant_period(series, step: float = 1.0, pad_factor: int = 16) -> tuple[float, float]:
    """Return ``(period, resolution)`` of the strongest nonzero-frequency peak.

    The series is mean-removed and Hann-windowed, then zero-padded to refine
    the peak location; the peak is further refined by a parabola through the
    three bins around it. Frequencies below one cycle per record are treated
    as the zero-frequency bin and ignored. ``resolution`` is the period width
    of half a native (unpadded) frequency bin at the peak.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 4:
        raise NoPeakError("series too short for spectral analysis")
    x = (x - x.mean()) * np.hanning(n)
    nfft = 1 << int(np.ceil(np.log2(pad_factor * n)))
    amp = np.abs(np.fft.rfft(x, nfft))
    freq = np.fft.rfftfreq(nfft, d=step)
    lo = int(np.searchsorted(freq, 1.0 / (n * step)))
    if lo >= amp.size - 1 or amp[lo:].max() <= 1e-12 * max(1.0, np.abs(series).max()):
        raise NoPeakError("spectrum is flat")
    k = lo + int(np.argmax(amp[lo:]))
    if k <= lo or k >= amp.size - 1:
        raise NoPeakError("no interior spectral peak")
    a, b, c = amp[k - 1], amp[k], amp[k + 1]
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    f_peak = freq[k] + shift * (freq[1] - freq[0])
    period = 1.0 / f_peak
    resolution = period**2 / (2.0 * n * step)
    return float(period), float(resolution)
