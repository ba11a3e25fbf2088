"""FIR bandpass design and filter-bank decomposition.

Filters are linear-phase windowed-sinc bandpasses (Hamming window),
normalized to unit gain at the band center.  Application is zero-phase
forward-backward filtering with the warm-up transients trimmed, so band
power estimates downstream are not biased by edge effects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .trialstore import Dataset, Trial

DEFAULT_TAPS = 257


@dataclass(frozen=True)
class FirFilter:
    """Linear-phase FIR bandpass: symmetric coefficients, odd tap count."""

    coefficients: np.ndarray
    band: tuple[float, float]
    sample_rate: float

    @property
    def taps(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class FilterBank:
    """Ordered list of (low, high) bands sharing one tap count."""

    bands: list[tuple[float, float]]
    taps: int = DEFAULT_TAPS


@dataclass
class BandDecomposition:
    """One filtered dataset per band; labels and trial order preserved."""

    bands: list[tuple[float, float]]
    datasets: list[Dataset]

    @property
    def n_bands(self) -> int:
        return len(self.bands)

    def labels(self) -> np.ndarray:
        return self.datasets[0].labels()

    def band_trials(self) -> list[list[Trial]]:
        return [ds.trials for ds in self.datasets]

    def subset(self, indices: list[int]) -> "BandDecomposition":
        from .trialstore import select_trials

        return BandDecomposition(
            bands=list(self.bands),
            datasets=[select_trials(ds, indices) for ds in self.datasets],
        )


def design_bandpass(low: float, high: float, sample_rate: float, taps: int) -> FirFilter:
    """Windowed-sinc bandpass: ideal impulse response x Hamming window.

    The kernel is normalized to unit magnitude response at the band center
    (narrow bands would otherwise sit far below unity gain), and built by
    mirroring one half so the coefficients are exactly symmetric.

    Parameters
    ----------
    low, high : float
        Band edges in Hz, ``0 < low < high < sample_rate / 2``.
    taps : int
        Filter length; odd, at least 31.
    """
    if not 0.0 < low < high < sample_rate / 2.0:
        raise ValueError(f"band edges must satisfy 0 < low < high < Nyquist, got ({low}, {high}) at {sample_rate} Hz")
    if taps % 2 == 0 or taps < 31:
        raise ValueError(f"taps must be odd and >= 31, got {taps}")

    center = (taps - 1) // 2
    w1 = 2.0 * np.pi * low / sample_rate
    w2 = 2.0 * np.pi * high / sample_rate
    # Right half including center, mirrored for exact symmetry.
    n = np.arange(1, center + 1, dtype=np.float64)
    right = (np.sin(w2 * n) - np.sin(w1 * n)) / (np.pi * n)
    right *= np.hamming(taps)[center + 1 :]
    h = np.empty(taps, dtype=np.float64)
    h[center] = (w2 - w1) / np.pi
    h[center + 1 :] = right
    h[:center] = right[::-1]

    f0 = 0.5 * (low + high)
    gain = np.abs(np.sum(h * np.exp(-2j * np.pi * f0 / sample_rate * np.arange(taps))))
    h /= gain
    return FirFilter(coefficients=h, band=(low, high), sample_rate=sample_rate)


def _causal(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    # Causal FIR pass along the last axis, same length as the input.
    return fftconvolve(x, h[np.newaxis, :], mode="full", axes=1)[:, : x.shape[1]]


def apply_filter(trial: Trial, fir: FirFilter) -> Trial:
    """Zero-phase forward-backward filtering of one trial.

    Runs the kernel causally, reverses, runs it again and reverses back, so
    the net phase is zero and the magnitude response is squared.  The first
    and last ``taps - 1`` samples (filter warm-up in each direction) are
    discarded.
    """
    if trial.sample_rate != fir.sample_rate:
        raise ValueError(f"trial rate {trial.sample_rate} != filter rate {fir.sample_rate}")
    taps = fir.taps
    if trial.n_samples <= 3 * taps:
        raise ValueError(f"trial too short to filter: {trial.n_samples} samples <= 3 x {taps} taps")
    x = trial.samples.astype(np.float64)
    y = _causal(x, fir.coefficients)
    y = _causal(y[:, ::-1], fir.coefficients)[:, ::-1]
    y = y[:, taps - 1 : trial.n_samples - (taps - 1)]
    return Trial(label=trial.label, samples=y, sample_rate=trial.sample_rate)


def make_bank(start: float, stop: float, width: float, taps: int = DEFAULT_TAPS) -> FilterBank:
    """Contiguous bank of ``width``-Hz bands covering [start, stop]."""
    if width <= 0 or stop <= start:
        raise ValueError("need width > 0 and stop > start")
    n_bands = int(round((stop - start) / width))
    if n_bands < 1 or abs(start + n_bands * width - stop) > 1e-9:
        raise ValueError(f"({start}, {stop}) is not an integer number of {width} Hz bands")
    bands = [(start + i * width, start + (i + 1) * width) for i in range(n_bands)]
    return FilterBank(bands=bands, taps=taps)


def default_bank(sample_rate: float) -> FilterBank:
    """The standard 17-band bank: 2 Hz bands from (5, 7) up to (37, 39)."""
    if sample_rate <= 80.0:
        raise ValueError(f"sample rate {sample_rate} too low for the 5-39 Hz bank")
    return make_bank(5.0, 39.0, 2.0)


def decompose(dataset: Dataset, bank: FilterBank, taps: int | None = None) -> BandDecomposition:
    """Filter every trial into every band of the bank.

    Returns one dataset per band with trial order and labels preserved;
    each trial loses ``2 * (taps - 1)`` samples to edge trimming.
    """
    taps = bank.taps if taps is None else taps
    datasets = []
    for low, high in bank.bands:
        fir = design_bandpass(low, high, dataset.sample_rate, taps)
        filtered = [apply_filter(trial, fir) for trial in dataset.trials]
        datasets.append(
            Dataset(
                sample_rate=dataset.sample_rate,
                channel_names=list(dataset.channel_names),
                class_names=list(dataset.class_names),
                trials=filtered,
            )
        )
    return BandDecomposition(bands=list(bank.bands), datasets=datasets)
