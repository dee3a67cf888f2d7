"""Diagnostics over unemployment series: phase label, spectrum, crises.

All functions are pure over immutable series and safe to call in parallel.
Thresholds follow the models' 5% crisis criterion and are overridable;
callers record the values they used in the run manifest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

# Phase labels: full unemployment, residual unemployment, endogenous
# crises, full employment.
FU, RU, EC, FE = "FU", "RU", "EC", "FE"

FU_CUTOFF = 0.8  # finite-size runs hover below u = 1
FE_CUTOFF = 0.05
CRISIS_AMPLITUDE = 0.05
CRISIS_REARM = 0.01
MIN_WINDOW = 1000


@dataclass
class PhaseStats:
    label: str
    u_mean: float
    amplitude: float
    n_excursions: int


@dataclass
class SpectrumSummary:
    frequencies: np.ndarray  # cycles/step, in (0, 0.5]
    power: np.ndarray
    peak_frequency: float | None
    peak_significance: float

    @property
    def peak_period(self) -> float | None:
        return None if self.peak_frequency is None else 1.0 / self.peak_frequency


@dataclass
class CrisisStats:
    count: int
    mean_amplitude: float
    mean_interval: float


@dataclass
class EquilibrationResult:
    step: int
    censored: bool


def _excursion_starts(
    u: np.ndarray, high: float, rearm: float
) -> list[int]:
    """Start indices of disjoint excursions above `high`, re-armed at `rearm`."""
    starts: list[int] = []
    armed = True
    for i, v in enumerate(u):
        if armed and v > high:
            starts.append(i)
            armed = False
        elif not armed and v < rearm:
            armed = True
    return starts


def classify_phase(
    u_series: np.ndarray,
    burn_in: int = 0,
    fu_cutoff: float = FU_CUTOFF,
    fe_cutoff: float = FE_CUTOFF,
    crisis_amplitude: float = CRISIS_AMPLITUDE,
) -> PhaseStats:
    """Label the post-burn-in window FU / EC / FE / RU.

    FU when mean unemployment is near saturation; otherwise EC when the
    window swings by more than the crisis amplitude with at least two
    disjoint excursions above mean + amplitude (a single transient does not
    count); otherwise FE when unemployment is small, RU in between.

    The recurrence-plus-amplitude rule for EC is a reasoned proxy: the
    crisis phase is described qualitatively ("most of the time very close
    to zero" with recurring spikes), never thresholded exactly.
    """
    u = np.asarray(u_series, dtype=float)[burn_in:]
    if len(u) <= MIN_WINDOW:
        raise ValueError(
            f"classification window too short: {len(u)} <= {MIN_WINDOW} steps"
        )
    u_mean = float(np.mean(u))
    amplitude = float(np.max(u) - np.min(u))
    excursions = _excursion_starts(u, u_mean + crisis_amplitude, u_mean + CRISIS_REARM)
    if u_mean >= fu_cutoff:
        label = FU
    elif amplitude > crisis_amplitude and len(excursions) >= 2:
        label = EC
    elif u_mean < fe_cutoff:
        label = FE
    else:
        label = RU
    return PhaseStats(
        label=label,
        u_mean=u_mean,
        amplitude=amplitude,
        n_excursions=len(excursions),
    )


def power_spectrum(
    series: np.ndarray,
    burn_in: int = 0,
    min_segments: int = 8,
    significance: float = 3.0,
) -> SpectrumSummary:
    """Welch periodogram of the post-burn-in, mean-removed series.

    Segment length is the largest power of two giving at least
    `min_segments` half-overlapping segments. The peak is the largest local
    maximum exceeding `significance` times the median power; none when the
    spectrum is flat.
    """
    x = np.asarray(series, dtype=float)[burn_in:]
    if len(x) < 2048:
        raise ValueError(f"series too short for a spectrum: {len(x)} < 2048 steps")
    max_seg = (2 * len(x)) // (min_segments + 1)
    nperseg = 2 ** int(np.floor(np.log2(max_seg)))
    freqs, power = signal.welch(
        x, fs=1.0, nperseg=nperseg, detrend="constant", scaling="density"
    )
    keep = freqs > 0.0
    freqs, power = freqs[keep], power[keep]
    median_power = float(np.median(power))
    threshold = significance * median_power
    peak_frequency = None
    peak_power = 0.0
    for i in range(1, len(power) - 1):
        if (
            power[i] > threshold
            and power[i] >= power[i - 1]
            and power[i] >= power[i + 1]
            and power[i] > peak_power
        ):
            peak_power = float(power[i])
            peak_frequency = float(freqs[i])
    peak_significance = peak_power / median_power if median_power > 0.0 else 0.0
    return SpectrumSummary(
        frequencies=freqs,
        power=power,
        peak_frequency=peak_frequency,
        peak_significance=peak_significance,
    )


def equilibration_time(
    u_series: np.ndarray,
    tolerance: float,
    smooth_window: int = 25,
    final_fraction: float = 0.1,
) -> EquilibrationResult:
    """First step after which the (smoothed) series stays within ±tolerance
    of its final-window mean; censored when that only happens inside the
    final window itself (or never)."""
    u = np.asarray(u_series, dtype=float)
    if smooth_window > 1 and len(u) > smooth_window:
        kernel = np.ones(smooth_window) / smooth_window
        u = np.convolve(u, kernel, mode="valid")
    final_len = max(int(len(u) * final_fraction), 1)
    target = float(np.mean(u[-final_len:]))
    outside = np.abs(u - target) > tolerance
    if not outside.any():
        return EquilibrationResult(step=0, censored=False)
    last_outside = int(np.flatnonzero(outside)[-1])
    step = last_outside + 1
    return EquilibrationResult(step=step, censored=step >= len(u) - final_len)


def crisis_stats(
    u_series: np.ndarray,
    burn_in: int = 0,
    crisis_amplitude: float = CRISIS_AMPLITUDE,
    rearm: float = CRISIS_REARM,
) -> CrisisStats:
    """Count crisis excursions and their sizes in the post-burn-in window.

    An excursion starts when u exceeds mean + crisis_amplitude and the
    detector is armed; it re-arms when u falls back below mean + rearm.
    Amplitude is the excursion peak above the window mean; intervals are
    between consecutive peaks. Non-crisis input yields empty stats.
    """
    u = np.asarray(u_series, dtype=float)[burn_in:]
    if len(u) == 0:
        return CrisisStats(count=0, mean_amplitude=0.0, mean_interval=0.0)
    u_mean = float(np.mean(u))
    high = u_mean + crisis_amplitude
    low = u_mean + rearm
    peaks: list[tuple[int, float]] = []
    armed = True
    current_peak = None  # (index, value) of the running excursion
    for i, v in enumerate(u):
        if armed and v > high:
            armed = False
            current_peak = (i, v)
        elif not armed:
            if current_peak is not None and v > current_peak[1]:
                current_peak = (i, v)
            if v < low:
                armed = True
                peaks.append(current_peak)
                current_peak = None
    if current_peak is not None:
        peaks.append(current_peak)
    if not peaks:
        return CrisisStats(count=0, mean_amplitude=0.0, mean_interval=0.0)
    amplitudes = [v - u_mean for _, v in peaks]
    intervals = [b - a for (a, _), (b, _) in zip(peaks, peaks[1:])]
    return CrisisStats(
        count=len(peaks),
        mean_amplitude=float(np.mean(amplitudes)),
        mean_interval=float(np.mean(intervals)) if intervals else 0.0,
    )
