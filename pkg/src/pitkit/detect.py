"""Resonance detection on swept magnitude traces.

The detector fits a smooth polynomial baseline to each sweep, takes the
residual, and reports local maxima that clear a fixed dB threshold.
Because the baseline is re-fit every sweep, slow amplitude drift never
accumulates into the detection statistic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .trace import Sweep

# Residual sigma is floored so noiseless traces report a finite SNR.
_SIGMA_FLOOR = 1e-12
# Points whose first-pass residual exceeds this many robust sigmas are
# excluded from the second baseline fit, so a real peak does not drag
# the baseline up underneath itself.
_MASK_SIGMA = 2.5
_MASK_PASSES = 8
_MASK_DILATION = 4


@dataclass(frozen=True)
class DetectorConfig:
    baseline_order: int = 5
    peak_threshold: float = 0.02
    min_peak_separation: float = 150e3
    refit_every_sweep: bool = True

    def __post_init__(self) -> None:
        if self.baseline_order < 1:
            raise ValueError("baseline_order must be >= 1")
        if self.peak_threshold <= 0:
            raise ValueError("peak_threshold must be > 0")
        if self.min_peak_separation < 0:
            raise ValueError("min_peak_separation must be >= 0")


@dataclass(frozen=True)
class PeakReport:
    peak_frequency: float
    peak_height: float
    snr: float
    baseline_residual_sigma: float

    def to_dict(self) -> dict:
        return {
            "peak_frequency_hz": self.peak_frequency,
            "peak_height_db": self.peak_height,
            "snr": self.snr,
            "baseline_residual_sigma_db": self.baseline_residual_sigma,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _normalized_grid(frequencies: np.ndarray) -> np.ndarray:
    return (frequencies - frequencies.mean()) / ((frequencies[-1] - frequencies[0]) / 2.0)


def fit_baseline(sweep: Sweep, order: int) -> np.ndarray:
    """Least-squares polynomial baseline of the given degree.

    Plain unweighted fit: the residual sums to zero by the normal
    equations, and adding any in-span polynomial of degree <= order to
    the trace leaves the residual unchanged.
    """
    f = sweep.frequencies
    if len(f) <= order + 1:
        raise ValueError(f"need more than {order + 1} points for order {order}")
    if len(np.unique(f)) != len(f):
        raise ValueError("degenerate grid: duplicate frequencies")
    x = _normalized_grid(f)
    coeffs = np.polynomial.polynomial.polyfit(x, sweep.magnitudes_db, order)
    return np.polynomial.polynomial.polyval(x, coeffs)


def _robust_sigma(residual: np.ndarray) -> float:
    med = np.median(residual)
    return 1.4826 * float(np.median(np.abs(residual - med)))


def _masked_baseline(sweep: Sweep, order: int) -> np.ndarray:
    """Sigma-clipped baseline: fit, drop outlying points (the peak and
    one neighbor on each side), refit, and repeat until the mask stops
    changing.  Clipping keeps a resonance from pulling the fit upward
    underneath itself."""
    x = _normalized_grid(sweep.frequencies)
    y = sweep.magnitudes_db
    base = fit_baseline(sweep, order)
    keep = np.ones(len(y), dtype=bool)
    for _ in range(_MASK_PASSES):
        residual = y - base
        sigma = _robust_sigma(residual)
        if sigma <= _SIGMA_FLOOR:
            break
        # one-sided: resonance signatures are positive bumps, and points
        # below the fit anchor it against running away near the edges
        outlier = residual - np.median(residual) >= _MASK_SIGMA * sigma
        dilated = outlier.copy()
        for shift in range(1, _MASK_DILATION + 1):
            dilated[:-shift] |= outlier[shift:]
            dilated[shift:] |= outlier[:-shift]
        new_keep = ~dilated
        if new_keep.sum() <= order + 1 or np.array_equal(new_keep, keep):
            break
        keep = new_keep
        coeffs = np.polynomial.polynomial.polyfit(x[keep], y[keep], order)
        base = np.polynomial.polynomial.polyval(x, coeffs)
    return base


def detect_peaks(sweep: Sweep, cfg: DetectorConfig = DetectorConfig()) -> list[PeakReport]:
    """Thresholded local maxima of the baseline residual.

    A point is a peak when it strictly exceeds both neighbors and its
    residual height is at or above the threshold (closed comparison).
    Surviving peaks are pruned to the configured minimum separation,
    strongest first, and returned sorted by height descending.  The
    reported frequency is refined below the grid step by the vertex of
    the parabola through the maximum and its two neighbors.
    """
    residual = sweep.magnitudes_db - _masked_baseline(sweep, cfg.baseline_order)
    sigma = max(_robust_sigma(residual), _SIGMA_FLOOR)

    r = residual
    candidates = [
        i
        for i in range(1, len(r) - 1)
        if r[i] > r[i - 1] and r[i] > r[i + 1] and r[i] >= cfg.peak_threshold
    ]
    candidates.sort(key=lambda i: r[i], reverse=True)

    kept: list[int] = []
    for i in candidates:
        if all(
            abs(sweep.frequencies[i] - sweep.frequencies[j]) >= cfg.min_peak_separation
            for j in kept
        ):
            kept.append(i)

    return [
        PeakReport(
            peak_frequency=_vertex_frequency(sweep.frequencies, r, i),
            peak_height=float(r[i]),
            snr=float(r[i] / sigma),
            baseline_residual_sigma=sigma,
        )
        for i in kept
    ]


def _vertex_frequency(frequencies: np.ndarray, residual: np.ndarray, i: int) -> float:
    """Sub-grid peak position: vertex of the parabola through the local
    maximum and its neighbors, clamped to half a step either side."""
    denom = residual[i - 1] - 2.0 * residual[i] + residual[i + 1]
    if denom >= 0.0:
        return float(frequencies[i])
    shift = 0.5 * (residual[i - 1] - residual[i + 1]) / denom
    shift = min(max(shift, -0.5), 0.5)
    step = frequencies[i + 1] - frequencies[i]
    return float(frequencies[i] + shift * step)


def compute_snr(traces_with, traces_without, at_frequency: float) -> float:
    """(mean with-sensor - mean without-sensor) / std without-sensor,
    evaluated on the dB magnitudes at the grid point nearest
    ``at_frequency``.  Standard deviation is the population form."""
    traces_with = list(traces_with)
    traces_without = list(traces_without)
    if len(traces_with) < 2 or len(traces_without) < 2:
        raise ValueError("need at least 2 traces in each set")
    idx = traces_with[0].nearest_index(at_frequency)
    vals_with = np.array([s.magnitudes_db[idx] for s in traces_with])
    vals_without = np.array([s.magnitudes_db[idx] for s in traces_without])
    std = float(vals_without.std())
    if std == 0.0:
        diff = float(vals_with.mean() - vals_without.mean())
        return math.inf if diff > 0 else (-math.inf if diff < 0 else 0.0)
    return float((vals_with.mean() - vals_without.mean()) / std)
