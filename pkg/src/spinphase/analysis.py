"""Peak, width and scaling analysis of number and phase distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distributions import NumberDistribution, PhaseDistribution
from .exceptions import DomainError, PeakError, ResolutionError, UndefinedMeanError
from .specfun import MLevel, SpinJ

# Fewer samples than this above half maximum cannot give a trustworthy width.
MIN_SAMPLES_ABOVE_HALF = 3


@dataclass(frozen=True)
class WidthReport:
    fwhm: Optional[float]
    circ_stddev: float
    peak_locations: list
    peak_heights: list


@dataclass(frozen=True)
class ScalingFit:
    """ln(width) = exponent * ln(j) + ln(factor)."""

    exponent: float
    factor: float
    residual: float


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def local_maxima(dist: PhaseDistribution, rel_floor: float = 1e-10) -> list[int]:
    """Indices of local maxima on the circular grid, in grid order.

    A plateau counts once, at its first (smallest-phi) sample.  Maxima lower
    than ``rel_floor * max(p)`` are rounding ripples in the tails and are dropped.
    """
    p = dist.grid_p
    left = np.roll(p, 1)
    right = np.roll(p, -1)
    keep = (p > left) & (p >= right) & (p > rel_floor * p.max())
    return [int(i) for i in np.flatnonzero(keep)]


def _half_width_walk(p: np.ndarray, ipk: int, direction: int, limit: int) -> tuple[int, float]:
    """Walk from the peak until p drops below half maximum.

    Returns (samples at or above half on this side, excluding the peak;
    interpolated distance to the crossing in grid steps).
    """
    n = len(p)
    half = p[ipk] / 2
    for s in range(1, limit + 1):
        cur = p[(ipk + direction * s) % n]
        if cur < half:
            prev = p[(ipk + direction * (s - 1)) % n]
            return s - 1, (s - 1) + (prev - half) / (prev - cur)
    raise PeakError("no half-maximum crossing found")


def _width_at(dist: PhaseDistribution, ipk: int, limit: int) -> tuple[float, int, int]:
    p = dist.grid_p
    nr, right = _half_width_walk(p, ipk, +1, limit)
    nl, left = _half_width_walk(p, ipk, -1, limit)
    if nr + nl + 1 < MIN_SAMPLES_ABOVE_HALF:
        raise ResolutionError("peak is narrower than the grid can resolve; refine n_grid")
    return (left + right) * dist.step, nl, nr


def fwhm(dist: PhaseDistribution) -> float:
    """Full width at half maximum of the global peak, measured along the circle."""
    p = dist.grid_p
    n = len(p)
    ipk = int(np.argmax(p))
    if not np.any(p < p[ipk] / 2):
        raise PeakError("density has no peak (never drops below half maximum)")
    width, nl, nr = _width_at(dist, ipk, n - 1)
    inside = np.zeros(n, dtype=bool)
    inside[(ipk + np.arange(-nl, nr + 1)) % n] = True
    if np.any(p[~inside] >= p[ipk] / 2):
        raise PeakError("half-maximum region is disconnected: density is multimodal")
    return width


def peak_fwhm_at(dist: PhaseDistribution, center: float, window: float) -> float:
    """FWHM of the highest local maximum within ``window`` of ``center``."""
    if not window > 0:
        raise DomainError(f"window must be positive, got {window!r}")
    phi = dist.grid_phi
    dist_to_center = np.abs(_wrap(phi - center))
    candidates = [i for i in local_maxima(dist) if dist_to_center[i] <= window]
    if not candidates:
        raise PeakError(f"no local maximum within {window} of phi={center}")
    ipk = max(candidates, key=lambda i: (dist.grid_p[i], -i))
    limit = int(math.ceil(window / dist.step)) + 1
    width, _, _ = _width_at(dist, ipk, limit)
    return width


def circular_stats(dist: PhaseDistribution) -> tuple[float, float]:
    """Circular mean arg(<e^{i phi}>) and circular standard deviation sqrt(-2 ln R)."""
    z = np.sum(dist.grid_p * np.exp(1j * dist.grid_phi)) * dist.step
    r = abs(z)
    if r < 1e-12:
        raise UndefinedMeanError(f"first circular moment vanishes (R={r:.3g})")
    return float(np.angle(z)), math.sqrt(-2.0 * math.log(min(r, 1.0)))


def number_width(dist: NumberDistribution) -> float:
    """Standard deviation of m under p(m)."""
    m = dist.m_values
    mean = dist.p @ m
    return math.sqrt(max(float(dist.p @ (m - mean) ** 2), 0.0))


def scaling_fit(js: Sequence, widths: Sequence[float]) -> ScalingFit:
    """Least-squares power law width = factor * j**exponent, fitted in log-log space."""
    jv = np.array([j.j if isinstance(j, SpinJ) else float(j) for j in js])
    w = np.asarray(widths, dtype=float)
    if len(jv) != len(w):
        raise DomainError("js and widths must have the same length")
    if len(jv) < 3:
        raise DomainError("scaling_fit needs at least three points")
    if np.any(jv <= 0) or np.any(w <= 0):
        raise DomainError("j values and widths must be positive")
    x, y = np.log(jv), np.log(w)
    if np.ptp(x) == 0:
        raise DomainError("all j values are equal; exponent is undetermined")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return ScalingFit(float(slope), float(math.exp(intercept)), float(np.sqrt(np.mean(resid**2))))


def interference_minima(dist: NumberDistribution, threshold: float) -> list[MLevel]:
    """Interior local minima of p(m) that fall below ``threshold * max p``."""
    if threshold < 0:
        raise DomainError("threshold must be non-negative")
    p = dist.p
    cut = threshold * p.max()
    twice_m = dist.j.twice_m_values
    return [
        MLevel(int(twice_m[i]))
        for i in range(1, len(p) - 1)
        if p[i] <= cut and p[i] <= p[i - 1] and p[i] <= p[i + 1]
    ]


def width_report(dist: PhaseDistribution) -> WidthReport:
    peaks = local_maxima(dist)
    try:
        width = fwhm(dist)
    except PeakError:
        width = None
    try:
        _, sd = circular_stats(dist)
    except UndefinedMeanError:
        sd = math.inf
    return WidthReport(
        fwhm=width,
        circ_stddev=sd,
        peak_locations=[float(dist.grid_phi[i]) for i in peaks],
        peak_heights=[float(dist.grid_p[i]) for i in peaks],
    )
