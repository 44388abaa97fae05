"""Observables extracted from fidelity and purity sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .channel import exact_series, sampled_series
from .errors import InsufficientWindow, NoRevivalFound, SpinChannelError
from .model import ModelParams

FIT_THRESHOLD = 0.9
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class DecayFit:
    """Short-time Gaussian fit ``value ~ exp(-rate t^2)``."""

    rate: float
    window: tuple
    residual: float
    n_points: int


def gaussian_rate(times, values, threshold: float = FIT_THRESHOLD) -> DecayFit:
    """Fit ``ln(value) = -rate t^2`` through the origin on the leading window above ``threshold``.

    The window is the contiguous run of points from the start of the series
    whose (normalized) value stays at or above ``threshold``. A series that
    starts at ``t = 0`` is normalized by its first value.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if len(t) and t[0] == 0.0 and v[0] > 0:
        v = v / v[0]
    below = np.nonzero(~(v >= threshold))[0]
    stop = below[0] if len(below) else len(v)
    tw, vw = t[:stop], v[:stop]
    if stop < MIN_FIT_POINTS:
        raise InsufficientWindow(f"only {stop} points above {threshold} (need {MIN_FIT_POINTS})")
    x = tw**2
    y = -np.log(vw)
    denom = float(x @ x)
    if denom == 0.0:
        raise InsufficientWindow("fit window has zero time extent")
    rate = float(x @ y) / denom
    resid = float(np.sqrt(np.mean((y - rate * x) ** 2)))
    return DecayFit(rate, (float(tw[0]), float(tw[-1])), resid, int(stop))


@dataclass
class CriticalityScan:
    """Decay rate across a field grid with its centered-difference derivative."""

    lambda_grid: np.ndarray
    rates: np.ndarray
    derivative: np.ndarray
    peak_location: float
    prominence: float
    flat: bool
    fits: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)


def derivative_peak(lambda_grid, rates, flat_tol: float = 1e-9):
    """Centered derivative, argmax location, prominence (peak minus median) and flatness."""
    lam = np.asarray(lambda_grid, dtype=float)
    r = np.asarray(rates, dtype=float)
    if len(lam) < 2:
        d = np.zeros_like(r)
    else:
        d = np.gradient(r, lam)
    ok = np.isfinite(d)
    if not ok.any():
        return d, float("nan"), float("nan"), True
    dd = np.where(ok, d, -np.inf)
    i = int(np.argmax(dd))
    prominence = float(d[i] - np.median(d[ok]))
    scale = max(1.0, float(np.nanmax(np.abs(r))) if np.isfinite(r).any() else 1.0)
    flat = bool(np.ptp(d[ok]) <= flat_tol * scale)
    return d, float(lam[i]), prominence, flat


def series_for(params: ModelParams, times, n_samples=None, seed: int = 0, quantity: str = "fidelity",
               threads: int = 1) -> np.ndarray:
    """Fidelity or purity series, exact when ``n_samples`` is None, else sampled."""
    if quantity not in ("fidelity", "purity"):
        raise ValueError(f"unknown quantity {quantity!r}")
    if n_samples is None:
        F, P = exact_series(params, times, threads)
        return F if quantity == "fidelity" else P
    s = sampled_series(params, times, n_samples, seed, threads)
    return s.fidelity if quantity == "fidelity" else s.purity


def rate_scan(template: ModelParams, lambda_grid, times, n_samples=None, seed: int = 0,
              quantity: str = "fidelity", threshold: float = FIT_THRESHOLD, threads: int = 1) -> CriticalityScan:
    """Decay rate versus field.

    Every grid point uses the same seed, hence the same sampled pairs, so the
    finite-difference derivative is not swamped by independent sampling noise.
    Failures at individual grid points are recorded in ``errors`` and leave a NaN.
    """
    lam = np.asarray(sorted(float(v) for v in lambda_grid))
    if len(lam) == 0:
        raise ValueError("lambda grid must not be empty")
    rates = np.full(len(lam), np.nan)
    fits, errors = [], {}
    for i, value in enumerate(lam):
        try:
            series = series_for(template.replace(lam=value), times, n_samples, seed, quantity, threads)
            fit = gaussian_rate(times, series, threshold)
            rates[i] = fit.rate
            fits.append(fit)
        except SpinChannelError as exc:
            fits.append(None)
            errors[float(value)] = f"{type(exc).__name__}: {exc}"
    d, peak, prom, flat = derivative_peak(lam, rates)
    return CriticalityScan(lam, rates, d, peak, prom, flat, fits, errors)


# strong-field limit


def analytic_large_lambda_fidelity(n: int, epsilon: float, t) -> np.ndarray:
    """Fidelity of the fully polarized environment, summed over pair classes.

    Pairs differing in ``k`` positions, ``a`` of them excited in ``x``, number
    ``C(n,k) C(k,a) 2**(n-k)`` and carry ``L = exp(-i eps (2a - k) t)``. The sum
    collapses to ``cos(eps t / 2)**(2n)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(n + 1):
        for a in range(k + 1):
            total = total + comb(n, k) * comb(k, a) * 2 ** (n - k) * np.cos(epsilon * (2 * a - k) * t)
    return total / 4.0**n


def closed_form_large_lambda_fidelity(n: int, epsilon: float, t) -> np.ndarray:
    return np.cos(0.5 * epsilon * np.asarray(t, dtype=float)) ** (2 * n)


def brute_force_large_lambda_fidelity(n: int, epsilon: float, t) -> np.ndarray:
    """Explicit average of ``exp(-i eps (|x| - |y|) t)`` over all ``4**n`` ordered pairs."""
    N = 2**n
    weight = np.array([bin(c).count("1") for c in range(N)])
    diff = (weight[:, None] - weight[None, :]).ravel()
    values, counts = np.unique(diff, return_counts=True)
    t = np.asarray(t, dtype=float)
    total = sum(c * np.exp(-1j * epsilon * v * t) for v, c in zip(values, counts))
    return np.real(total) / N**2


# revivals


@dataclass(frozen=True)
class Revival:
    """First fidelity revival: time, height and whether it counts as perfect."""

    period: float
    height: float
    index: int
    perfect: bool


def revival_period(times, values, min_height: float = 0.99, recovery: float = 0.5) -> Revival:
    """Locate the first revival of a decaying series.

    Local maxima after the first local minimum qualify when they recover at
    least ``recovery`` of the drop from the initial value to the deepest
    preceding minimum. The first qualifying maximum within ``min_height`` of
    the tallest one is returned, refined by a parabola through its neighbours.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 3:
        raise NoRevivalFound("series too short")
    v0 = v[0]
    interior = np.arange(1, len(v) - 1)
    maxima = interior[(v[interior] >= v[interior - 1]) & (v[interior] > v[interior + 1])]
    minima = interior[(v[interior] <= v[interior - 1]) & (v[interior] < v[interior + 1])]
    if len(minima) == 0:
        raise NoRevivalFound("series never stops decaying")
    first_min = minima[0]
    candidates = []
    for i in maxima[maxima > first_min]:
        trough = v[: i + 1].min()
        drop = v0 - trough
        if drop > 0 and v[i] - trough >= recovery * drop:
            candidates.append(i)
    if not candidates:
        raise NoRevivalFound("no maximum recovers enough of the initial decay")
    tallest = max(v[i] for i in candidates)
    i = next(i for i in candidates if v[i] >= min_height * tallest)
    y0, y1, y2 = v[i - 1], v[i], v[i + 1]
    denom = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    shift = float(np.clip(shift, -0.5, 0.5))
    dt = 0.5 * (t[i + 1] - t[i - 1])
    period = float(t[i] + shift * dt)
    height = float(y1 - 0.25 * (y0 - y2) * shift)
    return Revival(period, height, int(i), bool(height >= min_height * v0))


# generalized model


@dataclass
class DifferenceScan:
    """Fidelities at a fixed time versus field for several spacer counts, and their differences."""

    lambda_grid: np.ndarray
    t_star: float
    fidelities: dict
    differences: dict
    peaks: dict


def fidelity_difference_scan(template: ModelParams, m_values, lambda_grid, t_star: float,
                             n_samples=None, seed: int = 0, threads: int = 1) -> DifferenceScan:
    """``|F(m_i) - F(m_j)|`` at ``t_star`` across ``lambda_grid`` for every pair of spacer counts.

    All configurations share the sampled pairs (same ``n`` and seed).
    """
    m_values = [int(m) for m in m_values]
    if len(m_values) < 2:
        raise ValueError("need at least two spacer values")
    lam = np.asarray(sorted(float(v) for v in lambda_grid))
    fid = {}
    for m in dict.fromkeys(m_values):
        row = np.empty(len(lam))
        for i, value in enumerate(lam):
            p = template.replace(spacing=m, lam=value, broken_bonds=frozenset())
            row[i] = series_for(p, [t_star], n_samples, seed, "fidelity", threads)[0]
        fid[m] = row
    diffs, peaks = {}, {}
    for a in range(len(m_values)):
        for b in range(a + 1, len(m_values)):
            key = (m_values[a], m_values[b])
            d = np.abs(fid[key[0]] - fid[key[1]])
            diffs[key] = d
            peaks[key] = float(lam[int(np.argmax(d))])
    return DifferenceScan(lam, float(t_star), fid, diffs, peaks)
