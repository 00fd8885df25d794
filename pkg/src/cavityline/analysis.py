"""Trace diagnostics: envelopes, collapse/revival timing, running time averages."""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.ndimage import maximum_filter1d


def envelope(t: np.ndarray, x: np.ndarray, width: float = 2.0) -> np.ndarray:
    """Sliding-window maximum of |x| over a centred window of ``width`` time units."""
    t = np.asarray(t, dtype=float)
    dt = t[1] - t[0]
    size = max(1, int(round(width / dt)) | 1)
    return maximum_filter1d(np.abs(np.asarray(x, dtype=float)), size=size, mode="nearest")


def first_revival_time(
    t: np.ndarray,
    w: np.ndarray,
    mean: float = 0.0,
    width: float = 2.0,
    collapse_frac: float = 0.1,
    revival_frac: float = 0.3,
) -> Optional[float]:
    """Time of the first envelope peak after the oscillations of ``w - mean`` collapse.

    Collapse is the first time the envelope falls below ``collapse_frac`` of its
    initial value.  The revival is the next stretch where it climbs back above
    ``revival_frac`` of the initial value, and its peak time is returned.
    Returns None if the trace shows no collapse followed by a revival.
    """
    osc = np.abs(np.asarray(w, dtype=float) - mean)
    env = envelope(t, osc, width)
    ref = env[0]
    collapsed = np.flatnonzero(env < collapse_frac * ref)
    if collapsed.size == 0:
        return None
    i_c = collapsed[0]
    above = np.flatnonzero(env[i_c:] > revival_frac * ref)
    if above.size == 0:
        return None
    i_r = i_c + above[0]
    below = np.flatnonzero(env[i_r:] < revival_frac * ref)
    i_e = i_r + below[0] if below.size else env.size
    # the sliding maximum is flat near a peak; locate it on the raw trace
    return float(t[i_r + np.argmax(osc[i_r:i_e])])


def running_average(t: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(1/T) * integral_0^T w dt for every sample T > 0 (trapezoid rule; NaN at T = 0)."""
    t = np.asarray(t, dtype=float)
    integral = cumulative_trapezoid(w, t, initial=0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(t > 0, integral / np.where(t > 0, t, 1.0), np.nan)
