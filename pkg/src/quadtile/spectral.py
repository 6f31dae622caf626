"""Discrete Fourier analysis on the sampled unit torus.

Signals are complex numpy arrays of length ``N = 2**m`` (``m >= 3``), holding
samples at the grid points ``x_i = i/N`` of ``[0, 1)``.  Spectra are complex
arrays in FFT layout; slot ``j`` carries the integer frequency
``j`` for ``j < N/2`` and ``j - N`` otherwise, so frequencies range over
``[-N/2, N/2)``.

Normalization is chosen so grid sums behave like integrals:
``forward_transform(f)[xi] = (1/N) * sum_i f_i exp(-2*pi*i*xi*x_i)`` and
``norm2(f)**2 = (1/N) * sum_i |f_i|**2 = sum_xi |f_hat(xi)|**2`` (Parseval).

All window functions are built from one C-infinity ramp and evaluate to exact
zeros outside their supports, which makes compact frequency supports and the
partition-of-unity identities hold at machine precision rather than only
asymptotically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "norm2",
    "inner",
    "frequencies",
    "forward_transform",
    "inverse_transform",
    "smooth_step",
    "Window",
    "build_base_window",
    "build_lowpass",
    "band_from_lowpass",
    "band_with_step",
    "build_mollifier",
    "bump_window",
    "scale_filter",
    "dilated_filter",
    "smoothed_indicator",
    "interval_mask",
    "maximal_function",
    "weak_quasinorm",
]


def _pow2_exponent(n: int) -> int:
    """Return m with n == 2**m, rejecting non-powers of two and n < 8."""
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")
    return n.bit_length() - 1


def norm2(f: np.ndarray) -> float:
    """L2 norm with the grid-mean (integral) normalization."""
    f = np.asarray(f)
    return float(np.sqrt(np.mean(np.abs(f) ** 2)))


def inner(f: np.ndarray, g: np.ndarray) -> complex:
    """Inner product (1/N) * sum f * conj(g)."""
    f = np.asarray(f)
    g = np.asarray(g)
    return complex(np.vdot(g, f) / len(f))


def frequencies(n: int) -> np.ndarray:
    """Integer frequencies in FFT layout: [0, 1, ..., N/2-1, -N/2, ..., -1]."""
    _pow2_exponent(n)
    return (np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)


def forward_transform(f: np.ndarray) -> np.ndarray:
    """Fourier coefficients of a signal (FFT layout, integral normalization)."""
    f = np.asarray(f, dtype=complex)
    _pow2_exponent(len(f))
    return np.fft.fft(f) / len(f)


def inverse_transform(coeffs: np.ndarray) -> np.ndarray:
    """Signal from Fourier coefficients; exact inverse of forward_transform."""
    coeffs = np.asarray(coeffs, dtype=complex)
    _pow2_exponent(len(coeffs))
    return np.fft.ifft(coeffs) * len(coeffs)


# ---------------------------------------------------------------------------
# Smooth windows
# ---------------------------------------------------------------------------

def _glue(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) continued by zero for t <= 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity ramp: exactly 0 for t <= 0, exactly 1 for t >= 1/2.

    Built as h(2t) / (h(2t) + h(1-2t)) with h(t) = exp(-1/t); the two plateau
    values are exact because h vanishes identically on (-inf, 0].
    """
    arr = np.asarray(t, dtype=float)
    out = np.zeros_like(arr)
    out[arr >= 0.5] = 1.0
    mid = (arr > 0.0) & (arr < 0.5)
    if np.any(mid):
        a = _glue(2.0 * arr[mid])
        b = _glue(1.0 - 2.0 * arr[mid])
        out[mid] = a / (a + b)
    if np.ndim(t) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class Window:
    """Real frequency window: a profile with exactly compact support.

    ``profile`` is evaluated pointwise on (dimensionless) frequency arguments;
    values outside the open support interval are forced to exactly 0.0 so
    support checks downstream can test for literal zeros.
    """

    profile: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support: tuple[float, float]
    name: str = ""

    def __call__(self, xi):
        arr = np.asarray(xi, dtype=float)
        lo, hi = self.support
        vals = np.where((arr > lo) & (arr < hi), self.profile(arr), 0.0)
        if np.ndim(xi) == 0:
            return float(vals)
        return vals


def build_base_window() -> Window:
    """Window with support exactly [0, 1] whose half-integer shifts sum to 1.

    profile(u) = smooth_step(u) - smooth_step(u - 1/2); summing over shifts
    u - l/2 telescopes the ramps, so the partition of unity is exact.
    """
    def profile(u):
        return smooth_step(u) - smooth_step(u - 0.5)

    return Window(profile, (0.0, 1.0), "base")


def build_lowpass() -> Window:
    """Low-pass window: exactly 1 on [-1, 1], supported in [-2, 2]."""
    def profile(u):
        return 1.0 - smooth_step((np.abs(u) - 1.0) / 2.0)

    return Window(profile, (-2.0, 2.0), "lowpass")


def band_from_lowpass(lowpass: Window) -> Window:
    """Band window lowpass(u/2) - lowpass(u): nonnegative, zero on [-1, 1]
    and outside (-4, 4), and telescoping exactly across dyadic dilations."""
    def profile(u):
        u = np.asarray(u, dtype=float)
        return lowpass(u / 2.0) - lowpass(u)

    return Window(profile, (-4.0, 4.0), "band")


def band_with_step(lowpass: Window, step: float) -> Window:
    """Band window lowpass(u/2**step) - lowpass(u) for an arbitrary positive
    dilation step; step=1 reproduces band_from_lowpass."""
    if step <= 0:
        raise ValueError(f"band step must be positive, got {step}")
    factor = 2.0 ** step

    def profile(u):
        u = np.asarray(u, dtype=float)
        return lowpass(u / factor) - lowpass(u)

    return Window(profile, (-2.0 * factor, 2.0 * factor), f"band-step-{step}")


def build_mollifier() -> Window:
    """Averaging window: value 1 at 0, exactly 1 on [-1/8, 1/8], support
    [-1/4, 1/4].  Used to smooth interval indicators without spreading their
    spectrum beyond a quarter of the dual scale."""
    lowpass = build_lowpass()

    def profile(u):
        u = np.asarray(u, dtype=float)
        return lowpass(8.0 * u)

    return Window(profile, (-0.25, 0.25), "mollifier")


def bump_window(lo: float, hi: float) -> Window:
    """Smooth bump supported exactly on [lo, hi], equal to 1 on the middle
    half of the interval."""
    if not hi > lo:
        raise ValueError(f"empty bump interval [{lo}, {hi}]")
    width = hi - lo

    def profile(u):
        u = np.asarray(u, dtype=float)
        return smooth_step((u - lo) / width) * smooth_step((hi - u) / width)

    return Window(profile, (float(lo), float(hi)), "bump")


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------

def dilated_filter(f: np.ndarray, window: Window, exponent: float) -> np.ndarray:
    """Fourier multiplier g_hat(xi) = f_hat(xi) * window(xi / 2**exponent).

    The dilated support must fit inside the frequency grid [-N/2, N/2),
    except in the degenerate case where the multiplier is identically 1 on
    the grid (a flat low-pass acts as the identity at any wider scale).
    """
    f = np.asarray(f, dtype=complex)
    n = len(f)
    _pow2_exponent(n)
    scale = 2.0 ** exponent
    xi = frequencies(n)
    mult = window(xi / scale)
    radius = scale * max(abs(window.support[0]), abs(window.support[1]))
    if radius > n / 2 and not np.all(mult == 1.0):
        raise ValueError(
            f"scale overflow: window {window.name!r} dilated by 2**{exponent} "
            f"has support radius {radius:g} > N/2 = {n // 2}"
        )
    return inverse_transform(forward_transform(f) * mult)


def scale_filter(f: np.ndarray, window: Window, k: int) -> np.ndarray:
    """Integer-scale Fourier multiplier g_hat(xi) = f_hat(xi) * window(xi/2**k)."""
    return dilated_filter(f, window, int(k))


# ---------------------------------------------------------------------------
# Indicators and smoothed indicators
# ---------------------------------------------------------------------------

def interval_mask(n: int, start: float, length: float) -> np.ndarray:
    """Boolean mask of grid points in the torus interval [start, start+length),
    with wrap-around.  length >= 1 marks the whole grid."""
    _pow2_exponent(n)
    if length <= 0:
        return np.zeros(n, dtype=bool)
    if length >= 1.0:
        return np.ones(n, dtype=bool)
    x = np.arange(n) / n
    return np.mod(x - start, 1.0) < length


@lru_cache(maxsize=4096)
def _smoothed_dyadic_indicator(n: int, k: int, pos: int) -> np.ndarray:
    out = smoothed_indicator(n, (pos * 2.0 ** -k, (pos + 1) * 2.0 ** -k), k)
    out.setflags(write=False)
    return out


def smoothed_dyadic_indicator(n: int, k: int, pos: int) -> np.ndarray:
    """Cached smoothed indicator of the dyadic interval [pos/2**k, (pos+1)/2**k)."""
    return _smoothed_dyadic_indicator(n, int(k), int(pos))


def smoothed_indicator(n: int, interval: tuple[float, float], k: int) -> np.ndarray:
    """Indicator of a length-2**-k torus interval convolved with the dilated
    mollifier.

    The result has mean exactly equal to the interval length, spectrum
    supported in [-2**(k-2), 2**(k-2)] with exact zeros outside, and the
    family over a dyadic partition sums to exactly 1.
    """
    _pow2_exponent(n)
    a, b = interval
    length = b - a
    if abs(length - 2.0 ** -k) > 1e-12:
        raise ValueError(f"interval length {length} does not match scale 2**-{k}")
    if 2 ** k * 8 > n:
        raise ValueError(
            f"grid of size {n} does not resolve intervals of length 2**-{k}"
        )
    chi = interval_mask(n, a, length).astype(complex)
    mollifier = build_mollifier()
    mult = mollifier(frequencies(n) / 2.0 ** k)
    return inverse_transform(forward_transform(chi) * mult)


# ---------------------------------------------------------------------------
# Maximal function and weak quasi-norm
# ---------------------------------------------------------------------------

def maximal_function(f: np.ndarray) -> np.ndarray:
    """Discrete Hardy-Littlewood maximal function over all dyadic torus
    intervals containing each point (single grid cells up to the full torus)."""
    f = np.asarray(f)
    n = len(f)
    _pow2_exponent(n)
    mags = np.abs(f).astype(float)
    best = mags.copy()  # finest scale: the point itself
    cur = mags
    length = 1
    while length < n:
        cur = 0.5 * (cur[0::2] + cur[1::2])
        length *= 2
        best = np.maximum(best, np.repeat(cur, length))
    return best


def weak_quasinorm(g: np.ndarray) -> float:
    """Weak-L1 quasi-norm: sup over thresholds t of t * |{x : g(x) >= t}|
    with the grid measure |.| = count/N.  Requires g real and nonnegative."""
    g = np.asarray(g)
    if np.iscomplexobj(g):
        if np.max(np.abs(g.imag)) != 0:
            raise ValueError("weak quasi-norm requires a real signal")
        g = g.real
    g = g.astype(float)
    if g.size == 0 or np.min(g) < 0:
        raise ValueError("weak quasi-norm requires nonnegative entries")
    n = len(g)
    ordered = np.sort(g)
    levels = np.unique(ordered)
    levels = levels[levels > 0]
    if levels.size == 0:
        return 0.0
    counts = n - np.searchsorted(ordered, levels, side="left")
    return float(np.max(levels * counts) / n)
