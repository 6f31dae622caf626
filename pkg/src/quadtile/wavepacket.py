"""Single-scale wave packet decomposition with exact reconstruction.

At scale ``k`` a signal splits over a spatial index ``n`` (dyadic interval
``[n/2**k, (n+1)/2**k)``) and a frequency shift ``l`` (window supported on
``[2**(k-1) l, 2**(k-1) l + 2**k]``).  Both the frequency windows (half-step
shifts of the base window) and the smoothed spatial indicators form exact
partitions of unity on the grid, so summing all components returns the input
to near machine precision.

On the torus the frequency shifts are finitely many; one extra window at the
lower grid edge is kept (clipped to the grid) so the frequency partition
covers every grid frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    build_base_window,
    forward_transform,
    frequencies,
    inverse_transform,
    maximal_function,
    smoothed_dyadic_indicator,
)

__all__ = [
    "PacketIndex",
    "admissible_scales",
    "shift_range",
    "packet_component",
    "decompose_scale",
    "localization_profile",
]

_MIN_SCALE = 3  # coarser packets do not resolve both time and frequency
_SCALE_MARGIN = 5  # k <= m - margin keeps dilated windows well inside the grid


@dataclass(frozen=True, order=True)
class PacketIndex:
    """Index (k, n, l): scale, spatial position, frequency shift."""

    k: int
    n: int
    l: int

    def spatial_interval(self) -> tuple[float, float]:
        h = 2.0 ** -self.k
        return (self.n * h, (self.n + 1) * h)

    def window_interval(self) -> tuple[int, int]:
        """Support of the frequency window, [2**(k-1) l, 2**(k-1) l + 2**k]."""
        base = 2 ** (self.k - 1) * self.l
        return (base, base + 2 ** self.k)


def admissible_scales(n: int) -> range:
    """Scales k usable at grid size n = 2**m: range(3, m - 4)."""
    m = n.bit_length() - 1
    if n != 2 ** m:
        raise ValueError(f"grid size must be a power of two, got {n}")
    return range(_MIN_SCALE, m - _SCALE_MARGIN + 1)


def shift_range(n: int, k: int) -> range:
    """Frequency shifts at scale k.

    Interior windows lie inside [-N/2, N/2); the extra leftmost shift is
    clipped by the grid edge but needed so the shifted windows sum to 1 at
    every grid frequency.
    """
    half = n // 2 ** k
    return range(-half - 1, half)


def _validate(idx: PacketIndex, n: int) -> None:
    if idx.k not in admissible_scales(n):
        raise ValueError(
            f"scale k={idx.k} not admissible at N={n}; "
            f"admissible: {list(admissible_scales(n))}"
        )
    if not 0 <= idx.n < 2 ** idx.k:
        raise ValueError(f"spatial index n={idx.n} outside [0, 2**{idx.k})")
    if idx.l not in shift_range(n, idx.k):
        raise ValueError(f"frequency shift l={idx.l} outside grid range at N={n}")


def _window_multiplier(n: int, k: int, l: int) -> np.ndarray:
    window = build_base_window()
    xi = frequencies(n)
    return window((xi - 2 ** (k - 1) * l) / 2.0 ** k)


def packet_component(f: np.ndarray, idx: PacketIndex) -> np.ndarray:
    """Component of f at one (k, n, l): smoothed-indicator cutoff of the
    window-filtered signal.  Its spectrum stays inside the window support
    widened by the indicator spread 2**(k-2) on each side."""
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    _validate(idx, n_grid)
    mult = _window_multiplier(n_grid, idx.k, idx.l)
    filtered = inverse_transform(forward_transform(f) * mult)
    return smoothed_dyadic_indicator(n_grid, idx.k, idx.n) * filtered


def decompose_scale(f: np.ndarray, k: int) -> dict[PacketIndex, np.ndarray]:
    """All components of f at scale k, keyed by PacketIndex.

    Summing the values reproduces f up to rounding (both partitions of unity
    are exact).  Shares one filtered signal per shift across spatial indices.
    """
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    if k not in admissible_scales(n_grid):
        raise ValueError(f"scale k={k} not admissible at N={n_grid}")
    fhat = forward_transform(f)
    cutoffs = [smoothed_dyadic_indicator(n_grid, k, pos) for pos in range(2 ** k)]
    out: dict[PacketIndex, np.ndarray] = {}
    for l in shift_range(n_grid, k):
        filtered = inverse_transform(fhat * _window_multiplier(n_grid, k, l))
        for pos, cutoff in enumerate(cutoffs):
            out[PacketIndex(k, pos, l)] = cutoff * filtered
    return out


def localization_profile(
    f: np.ndarray,
    idx: PacketIndex,
    decay_space: int = 5,
    decay_conv: int = 5,
) -> float:
    """Smallest constant C such that pointwise on the grid

        |component(x)| <= C * (1 + dist(x, I)/|I|)**-decay_space
                            * (1/|I|) * mean_y |f(y)| (1 + d(x,y)/|I|)**-decay_conv

    where I is the packet's spatial interval and d is torus distance.
    Returns 0 for f identically zero.
    """
    if decay_space > 8 or decay_conv > 8:
        raise ValueError("decay exponents above 8 are not resolvable at desk grids")
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    component = packet_component(f, idx)
    if not np.any(f):
        return 0.0
    x = np.arange(n_grid) / n_grid
    a, b = idx.spatial_interval()
    h = b - a
    # torus distance from each grid point to the interval
    left = np.mod(a - x, 1.0)
    right = np.mod(x - b, 1.0)
    inside = np.mod(x - a, 1.0) < h
    dist = np.where(inside, 0.0, np.minimum(left, right))
    space_factor = (1.0 + dist / h) ** -decay_space
    diff = np.abs(x[:, None] - x[None, :])
    torus_d = np.minimum(diff, 1.0 - diff)
    kernel = (1.0 + torus_d / h) ** -decay_conv
    envelope = (kernel @ np.abs(f)) / n_grid / h
    bound = space_factor * envelope
    ratios = np.abs(component) / bound
    return float(np.max(ratios))


def localization_reference(f: np.ndarray, idx: PacketIndex) -> float:
    """Crude comparison scale for the localization constant: the maximal
    function of f at the interval center (used by regression tests)."""
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    a, b = idx.spatial_interval()
    center = int(((a + b) / 2) * n_grid) % n_grid
    return float(maximal_function(f)[center])
