"""Analytic realization of tiles: packet maps and their correlations.

For a tile s and slot j, the packet of a signal f is the smoothed-indicator
cutoff (spread 2**(k-2)) of f filtered by a smooth bump living on the middle
half of the slot's frequency interval.  Middle-half placement makes the
frequency support claim exact: bump support widened by the cutoff spread
stays inside the slot interval, so the packet spectrum vanishes outside it
identically.

Correlation norms between two packet operators are computed from dense
matrices at a dedicated coarse resolution, which keeps the numbers exact
rather than approximated.
"""

from __future__ import annotations

import numpy as np

from .spectral import (
    Window,
    bump_window,
    forward_transform,
    frequencies,
    inner,
    inverse_transform,
    smoothed_dyadic_indicator,
)
from .tiles import Tile

__all__ = [
    "tile_window",
    "require_slot_fit",
    "tile_packet",
    "tile_packet_adjoint",
    "packet_matrix",
    "packet_operator_norm",
    "packet_norms_sq",
]

MAX_NORM_RESOLUTION = 1024


def tile_window(tile: Tile, slot: int) -> Window:
    """Smooth bump supported on the middle half of the tile's slot interval."""
    lo, hi = tile.freq_interval(slot)
    quarter = (hi - lo) / 4.0
    return bump_window(lo + quarter, hi - quarter)


def require_slot_fit(tile: Tile, slot: int, n_grid: int) -> None:
    """Reject tiles whose slot interval or spatial cutoff does not fit the grid."""
    lo, hi = tile.freq_interval(slot)
    if lo < -n_grid // 2 or hi > n_grid // 2:
        raise ValueError(
            f"tile {tile} slot {slot} interval [{lo}, {hi}) exceeds the "
            f"frequency grid [-{n_grid // 2}, {n_grid // 2}) at N={n_grid}"
        )
    if 8 * 2 ** tile.k > n_grid:
        raise ValueError(
            f"tile {tile} spatial interval of length 2**-{tile.k} is not "
            f"resolved at N={n_grid}"
        )


def tile_packet(f: np.ndarray, tile: Tile, slot: int) -> np.ndarray:
    """Packet of f on a single tile slot; linear in f, spectrum exactly
    inside the slot's frequency interval."""
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    require_slot_fit(tile, slot, n_grid)
    window = tile_window(tile, slot)
    filtered = inverse_transform(forward_transform(f) * window(frequencies(n_grid)))
    return smoothed_dyadic_indicator(n_grid, tile.k, tile.n) * filtered


def tile_packet_adjoint(g: np.ndarray, tile: Tile, slot: int) -> np.ndarray:
    """Adjoint of the packet map under the grid-mean inner product: cutoff
    first, then the (real) frequency window."""
    g = np.asarray(g, dtype=complex)
    n_grid = len(g)
    require_slot_fit(tile, slot, n_grid)
    window = tile_window(tile, slot)
    cut = smoothed_dyadic_indicator(n_grid, tile.k, tile.n).conj() * g
    return inverse_transform(forward_transform(cut) * window(frequencies(n_grid)))


def packet_norms_sq(f: np.ndarray, tiles, slot: int) -> dict[Tile, float]:
    """Squared packet norms ||f_{s,slot}||_2**2 for many tiles, sharing one
    forward transform of f."""
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    fhat = forward_transform(f)
    xi = frequencies(n_grid)
    out: dict[Tile, float] = {}
    for tile in tiles:
        require_slot_fit(tile, slot, n_grid)
        filtered = inverse_transform(fhat * tile_window(tile, slot)(xi))
        packet = smoothed_dyadic_indicator(n_grid, tile.k, tile.n) * filtered
        out[tile] = float(np.mean(np.abs(packet) ** 2))
    return out


def packet_matrix(tile: Tile, slot: int, n_grid: int) -> np.ndarray:
    """Dense matrix of the packet map at resolution n_grid."""
    require_slot_fit(tile, slot, n_grid)
    window = tile_window(tile, slot)
    mult = window(frequencies(n_grid))
    spec = np.fft.fft(np.eye(n_grid, dtype=complex), axis=0)
    op = np.fft.ifft(mult[:, None] * spec, axis=0)
    cutoff = smoothed_dyadic_indicator(n_grid, tile.k, tile.n)
    return cutoff[:, None] * op


def _intersect(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def packet_operator_norm(s: Tile, t: Tile, n_grid: int = 512) -> float:
    """Operator 2-norm of (packet map of s) composed with the adjoint packet
    map of t, both in slot 1.

    Returns exactly 0.0 when the slot-1 intervals are disjoint: the first
    map's multiplier annihilates everything the second produces.  Otherwise
    the norm is the largest singular value of the dense composition at the
    requested coarse resolution (capped at 1024).
    """
    if n_grid > MAX_NORM_RESOLUTION:
        raise ValueError(
            f"correlation norms are computed densely; resolution {n_grid} "
            f"exceeds the cap {MAX_NORM_RESOLUTION}"
        )
    require_slot_fit(s, 1, n_grid)
    require_slot_fit(t, 1, n_grid)
    if not _intersect(s.freq_interval(1), t.freq_interval(1)):
        return 0.0
    a = packet_matrix(s, 1, n_grid)
    b = packet_matrix(t, 1, n_grid)
    composed = a @ b.conj().T
    return float(np.linalg.norm(composed, 2))


def packet_adjoint_identity_residual(
    f: np.ndarray, g: np.ndarray, tile: Tile, slot: int
) -> float:
    """|<Af, g> - <f, A*g>| for one random pair; should sit at rounding level."""
    lhs = inner(tile_packet(f, tile, slot), g)
    rhs = inner(f, tile_packet_adjoint(g, tile, slot))
    return abs(lhs - rhs)
