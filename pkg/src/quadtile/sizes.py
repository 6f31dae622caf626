"""Size functionals over tile collections.

The size of a collection in slot j is the largest normalized packet mass
carried by a tree inside it: a supremum over 4-trees for slots 1 and 2, and
over 1-trees for slot 4.  Because tree sums have nonnegative terms, the
supremum is attained on maximal trees, so it is computed per candidate top
in O(|P|**2) and checked against exhaustive enumeration in tests.

Two computable comparison quantities accompany it: a weak-L1 form of the
same supremum (a John-Nirenberg style equivalent) and an averaging bound
driven by the maximal function over dilated time intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .packets import packet_norms_sq
from .spectral import interval_mask, maximal_function, weak_quasinorm
from .tiles import Tile, Tree, maximal_tree

__all__ = [
    "SizeReport",
    "tree_slot_for",
    "size",
    "size_sup_weak",
    "size_maximal_bound",
    "dilated_interval_mask",
]


def tree_slot_for(slot: int) -> int:
    """Tree kind carrying the supremum for a given packet slot: 4-trees for
    slots 1 and 2, 1-trees for slot 4."""
    if slot in (1, 2):
        return 4
    if slot == 4:
        return 1
    raise ValueError(f"size is defined for slots 1, 2, 4; got {slot}")


@dataclass
class SizeReport:
    slot: int
    value: float
    witness: Tree | None
    bound_weak: float
    bound_maximal: float
    decay_exponent: int


def _tree_value_sq(norms_sq: dict[Tile, float], tree: Tree) -> float:
    return sum(norms_sq[s] for s in tree.members) / tree.top_length()


def size(
    tiles,
    f: np.ndarray,
    slot: int,
    mu: int = 1,
    decay_exponent: int = 4,
) -> SizeReport:
    """Size of a tile collection for one slot, with the witness tree and the
    two comparison bounds evaluated alongside."""
    tree_slot = tree_slot_for(slot)
    pool = sorted(set(tiles))
    if not pool:
        return SizeReport(slot, 0.0, None, 0.0, 0.0, decay_exponent)
    norms_sq = packet_norms_sq(f, pool, slot)
    best_value = -1.0
    best_tree: Tree | None = None
    for top in pool:
        tree = maximal_tree(pool, top, tree_slot)
        value = _tree_value_sq(norms_sq, tree)
        if value > best_value:
            best_value = value
            best_tree = tree
    value = math.sqrt(max(best_value, 0.0))
    weak = size_sup_weak(pool, f, slot, _norms_sq=norms_sq)
    maximal = size_maximal_bound(pool, f, mu, decay_exponent)
    return SizeReport(slot, value, best_tree, weak, maximal, decay_exponent)


def size_value(tiles, f: np.ndarray, slot: int) -> float:
    """Size without the comparison bounds (cheap path for inner loops)."""
    tree_slot = tree_slot_for(slot)
    pool = sorted(set(tiles))
    if not pool:
        return 0.0
    norms_sq = packet_norms_sq(f, pool, slot)
    best = max(
        _tree_value_sq(norms_sq, maximal_tree(pool, top, tree_slot)) for top in pool
    )
    return math.sqrt(max(best, 0.0))


def size_sup_weak(tiles, f: np.ndarray, slot: int, _norms_sq=None) -> float:
    """Weak-L1 counterpart of the size: per candidate top, the weak
    quasi-norm of the square function built from packet masses spread over
    their time intervals, normalized by the top length."""
    tree_slot = tree_slot_for(slot)
    pool = sorted(set(tiles))
    if not pool:
        return 0.0
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    norms_sq = _norms_sq if _norms_sq is not None else packet_norms_sq(f, pool, slot)
    masks = {
        s: interval_mask(n_grid, s.time_interval()[0], s.time_length()) for s in pool
    }
    best = 0.0
    for top in pool:
        tree = maximal_tree(pool, top, tree_slot)
        square = np.zeros(n_grid)
        for s in tree.members:
            square += (norms_sq[s] / s.time_length()) * masks[s]
        value = weak_quasinorm(np.sqrt(square)) / tree.top_length()
        best = max(best, value)
    return best


def dilated_interval_mask(n_grid: int, tile: Tile, mu: int) -> np.ndarray:
    """Concentric dilation of the tile's time interval on the torus: same
    center, length min(mu * |I|, 1)."""
    a, b = tile.time_interval()
    center = (a + b) / 2.0
    length = min(mu * (b - a), 1.0)
    return interval_mask(n_grid, center - length / 2.0, length)


def size_maximal_bound(tiles, f: np.ndarray, mu: int, decay_exponent: int) -> float:
    """Averaging bound: sup over tiles of the mean of |f| over the
    mu-dilated time interval (normalized by the undilated length) plus
    mu**-decay_exponent times the infimum of the maximal function there."""
    if mu < 1 or (mu & (mu - 1)) != 0:
        raise ValueError(f"dilation factor must be a dyadic integer >= 1, got {mu}")
    pool = sorted(set(tiles))
    if not pool:
        return 0.0
    f = np.asarray(f, dtype=complex)
    n_grid = len(f)
    mags = np.abs(f)
    maximal = maximal_function(f)
    best = 0.0
    for s in pool:
        mask = dilated_interval_mask(n_grid, s, mu)
        l1_local = float(np.sum(mags[mask])) / n_grid
        inf_max = float(np.min(maximal[mask]))
        bound = l1_local / s.time_length() + mu ** (-decay_exponent) * inf_max
        best = max(best, bound)
    return best
