"""Exceptional-set stratification and greedy tree selection.

The organization step peels threshold-exceeding trees off a tile collection:
while some candidate top carries a maximal opposite-kind tree whose
normalized packet mass meets ``(sigma/2) * ||f||_2``, the top with extremal
slot-4 center is selected, its full union tree (maximal 1-tree plus maximal
4-tree) is removed, and the loop repeats.  Termination certifies the halved
size bound on the residual; the selected tops' interval lengths obey the
``1/sigma**2`` counting bound checked by the harness.

Selection order is semantic: the extremal-center rule is exactly what makes
time intervals from distinct trees disjoint in the cross-tree containment
configuration (checked by ``check_top_disjointness``).  For slot-4 runs the
rule mirrors (slot-1 centers, minimal first), because the slot-1/slot-4
geometry is the frequency-reflected image of the slot-4/slot-1 one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .packets import packet_norms_sq
from .spectral import maximal_function, norm2
from .sizes import size_value, tree_slot_for
from .tiles import Tile, Tree

__all__ = [
    "SelectionOutcome",
    "SelectionHypothesisError",
    "DisjointnessViolation",
    "exceptional_set",
    "mu_stratify",
    "select_trees",
    "check_top_disjointness",
    "sigma_stratify",
    "serialize_outcome",
]


class SelectionHypothesisError(ValueError):
    """Raised when the entry size bound fails; carries the offending tree."""

    def __init__(self, message: str, witness: Tree):
        super().__init__(message)
        self.witness = witness


class DisjointnessViolation(NamedTuple):
    tree_a: Tree
    tree_b: Tree
    member: Tile
    other: Tile


@dataclass(frozen=True)
class SelectionOutcome:
    residual: frozenset
    forest: tuple
    sigma: float
    top_length_sum: float
    trace: tuple
    slot: int | None
    f_norm: float

    def forest_members(self) -> frozenset:
        out: set[Tile] = set()
        for tree in self.forest:
            out |= tree.members
        return frozenset(out)


def _require_dyadic(value: float, name: str) -> float:
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    mantissa, _ = math.frexp(value)
    if mantissa != 0.5:
        raise ValueError(f"{name} must be a power of two, got {value}")
    return float(value)


# ---------------------------------------------------------------------------
# Exceptional set and strata
# ---------------------------------------------------------------------------

def exceptional_set(
    f1_mask: np.ndarray,
    f2_mask: np.ndarray,
    f3_mask: np.ndarray,
    p: float,
    c0: float = 4.0,
    max_doublings: int = 64,
) -> tuple[np.ndarray, float]:
    """Region where the maximal functions of the three sets are large.

    The threshold constant starts at c0 and doubles until the region has
    measure at most 1/4; the constant actually used is returned.
    """
    if p <= 1:
        raise ValueError(f"exponent must exceed 1, got {p}")
    masks = [np.asarray(m, dtype=bool) for m in (f1_mask, f2_mask, f3_mask)]
    n = len(masks[0])
    if any(len(m) != n for m in masks):
        raise ValueError("set masks must share one grid")
    measures = [float(m.mean()) for m in masks]
    peaks = [maximal_function(m.astype(float)) for m in masks]
    thresholds_base = [measures[0], measures[1], measures[2] ** (1.0 / p)]
    c = float(c0)
    for _ in range(max_doublings):
        omega = np.zeros(n, dtype=bool)
        for peak, base in zip(peaks, thresholds_base):
            omega |= peak > c * base
        if omega.mean() <= 0.25:
            return omega, c
        c *= 2.0
    raise RuntimeError("exceptional set did not shrink below measure 1/4")


def mu_stratify(tiles: Iterable[Tile], omega_mask: np.ndarray) -> dict[int, list[Tile]]:
    """Partition tiles by the dyadic distance class of their time interval
    from the complement of the exceptional set.

    A tile lands in stratum mu = 2**e where 2**e is the smallest power of two
    with 1 + dist(I, complement)/|I| <= 2**e; tiles touching the complement
    land in mu = 1.  Distances are computed exactly in grid cells.
    """
    omega_mask = np.asarray(omega_mask, dtype=bool)
    if omega_mask.all():
        raise ValueError("exceptional set covers the whole torus")
    n = len(omega_mask)
    complement = np.flatnonzero(~omega_mask)
    strata: dict[int, list[Tile]] = {}
    for tile in sorted(set(tiles)):
        cells = n // 2 ** tile.k
        if cells == 0:
            raise ValueError(f"grid of size {n} does not resolve tile {tile}")
        a = tile.n * cells
        b = a + cells
        gap_up = (complement - b) % n
        gap_down = (a - (complement + 1)) % n
        inside = ((complement - a) % n) < cells
        dist = int(np.where(inside, 0, np.minimum(gap_up, gap_down)).min())
        exponent = 0
        while (1 << exponent) * cells < cells + dist:
            exponent += 1
        strata.setdefault(1 << exponent, []).append(tile)
    return strata


# ---------------------------------------------------------------------------
# Greedy selection
# ---------------------------------------------------------------------------

def _order_matrix(tiles: Sequence[Tile], slot: int) -> np.ndarray:
    """M[i, j] is True when tiles[i] sits under tiles[j] in the slot order."""
    lo_t = np.array([t.time_interval()[0] for t in tiles])
    hi_t = np.array([t.time_interval()[1] for t in tiles])
    time_in = (lo_t[:, None] >= lo_t[None, :]) & (hi_t[:, None] <= hi_t[None, :])
    lo_f = np.array([t.freq_interval(slot)[0] for t in tiles])
    hi_f = np.array([t.freq_interval(slot)[1] for t in tiles])
    freq_contains = (lo_f[:, None] <= lo_f[None, :]) & (hi_f[:, None] >= hi_f[None, :])
    return time_in & freq_contains


def select_trees(
    tiles: Iterable[Tile],
    f: np.ndarray,
    slot: int,
    sigma: float,
) -> SelectionOutcome:
    """One run of the organization algorithm at threshold sigma.

    Requires size(tiles, f, slot) <= sigma * ||f||_2 on entry.  On exit the
    residual satisfies the bound with sigma/2, certified by the loop's own
    termination and re-checkable independently.
    """
    sigma = _require_dyadic(sigma, "sigma")
    if slot not in (1, 2, 4):
        raise ValueError(f"selection runs on slots 1, 2, 4; got {slot}")
    pool = sorted(set(tiles))
    f = np.asarray(f, dtype=complex)
    f_norm = norm2(f)
    if not pool or f_norm == 0.0:
        return SelectionOutcome(
            frozenset(pool), (), sigma, 0.0, (), slot, f_norm
        )

    tree_slot = tree_slot_for(slot)
    norms_sq = packet_norms_sq(f, pool, slot)
    weights = np.array([norms_sq[s] for s in pool])
    order_1 = _order_matrix(pool, 1)
    order_4 = _order_matrix(pool, 4)
    order_sel = order_1 if tree_slot == 1 else order_4
    inv_lengths = np.array([1.0 / t.time_length() for t in pool])

    entry_values = (weights @ order_sel) * inv_lengths
    entry_sq = float(np.max(entry_values))
    bound_sq = (sigma * f_norm) ** 2
    if entry_sq > bound_sq * (1 + 1e-9):
        worst = int(np.argmax(entry_values))
        witness = Tree(
            frozenset(pool[i] for i in np.flatnonzero(order_sel[:, worst])),
            pool[worst],
            str(tree_slot),
        )
        raise SelectionHypothesisError(
            f"entry bound violated: size {math.sqrt(entry_sq):.6g} > "
            f"sigma*||f|| = {sigma * f_norm:.6g}",
            witness,
        )

    c_sel = np.array([t.freq_center(4 if slot in (1, 2) else 1) for t in pool])
    # maximal slot-4 center first for slot-1/2 runs; the mirrored rule
    # (minimal slot-1 center) for slot-4 runs
    c_key = c_sel if slot in (1, 2) else -c_sel
    lengths = np.array([t.time_length() for t in pool])
    lefts = np.array([t.time_interval()[0] for t in pool])

    alive = np.ones(len(pool), dtype=bool)
    threshold_sq = (0.5 * sigma * f_norm) ** 2
    forest: list[Tree] = []
    trace: list[Tile] = []
    while True:
        masses = ((weights * alive) @ order_sel) * inv_lengths
        eligible = alive & (masses >= threshold_sq * (1 - 1e-12))
        if not eligible.any():
            break
        idx = np.flatnonzero(eligible)
        best = max(idx, key=lambda i: (c_key[i], lengths[i], -lefts[i]))
        members_mask = alive & (order_1[:, best] | order_4[:, best])
        members = frozenset(pool[i] for i in np.flatnonzero(members_mask))
        forest.append(Tree(members, pool[best], "union"))
        trace.append(pool[best])
        alive &= ~members_mask

    residual = frozenset(pool[i] for i in np.flatnonzero(alive))
    top_sum = float(sum(t.time_length() for t in trace))
    return SelectionOutcome(
        residual, tuple(forest), sigma, top_sum, tuple(trace), slot, f_norm
    )


def check_top_disjointness(outcome: SelectionOutcome):
    """Cross-tree containment check on a single-slot selection outcome.

    For tiles s in one tree and s' in another with the frequency interval of
    s contained in that of s' (in the run's packet slot), the time interval
    of s' must avoid the first tree's top interval.  Returns True, or the
    first violating quadruple.
    """
    if outcome.slot is None:
        raise ValueError("disjointness check needs a single-slot outcome")
    check_slot = 1 if outcome.slot in (1, 2) else 4
    trees = outcome.forest
    for a in trees:
        top_lo, top_hi = a.time_interval()
        for b in trees:
            if a is b:
                continue
            for s in sorted(a.members):
                lo_s, hi_s = s.freq_interval(check_slot)
                for sp in sorted(b.members):
                    lo_p, hi_p = sp.freq_interval(check_slot)
                    if lo_p <= lo_s and hi_s <= hi_p:
                        t_lo, t_hi = sp.time_interval()
                        if t_lo < top_hi and top_lo < t_hi:
                            return DisjointnessViolation(a, b, s, sp)
    return True


# ---------------------------------------------------------------------------
# Simultaneous sigma stratification
# ---------------------------------------------------------------------------

def sigma_stratify(
    tiles: Iterable[Tile],
    f1: np.ndarray,
    f2: np.ndarray,
    f4: np.ndarray,
) -> dict[float, SelectionOutcome]:
    """Halving cascade of the selection over slots 1, 2 and 4 together.

    Each level sigma removes, for every slot in turn, all trees meeting that
    level's threshold; what remains is strictly below the halved bound for
    every slot, and becomes the next level's input.  Tiles whose packets
    vanish for all three slots stay in the final level's residual.
    """
    pool = sorted(set(tiles))
    signals = {1: np.asarray(f1, complex), 2: np.asarray(f2, complex),
               4: np.asarray(f4, complex)}
    if not pool:
        return {}
    norms = {j: norm2(g) for j, g in signals.items()}
    active = [j for j in (1, 2, 4) if norms[j] > 0]

    def relative_sizes(subset):
        return {j: size_value(subset, signals[j], j) / norms[j] for j in active}

    if not active:
        empty = SelectionOutcome(frozenset(pool), (), 1.0, 0.0, (), None, 0.0)
        return {1.0: empty}
    ratios = relative_sizes(pool)
    top_ratio = max(ratios.values())
    if top_ratio == 0.0:
        empty = SelectionOutcome(frozenset(pool), (), 1.0, 0.0, (), None, 0.0)
        return {1.0: empty}
    sigma = 2.0 ** math.ceil(math.log2(top_ratio))

    out: dict[float, SelectionOutcome] = {}
    remaining = pool
    for _ in range(200):
        level_forest: list[Tree] = []
        level_trace: list[Tile] = []
        for j in active:
            # relative threshold: sigma is dimensionless, scaled by each norm
            run = select_trees(remaining, signals[j], j, sigma)
            level_forest.extend(run.forest)
            level_trace.extend(run.trace)
            remaining = sorted(run.residual)
        out[sigma] = SelectionOutcome(
            frozenset(remaining),
            tuple(level_forest),
            sigma,
            float(sum(t.time_length() for t in level_trace)),
            tuple(level_trace),
            None,
            0.0,
        )
        if not remaining:
            break
        if max(relative_sizes(remaining).values(), default=0.0) == 0.0:
            break
        sigma /= 2.0
    return out


def serialize_outcome(outcome: SelectionOutcome) -> str:
    """Structured text report: one tree per block with top, members, and the
    top interval length, followed by the residual tiles."""
    lines = [
        f"sigma: {outcome.sigma!r}",
        f"slot: {outcome.slot if outcome.slot is not None else 'merged'}",
        f"trees: {len(outcome.forest)}",
    ]
    for i, tree in enumerate(outcome.forest, start=1):
        lines.append(f"tree {i}:")
        lines.append(f"  top: {tree.top}")
        lines.append(f"  top_length: {tree.top_length()!r}")
        lines.append("  members:")
        for member in sorted(tree.members):
            lines.append(f"    {member}")
    lines.append("residual:")
    for tile in sorted(outcome.residual):
        lines.append(f"  {tile}")
    return "\n".join(lines) + "\n"
