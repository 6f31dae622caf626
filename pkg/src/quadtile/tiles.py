"""Combinatorial 4-tile geometry: tiles, grids, trees, axiom checks.

A tile is an integer triple (k, n, m) with k even.  It carries the time
interval [n/2**k, (n+1)/2**k) and four frequency intervals derived from the
dyadic frequency cell [2**(k+2) m, 2**(k+2) (m+1)):

  * slot 4: first quarter of the cell,
  * slots 1 and 2: third quarter of the cell (identical),
  * slot 3: the fixed band [9 * 2**k, 10 * 2**k).

All four slot intervals have length 2**k = 1/|I|.  Slots 1 and 4 are
separated by exactly one interval length, with slot 1 the higher one.
Restricting to even k makes frequency cells of different scales nest with
ratio >= 4, which is what the containment-propagation axiom needs.

Tiles are pure geometry: no grid size is involved here.  Whether a tile's
intervals fit a particular sampling grid is checked where packets are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Tile",
    "Tree",
    "make_tile",
    "is_grid",
    "order_lt",
    "maximal_tree",
    "tree_is_valid",
    "AxiomReport",
    "verify_axioms",
    "generate_tileset",
    "serialize_tiles",
    "parse_tiles",
]

SLOTS = (1, 2, 3, 4)
ORDER_SLOTS = (1, 4)


@dataclass(frozen=True, order=True)
class Tile:
    """Tile (k, n, m); use make_tile for the validated constructor."""

    k: int
    n: int
    m: int

    def time_interval(self) -> tuple[float, float]:
        h = 2.0 ** -self.k
        return (self.n * h, (self.n + 1) * h)

    def time_length(self) -> float:
        return 2.0 ** -self.k

    def frequency_cell(self) -> tuple[int, int]:
        size = 2 ** (self.k + 2)
        return (size * self.m, size * (self.m + 1))

    def freq_interval(self, slot: int) -> tuple[int, int]:
        quarter = 2 ** self.k
        lo, _ = self.frequency_cell()
        if slot in (1, 2):
            return (lo + 2 * quarter, lo + 3 * quarter)
        if slot == 4:
            return (lo, lo + quarter)
        if slot == 3:
            return (9 * quarter, 10 * quarter)
        raise ValueError(f"slot must be in {SLOTS}, got {slot}")

    def freq_center(self, slot: int) -> float:
        lo, hi = self.freq_interval(slot)
        return (lo + hi) / 2.0

    def __str__(self) -> str:
        return f"{self.k} {self.n} {self.m}"


def make_tile(k: int, n: int, m: int) -> Tile:
    """Validated tile constructor: k even and >= 2, n in [0, 2**k)."""
    if k % 2 != 0:
        raise ValueError(f"tile scale must be even (sparsified scales), got k={k}")
    if k < 2:
        raise ValueError(f"tile scale must be >= 2, got k={k}")
    if not 0 <= n < 2 ** k:
        raise ValueError(f"spatial index n={n} outside [0, 2**{k})")
    return Tile(int(k), int(n), int(m))


@dataclass(frozen=True)
class Tree:
    """Tile subset with a distinguished top; kind is '1', '4' or 'union'."""

    members: frozenset
    top: Tile
    kind: str

    def time_interval(self) -> tuple[float, float]:
        return self.top.time_interval()

    def top_length(self) -> float:
        return self.top.time_length()

    def __len__(self) -> int:
        return len(self.members)


# ---------------------------------------------------------------------------
# Interval predicates
# ---------------------------------------------------------------------------

def _contains(outer: tuple[float, float], inner: tuple[float, float]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _intersects(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def is_grid(intervals: Iterable[tuple[float, float]]) -> bool:
    """True iff in every intersecting pair of distinct intervals one contains
    the other and is at least twice as long."""
    items = list(dict.fromkeys((float(a), float(b)) for a, b in intervals))
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            if not _intersects(a, b):
                continue
            la, lb = a[1] - a[0], b[1] - b[0]
            big, small = (a, b) if la >= lb else (b, a)
            if not _contains(big, small):
                return False
            if (big[1] - big[0]) < 2 * (small[1] - small[0]):
                return False
    return True


def order_lt(s: Tile, t: Tile, slot: int) -> bool:
    """Tile order for slot j: time interval of s inside t's, frequency
    interval of s containing t's.  Containment is non-strict, so the
    relation is reflexive."""
    if slot not in ORDER_SLOTS:
        raise ValueError(f"order is defined for slots {ORDER_SLOTS}, got {slot}")
    if not _contains(t.time_interval(), s.time_interval()):
        return False
    return _contains(s.freq_interval(slot), t.freq_interval(slot))


def maximal_tree(tiles: Iterable[Tile], top: Tile, slot: int) -> Tree:
    """Largest slot-j tree inside the given set with the given top."""
    pool = set(tiles)
    if top not in pool:
        raise ValueError(f"top {top} is not a member of the tile set")
    members = frozenset(s for s in pool if order_lt(s, top, slot))
    return Tree(members, top, str(slot))


def union_tree(tiles: Iterable[Tile], top: Tile) -> Tree:
    """Union of the maximal 1-tree and the maximal 4-tree with the same top."""
    pool = set(tiles)
    t1 = maximal_tree(pool, top, 1)
    t4 = maximal_tree(pool, top, 4)
    return Tree(t1.members | t4.members, top, "union")


def tree_is_valid(tree: Tree) -> bool:
    """Check the membership law for the tree's declared kind."""
    if tree.top not in tree.members:
        return False
    if tree.kind in ("1", "4"):
        slot = int(tree.kind)
        return all(order_lt(s, tree.top, slot) for s in tree.members)
    if tree.kind == "union":
        return all(
            order_lt(s, tree.top, 1) or order_lt(s, tree.top, 4)
            for s in tree.members
        )
    return False


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------

AXIOM_NAMES = (
    "slots-1-2-identical",
    "slot-lengths-match-time",
    "slot-separation",
    "slot-center-order",
    "time-grid",
    "frequency-grid",
    "containment-propagation",
)


@dataclass
class AxiomReport:
    passed: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.passed.values())

    def summary(self) -> str:
        lines = []
        for name in AXIOM_NAMES:
            status = "pass" if self.passed[name] else "FAIL"
            extra = ""
            if name in self.counterexamples:
                extra = f"  counterexample: {self.counterexamples[name]}"
            lines.append(f"{name}: {status}{extra}")
        return "\n".join(lines)


def verify_axioms(tiles: Sequence[Tile]) -> AxiomReport:
    """Check the seven geometric tile-set properties.

    The last one is the implementable strengthening of the containment
    axiom: a slot-1 or slot-4 interval of one tile properly inside a
    slot-1/4 interval of another forces the whole frequency cell inside.
    """
    report = AxiomReport()
    tiles = list(tiles)
    for name in AXIOM_NAMES:
        report.passed[name] = True
    if not tiles:
        return report

    for s in tiles:
        if s.freq_interval(1) != s.freq_interval(2):
            report.passed["slots-1-2-identical"] = False
            report.counterexamples.setdefault("slots-1-2-identical", (s,))
        lengths = {s.freq_interval(j)[1] - s.freq_interval(j)[0] for j in (1, 3, 4)}
        if lengths != {2 ** s.k}:
            report.passed["slot-lengths-match-time"] = False
            report.counterexamples.setdefault("slot-lengths-match-time", (s,))
        lo1, hi1 = s.freq_interval(1)
        lo4, hi4 = s.freq_interval(4)
        if lo1 - hi4 != hi1 - lo1:
            report.passed["slot-separation"] = False
            report.counterexamples.setdefault("slot-separation", (s,))
        if not s.freq_center(1) > s.freq_center(4):
            report.passed["slot-center-order"] = False
            report.counterexamples.setdefault("slot-center-order", (s,))

    if not is_grid(s.time_interval() for s in tiles):
        report.passed["time-grid"] = False
    if not is_grid(
        (float(lo), float(hi)) for lo, hi in (s.frequency_cell() for s in tiles)
    ):
        report.passed["frequency-grid"] = False

    # containment propagation, vectorized over ordered pairs
    los = {j: np.array([s.freq_interval(j)[0] for s in tiles]) for j in (1, 4)}
    his = {j: np.array([s.freq_interval(j)[1] for s in tiles]) for j in (1, 4)}
    cell_lo = np.array([s.frequency_cell()[0] for s in tiles])
    cell_hi = np.array([s.frequency_cell()[1] for s in tiles])
    for i_slot in (1, 4):
        for j_slot in (1, 4):
            inside = (los[i_slot][:, None] >= los[j_slot][None, :]) & (
                his[i_slot][:, None] <= his[j_slot][None, :]
            )
            proper = inside & (
                (los[i_slot][:, None] > los[j_slot][None, :])
                | (his[i_slot][:, None] < his[j_slot][None, :])
            )
            cell_in = (cell_lo[:, None] >= los[j_slot][None, :]) & (
                cell_hi[:, None] <= his[j_slot][None, :]
            )
            bad = proper & ~cell_in
            if bad.any():
                i, j = np.argwhere(bad)[0]
                report.passed["containment-propagation"] = False
                report.counterexamples.setdefault(
                    "containment-propagation",
                    (tiles[int(i)], tiles[int(j)], i_slot, j_slot),
                )
    return report


# ---------------------------------------------------------------------------
# Generation and serialization
# ---------------------------------------------------------------------------

def admissible_tile_scales(n_grid: int) -> list[int]:
    """Even scales whose four slot intervals all fit a grid of size n_grid
    (the slot-3 band [9*2**k, 10*2**k) is the binding constraint)."""
    out = []
    k = 2
    while 20 * 2 ** k <= n_grid and 8 * 2 ** k <= n_grid:
        out.append(k)
        k += 2
    return out


def cell_index_range(k: int, n_grid: int) -> range:
    """Frequency cell indices m with the whole cell inside [-n_grid/2, n_grid/2)."""
    size = 2 ** (k + 2)
    half = n_grid // 2
    lo = -(half // size)
    hi = half // size  # exclusive
    return range(lo, hi)


def generate_tileset(
    count: int,
    k_values: Sequence[int],
    seed: int,
    n_grid: int = 4096,
) -> list[Tile]:
    """Deterministic random tile set; every tile fits the given grid and the
    result passes verify_axioms by construction."""
    k_values = sorted(set(int(k) for k in k_values))
    allowed = admissible_tile_scales(n_grid)
    bad = [k for k in k_values if k not in allowed]
    if bad:
        raise ValueError(
            f"scales {bad} not admissible at n_grid={n_grid}; allowed: {allowed}"
        )
    if count == 0:
        return []
    if not k_values:
        raise ValueError("need at least one scale to generate tiles")
    space = sum(2 ** k * len(cell_index_range(k, n_grid)) for k in k_values)
    if count > space:
        raise ValueError(f"requested {count} tiles but only {space} exist")
    rng = np.random.default_rng(seed)
    chosen: set[Tile] = set()
    attempts = 0
    while len(chosen) < count:
        attempts += 1
        if attempts > 200 * count:
            raise ValueError("tile generation failed to reach requested count")
        k = int(rng.choice(k_values))
        n = int(rng.integers(0, 2 ** k))
        m_range = cell_index_range(k, n_grid)
        m = int(rng.integers(m_range.start, m_range.stop))
        chosen.add(make_tile(k, n, m))
    return sorted(chosen)


def generate_clustered_tileset(
    count: int,
    seed: int,
    n_grid: int = 4096,
    k_anchor: int = 2,
) -> list[Tile]:
    """Random tile set biased toward tree structure: anchors plus descendants
    two scales finer that sit under them in the slot-1 or slot-4 order."""
    rng = np.random.default_rng(seed)
    allowed = admissible_tile_scales(n_grid)
    if k_anchor not in allowed or k_anchor + 2 not in allowed:
        raise ValueError(f"clustered generation needs scales {k_anchor},{k_anchor + 2}")
    chosen: set[Tile] = set()
    attempts = 0
    while len(chosen) < count:
        attempts += 1
        if attempts > 500 * count:
            break
        m_range = cell_index_range(k_anchor, n_grid)
        # anchors at cell indices divisible by 4 admit slot-4 descendants;
        # indices congruent to 2 mod 4 admit slot-1 descendants
        kind = int(rng.integers(0, 2))
        candidates = [m for m in m_range if m % 4 == (0 if kind == 0 else 2) % 4]
        if not candidates:
            continue
        m_t = int(rng.choice(candidates))
        n_t = int(rng.integers(0, 2 ** k_anchor))
        anchor = make_tile(k_anchor, n_t, m_t)
        chosen.add(anchor)
        k = k_anchor + 2
        for _ in range(int(rng.integers(1, 4))):
            n = int(rng.integers(4 * n_t, 4 * n_t + 4))
            if kind == 0:
                m = m_t // 4
            else:
                m = (4 * m_t - 8) // 16
            if m in cell_index_range(k, n_grid):
                chosen.add(make_tile(k, n, m))
            if len(chosen) >= count:
                break
    return sorted(chosen)[:count]


def serialize_tiles(tiles: Iterable[Tile]) -> str:
    """One 'k n m' line per tile, sorted; the format is order-insensitive."""
    return "".join(f"{t.k} {t.n} {t.m}\n" for t in sorted(set(tiles)))


def parse_tiles(text: str) -> list[Tile]:
    """Parse the line-oriented 'k n m' format (blank lines and # comments ok)."""
    tiles = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'k n m', got {raw!r}")
        try:
            k, n, m = (int(p) for p in parts)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from exc
        tiles.add(make_tile(k, n, m))
    return sorted(tiles)
