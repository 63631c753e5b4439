"""Sequence-pair encoding of macro placements.

Macro ``i`` is left of ``j`` when it precedes ``j`` in both permutations
and below ``j`` when it follows ``j`` in ``pi_plus`` but precedes it in
``pi_minus``.  Decoding packs macros against the canvas origin by
longest-path (heaviest common subsequence) evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .netlist import Netlist, Placement


@dataclass
class SpGenotype:
    pi_plus: np.ndarray
    pi_minus: np.ndarray

    def __post_init__(self):
        self.pi_plus = np.asarray(self.pi_plus, dtype=np.int64)
        self.pi_minus = np.asarray(self.pi_minus, dtype=np.int64)
        k = len(self.pi_plus)
        ref = np.arange(k)
        if len(self.pi_minus) != k or not (np.array_equal(np.sort(self.pi_plus), ref)
                                           and np.array_equal(np.sort(self.pi_minus), ref)):
            raise ValueError("sequence pair must hold two permutations of 0..k-1")

    @property
    def k(self) -> int:
        return len(self.pi_plus)

    def copy(self) -> "SpGenotype":
        return SpGenotype(self.pi_plus.copy(), self.pi_minus.copy())

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.pi_plus, self.pi_minus])

    @classmethod
    def from_array(cls, arr) -> "SpGenotype":
        arr = np.asarray(arr, dtype=np.int64)
        k = len(arr) // 2
        return cls(arr[:k], arr[k:])


def random_sp(k: int, seed=None) -> SpGenotype:
    if k < 1:
        raise ValueError("k must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SpGenotype(rng.permutation(k), rng.permutation(k))


def weighted_lcs(order_a, order_b, weights) -> np.ndarray:
    """Weight of the heaviest common subsequence strictly before each element."""
    order_a = np.asarray(order_a, dtype=np.int64)
    order_b = np.asarray(order_b, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if not (len(order_a) == len(order_b) == len(weights)):
        raise ValueError("orders and weights must have equal length")
    return kernels.weighted_lcs(order_a, order_b, weights)


def pack(genotype: SpGenotype, widths, heights) -> tuple[np.ndarray, np.ndarray]:
    """Tight packing offsets (relative to the origin) of each macro index."""
    x = weighted_lcs(genotype.pi_plus, genotype.pi_minus, widths)
    y = weighted_lcs(genotype.pi_plus[::-1], genotype.pi_minus, heights)
    return x, y


@dataclass
class SpDecode:
    placement: Placement
    bbox_w: float
    bbox_h: float
    exceed_area: float

    @property
    def feasible(self) -> bool:
        return self.exceed_area <= 0


def decode_sp_full(genotype: SpGenotype, netlist: Netlist, base: Placement | None = None) -> SpDecode:
    macros = netlist.macro_ids
    if genotype.k != len(macros):
        raise ValueError(f"genotype has {genotype.k} macros, netlist designates {len(macros)}")
    w = netlist.width[macros]
    h = netlist.height[macros]
    ox, oy = pack(genotype, w, h)
    pl = (base or netlist.initial_placement(seed=0)).copy()
    c = netlist.canvas
    pl.x[macros] = c.x + ox
    pl.y[macros] = c.y + oy
    bw = float((ox + w).max()) if len(macros) else 0.0
    bh = float((oy + h).max()) if len(macros) else 0.0
    inside = min(bw, c.width) * min(bh, c.height)
    return SpDecode(pl, bw, bh, bw * bh - inside)


def decode_sp(genotype: SpGenotype, netlist: Netlist, base: Placement | None = None) -> Placement:
    """Packed, overlap-free macro placement; other modules keep ``base`` coordinates."""
    return decode_sp_full(genotype, netlist, base).placement


def penalty_weight(netlist: Netlist) -> float:
    """Worst-fitness scale shared by the decoders (10 x canvas half-perimeter)."""
    return 10.0 * netlist.canvas.half_perimeter
