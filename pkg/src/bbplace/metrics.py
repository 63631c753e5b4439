"""Wirelength, overlap and density measures on placements."""
from __future__ import annotations

import numpy as np

from . import kernels
from .netlist import Netlist, NetlistError, Placement

__all__ = [
    "Placement", "DensityGrid", "net_hpwl", "total_hpwl", "hinge_profile", "axis_cost_profile",
    "overlap_area", "overlap_area_naive", "density_grid", "density_overflow", "grid_positions",
]


def net_hpwl(net, placement: Placement) -> float:
    """HPWL of one net, given as a net index or an explicit pin-id array."""
    nl = placement.netlist
    pins = nl.net(int(net)) if np.isscalar(net) else np.asarray(net, dtype=np.int64)
    if len(pins) == 0:
        raise NetlistError("instance corrupted: net with zero pins")
    px, py = placement.pin_xy()
    qx, qy = px[pins], py[pins]
    return float((qx.max() - qx.min()) + (qy.max() - qy.min()))


def total_hpwl(placement: Placement) -> float:
    """Sum of net HPWLs, accumulated in net-id order."""
    nl = placement.netlist
    px, py = placement.pin_xy()
    return kernels.total_hpwl(nl.net_ptr, nl.net_pins, px, py)


def per_net_hpwl(placement: Placement) -> np.ndarray:
    nl = placement.netlist
    px, py = placement.pin_xy()
    return kernels.net_hpwl(nl.net_ptr, nl.net_pins, px, py)


def hinge_profile(lo, hi, coords, offsets=(0.0,)) -> np.ndarray:
    """Growth of the span ``[lo, hi]`` when pins at ``coords + offsets`` join it.

    ``coords`` is the swept reference position; ``offsets`` are the moving
    pins relative to it.  An empty span (``lo > hi``) costs nothing.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if lo > hi:
        return np.zeros_like(coords)
    offsets = np.asarray(offsets, dtype=np.float64)
    dmin, dmax = offsets.min(), offsets.max()
    return np.maximum(coords + dmax - hi, 0.0) + np.maximum(lo - coords - dmin, 0.0)


def grid_positions(netlist: Netlist, n: int, axis: str) -> np.ndarray:
    c = netlist.canvas
    if axis == "x":
        return c.x + np.arange(n) * (c.width / n)
    return c.y + np.arange(n) * (c.height / n)


def axis_cost_profile(net: int, moving_macro: int, axis: str, n: int, placement: Placement,
                      placed=None) -> np.ndarray:
    """Axis-span increase of ``net`` for each of ``n`` grid origins of a macro.

    ``placed`` masks which modules' pins count as the rest of the net
    (default: every module other than the moving one).
    """
    nl = placement.netlist
    pins = nl.net(net)
    owners = nl.pin_owner[pins]
    px, py = placement.pin_xy()
    coord = px if axis == "x" else py
    mine = owners == moving_macro
    other = ~mine
    if placed is not None:
        other &= np.asarray(placed, dtype=bool)[owners]
    grid = grid_positions(nl, n, axis)
    if not mine.any():
        return np.zeros(n)
    size = nl.width if axis == "x" else nl.height
    delta = nl.pin_dx if axis == "x" else nl.pin_dy
    offsets = 0.5 * size[moving_macro] + delta[pins[mine]]
    if not other.any():
        return np.zeros(n)
    vals = coord[pins[other]]
    return hinge_profile(vals.min(), vals.max(), grid, offsets)


# ---------------------------------------------------------------------------
# Overlap
# ---------------------------------------------------------------------------

def _rects(placement, ids):
    nl = placement.netlist
    ids = np.asarray(ids, dtype=np.int64)
    x0 = placement.x[ids]
    y0 = placement.y[ids]
    return x0, y0, x0 + nl.width[ids], y0 + nl.height[ids]


def overlap_area_naive(placement: Placement, ids) -> float:
    x0, y0, x1, y1 = _rects(placement, ids)
    total = 0.0
    for i in range(len(x0)):
        for j in range(i + 1, len(x0)):
            w = min(x1[i], x1[j]) - max(x0[i], x0[j])
            h = min(y1[i], y1[j]) - max(y0[i], y0[j])
            if w > 0 and h > 0:
                total += w * h
    return total


def overlap_area(placement: Placement, ids) -> float:
    """Sum of pairwise rectangle intersection areas among modules ``ids``.

    Sweeps along x so only pairs whose x-intervals overlap are visited.
    """
    x0, y0, x1, y1 = _rects(placement, ids)
    order = np.argsort(x0, kind="stable")
    x0, y0, x1, y1 = x0[order], y0[order], x1[order], y1[order]
    total = 0.0
    k = len(x0)
    for i in range(k):
        # candidates j > i whose left edge lies before i's right edge
        j_end = int(np.searchsorted(x0, x1[i], side="left"))
        if j_end <= i + 1:
            continue
        sl = slice(i + 1, j_end)
        w = np.minimum(x1[i], x1[sl]) - np.maximum(x0[i], x0[sl])
        h = np.minimum(y1[i], y1[sl]) - np.maximum(y0[i], y0[sl])
        m = (w > 0) & (h > 0)
        if m.any():
            total += float(np.sum(w[m] * h[m]))
    return total


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------

class DensityGrid:
    """Per-bin overlapped module area on a ``bins_x x bins_y`` canvas grid."""

    def __init__(self, netlist: Netlist, bins_x: int, bins_y: int):
        if bins_x < 1 or bins_y < 1:
            raise ValueError("need at least one bin per axis")
        c = netlist.canvas
        self.bins_x = bins_x
        self.bins_y = bins_y
        self.edges_x = c.x + np.arange(bins_x + 1) * (c.width / bins_x)
        self.edges_y = c.y + np.arange(bins_y + 1) * (c.height / bins_y)
        self.bin_w = c.width / bins_x
        self.bin_h = c.height / bins_y
        self.bin_area = self.bin_w * self.bin_h
        self.occupancy = np.zeros((bins_x, bins_y))

    def axis_overlap(self, lo, hi, axis):
        """(modules x bins) overlap lengths of intervals ``[lo, hi]``."""
        e = self.edges_x if axis == "x" else self.edges_y
        return np.clip(np.minimum(hi[:, None], e[None, 1:]) - np.maximum(lo[:, None], e[None, :-1]),
                       0.0, None)

    def accumulate(self, placement: Placement, ids) -> np.ndarray:
        nl = placement.netlist
        ids = np.asarray(ids, dtype=np.int64)
        ox = self.axis_overlap(placement.x[ids], placement.x[ids] + nl.width[ids], "x")
        oy = self.axis_overlap(placement.y[ids], placement.y[ids] + nl.height[ids], "y")
        return ox.T @ oy


def density_grid(placement: Placement, bins_x: int, bins_y: int, ids=None) -> DensityGrid:
    nl = placement.netlist
    if ids is None:
        ids = np.flatnonzero(nl.area > 0)
    g = DensityGrid(nl, bins_x, bins_y)
    g.occupancy = g.accumulate(placement, ids)
    return g


def density_overflow(placement: Placement, bins_x: int, bins_y: int, target: float,
                     movable=None) -> float:
    """Fraction of module area that exceeds ``target`` x bin capacity.

    With ``movable`` given, only those modules are counted and every other
    module with area becomes an obstacle that removes bin capacity (its
    covered area is taken out before applying ``target``).
    """
    if target <= 0:
        raise ValueError("target density must be positive")
    nl = placement.netlist
    if movable is None:
        ids = np.flatnonzero(nl.area > 0)
        g = density_grid(placement, bins_x, bins_y, ids)
        cap = target * g.bin_area
    else:
        ids = np.asarray(movable, dtype=np.int64)
        ids = ids[nl.area[ids] > 0]
        g = density_grid(placement, bins_x, bins_y, ids)
        cap = bin_capacity(placement, g, ids, target)
    total = float(nl.area[ids].sum())
    if total == 0:
        return 0.0
    return float(np.maximum(g.occupancy - cap, 0.0).sum() / total)


def bin_capacity(placement: Placement, grid: DensityGrid, movable, target: float) -> np.ndarray:
    nl = placement.netlist
    others = np.ones(nl.n_modules, dtype=bool)
    others[movable] = False
    others &= nl.area > 0
    blocked = grid.accumulate(placement, np.flatnonzero(others))
    return target * np.maximum(grid.bin_area - blocked, 0.0)
