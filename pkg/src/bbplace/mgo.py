"""Mask-guided decoding of real macro coordinates into legal placements.

Macros are visited in descending order of the area they are connected to.
Each one is moved to the free grid cell of least incremental wirelength,
breaking ties by distance to the coordinate proposed in the genotype.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import kernels
from .metrics import hinge_profile
from .netlist import Netlist, Placement

DEFAULT_GRID = 64
TIE_RTOL = 1e-9


@dataclass
class MgoGenotype:
    """Proposed lower-left coordinates, ``coords[2i:2i+2]`` for macro ``i``."""

    coords: np.ndarray

    @classmethod
    def clamped(cls, coords, netlist: Netlist) -> "MgoGenotype":
        lo, hi = bounds(netlist)
        return cls(np.clip(np.asarray(coords, dtype=np.float64), lo, hi))


def bounds(netlist: Netlist) -> tuple[np.ndarray, np.ndarray]:
    c = netlist.canvas
    k = netlist.n_macros
    lo = np.tile([c.x, c.y], k).astype(np.float64)
    hi = np.tile([c.x + c.width, c.y + c.height], k).astype(np.float64)
    return lo, hi


def macro_order(netlist: Netlist) -> np.ndarray:
    """Macro ids sorted by descending connected area (ties: lower id).

    The connected area of a macro sums the areas of the distinct other
    modules that share at least one net with it.
    """
    macros = netlist.macro_ids
    if len(macros) == 0:
        return macros.copy()
    inc = sparse.csr_matrix(
        (np.ones(netlist.n_pins), (netlist.pin_owner, netlist.pin_net)),
        shape=(netlist.n_modules, netlist.n_nets),
    )
    reach = (inc[macros] @ inc.T).tocsr()
    reach.data[:] = 1.0
    reach = reach.tolil()
    for r, m in enumerate(macros):
        reach[r, m] = 0.0
    connected = np.asarray(reach.tocsr() @ netlist.area).ravel()
    order = np.lexsort((macros, -connected))
    return macros[order]


def footprint(size, cell) -> int:
    return max(1, int(math.ceil(size / cell - 1e-9)))


class OccupancyGrid:
    """``n x n`` flags of cells taken by fixed objects or placed macros (``[gx, gy]``)."""

    def __init__(self, n: int):
        self.n = n
        self.occupied = np.zeros((n, n), dtype=np.uint8)

    def mark_rect(self, x0, y0, x1, y1, cw, ch):
        """Mark every cell touched by the rectangle (coords relative to the canvas)."""
        n = self.n
        a = max(0, int(math.floor(x0 / cw + 1e-9)))
        b = min(n, int(math.ceil(x1 / cw - 1e-9)))
        c = max(0, int(math.floor(y0 / ch + 1e-9)))
        d = min(n, int(math.ceil(y1 / ch - 1e-9)))
        if a < b and c < d:
            self.occupied[a:b, c:d] = 1

    def free_windows(self, fw: int, fh: int) -> np.ndarray:
        """Full-size (n x n) mask of origins whose ``fw x fh`` footprint is free and in bounds."""
        n = self.n
        out = np.zeros((n, n), dtype=bool)
        if fw > n or fh > n:
            return out
        s = np.zeros((n + 1, n + 1), dtype=np.int64)
        np.cumsum(np.cumsum(self.occupied, axis=0, dtype=np.int64), axis=1, out=s[1:, 1:])
        win = s[fw:, fh:] - s[:-fw, fh:] - s[fw:, :-fh] + s[:-fw, :-fh]
        out[: n - fw + 1, : n - fh + 1] = win == 0
        return out


@dataclass
class WireMask:
    n: int
    cell_w: float
    cell_h: float
    cost: np.ndarray
    feasible: np.ndarray

    def best_cells(self, rtol=TIE_RTOL) -> np.ndarray:
        if not self.feasible.any():
            return np.zeros_like(self.feasible)
        best = self.cost[self.feasible].min()
        return self.feasible & (self.cost <= best + rtol * (1.0 + abs(best)))


class MgoDecoder:
    """Precomputed net incidence, fixed occupancy and net boxes for one netlist."""

    def __init__(self, netlist: Netlist, n: int = DEFAULT_GRID, backend=None):
        self.netlist = netlist
        self.n = n
        self.kernels = kernels.get_backend(backend)
        c = netlist.canvas
        self.cw = c.width / n
        self.ch = c.height / n
        macros = netlist.macro_ids
        k = len(macros)
        self.order = macro_order(netlist)
        pos = np.full(netlist.n_modules, -1, dtype=np.int64)
        pos[macros] = np.arange(k)
        self.order_idx = pos[self.order]
        self.fw = np.array([footprint(w, self.cw) for w in netlist.width[macros]], dtype=np.int64)
        self.fh = np.array([footprint(h, self.ch) for h in netlist.height[macros]], dtype=np.int64)

        # per macro: one entry per touched net with the span of its pin offsets
        ptr = [0]
        nets, oxa, oxb, oya, oyb = [], [], [], [], []
        pin_net = netlist.pin_net
        for m in macros:
            pins = netlist.module_pins(int(m))
            if len(pins):
                ox = 0.5 * netlist.width[m] + netlist.pin_dx[pins]
                oy = 0.5 * netlist.height[m] + netlist.pin_dy[pins]
                pn = pin_net[pins]
                for e in np.unique(pn):
                    sel = pn == e
                    nets.append(int(e))
                    oxa.append(ox[sel].min())
                    oxb.append(ox[sel].max())
                    oya.append(oy[sel].min())
                    oyb.append(oy[sel].max())
            ptr.append(len(nets))
        self.mn_ptr = np.array(ptr, dtype=np.int64)
        self.mn_net = np.array(nets, dtype=np.int64)
        self.oxmin = np.array(oxa, dtype=np.float64)
        self.oxmax = np.array(oxb, dtype=np.float64)
        self.oymin = np.array(oya, dtype=np.float64)
        self.oymax = np.array(oyb, dtype=np.float64)

        fixed = netlist.fixed
        base = netlist.initial_placement(seed=0)
        self.base = base
        px, py = base.pin_xy()
        E = netlist.n_nets
        self.lo_x = np.full(E, np.inf)
        self.hi_x = np.full(E, -np.inf)
        self.lo_y = np.full(E, np.inf)
        self.hi_y = np.full(E, -np.inf)
        fp = np.flatnonzero(fixed[netlist.pin_owner])
        if len(fp):
            e = pin_net[fp]
            np.minimum.at(self.lo_x, e, px[fp] - c.x)
            np.maximum.at(self.hi_x, e, px[fp] - c.x)
            np.minimum.at(self.lo_y, e, py[fp] - c.y)
            np.maximum.at(self.hi_y, e, py[fp] - c.y)

        self.occ0 = OccupancyGrid(n)
        for m in np.flatnonzero(fixed & (netlist.area > 0)):
            self.occ0.mark_rect(base.x[m] - c.x, base.y[m] - c.y,
                                base.x[m] + netlist.width[m] - c.x,
                                base.y[m] + netlist.height[m] - c.y, self.cw, self.ch)

    def decode_grid(self, coords) -> tuple[np.ndarray, np.ndarray]:
        """Grid indices per macro (macro_ids order); ``-1`` marks an unplaceable macro."""
        c = self.netlist.canvas
        coords = np.asarray(coords, dtype=np.float64)
        k = len(self.fw)
        if coords.shape != (2 * k,):
            raise ValueError(f"genotype needs {2 * k} coordinates, got {coords.shape}")
        tx = coords[0::2] - c.x
        ty = coords[1::2] - c.y
        return self.kernels.mgo_decode(
            self.order_idx, self.fw, self.fh, self.mn_ptr, self.mn_net,
            self.oxmin, self.oxmax, self.oymin, self.oymax,
            self.lo_x.copy(), self.hi_x.copy(), self.lo_y.copy(), self.hi_y.copy(),
            self.occ0.occupied.copy(), tx, ty, self.cw, self.ch, self.n, TIE_RTOL,
        )

    def decode(self, coords, base: Placement | None = None) -> tuple[Placement, bool]:
        gx, gy = self.decode_grid(coords)
        nl = self.netlist
        c = nl.canvas
        pl = (base or self.base).copy()
        macros = nl.macro_ids
        ok = bool(np.all(gx >= 0))
        coords = np.asarray(coords, dtype=np.float64)
        pl.x[macros] = np.where(gx >= 0, c.x + gx * self.cw, coords[0::2])
        pl.y[macros] = np.where(gy >= 0, c.y + gy * self.ch, coords[1::2])
        return pl, ok


def decode_mgo(genotype, netlist: Netlist, n: int = DEFAULT_GRID, backend=None) -> Placement:
    """Legal macro placement for a coordinate genotype.

    Raises ``InfeasibleDecode`` if some macro has no free cell; the
    harness turns that into the worst fitness instead.
    """
    coords = genotype.coords if isinstance(genotype, MgoGenotype) else genotype
    pl, ok = MgoDecoder(netlist, n, backend).decode(coords)
    if not ok:
        raise InfeasibleDecode("no free grid cell for at least one macro")
    return pl


class InfeasibleDecode(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Step-by-step API (wire masks for one macro at a time)
# ---------------------------------------------------------------------------

class MgoState:
    """Partial decode: which macros are placed, where, and the occupancy grid."""

    def __init__(self, netlist: Netlist, n: int = DEFAULT_GRID):
        self.decoder = MgoDecoder(netlist, n, backend="python")
        self.netlist = netlist
        self.n = n
        self.placement = self.decoder.base.copy()
        self.placed = netlist.fixed.copy()
        self.occupancy = OccupancyGrid(n)
        self.occupancy.occupied[:] = self.decoder.occ0.occupied

    def place(self, macro: int, gx: int, gy: int):
        d = self.decoder
        c = self.netlist.canvas
        i = int(np.flatnonzero(self.netlist.macro_ids == macro)[0])
        self.placement.x[macro] = c.x + gx * d.cw
        self.placement.y[macro] = c.y + gy * d.ch
        self.occupancy.occupied[gx:gx + d.fw[i], gy:gy + d.fh[i]] = 1
        self.placed[macro] = True


def build_wire_mask(state: MgoState, macro: int) -> WireMask:
    """Incremental-HPWL mask for ``macro`` given the macros placed so far."""
    nl = state.netlist
    d = state.decoder
    n = state.n
    i = int(np.flatnonzero(nl.macro_ids == macro)[0])
    px, py = state.placement.pin_xy()
    c = nl.canvas
    gx = np.arange(n) * d.cw
    gy = np.arange(n) * d.ch
    cx = np.zeros(n)
    cy = np.zeros(n)
    pin_net = nl.pin_net
    for e in np.unique(pin_net[nl.module_pins(macro)]):
        pins = nl.net(e)
        owners = nl.pin_owner[pins]
        mine = owners == macro
        other = ~mine & state.placed[owners]
        if not other.any():
            continue
        offx = 0.5 * nl.width[macro] + nl.pin_dx[pins[mine]]
        offy = 0.5 * nl.height[macro] + nl.pin_dy[pins[mine]]
        ox = px[pins[other]] - c.x
        oy = py[pins[other]] - c.y
        cx += hinge_profile(ox.min(), ox.max(), gx, offx)
        cy += hinge_profile(oy.min(), oy.max(), gy, offy)
    feasible = state.occupancy.free_windows(int(d.fw[i]), int(d.fh[i]))
    return WireMask(n, d.cw, d.ch, cx[:, None] + cy[None, :], feasible)


def select_cell(mask: WireMask, target_xy, canvas) -> tuple[int, int]:
    """Best cell of ``mask``; ties by distance of cell center to ``target_xy``, then row-major."""
    tied = mask.best_cells()
    if not tied.any():
        raise InfeasibleDecode("no feasible cell")
    n = mask.n
    cxs = canvas.x + (np.arange(n) + 0.5) * mask.cell_w
    cys = canvas.y + (np.arange(n) + 0.5) * mask.cell_h
    ddx = cxs - target_xy[0]
    ddy = cys - target_xy[1]
    d2 = np.where(tied, ddx[:, None] ** 2 + ddy[None, :] ** 2, np.inf)
    return divmod(int(np.argmin(d2)), n)
