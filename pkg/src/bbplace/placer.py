"""A small analytical placer.

Minimizes smoothed wirelength plus ``lam * density_penalty`` by first-order
steps.  The density weight ``lam`` follows a RePlAce-style multiplier
driven by the true HPWL change between updates.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import ndimage

from .metrics import DensityGrid, bin_capacity, density_overflow, total_hpwl
from .netlist import Netlist, Placement


log = logging.getLogger(__name__)

WIRELENGTH_MODELS = ("weighted_average", "logsumexp")
OPTIMIZERS = ("adam", "nesterov")


@dataclass
class PlacerConfig:
    """Placer knobs, in canvas units unless noted.

    ``learning_rate`` is a fraction of the larger canvas side moved per step.
    ``density_weight`` scales the initial multiplier relative to the ratio
    of wirelength to density gradient norms.  ``lambda_update_every`` and
    ``inner_iters`` may be fractional; they are rounded to counts.
    """

    bins_x: int = 32
    bins_y: int = 32
    optimizer: str = "adam"
    wirelength_model: str = "weighted_average"
    learning_rate: float = 0.01
    lr_decay: float = 0.998
    density_weight: float = 8e-5
    gamma: float = 4.0
    target_density: float = 1.0
    stop_overflow: float = 0.07
    lower_pcof: float = 0.95
    upper_pcof: float = 1.05
    ref_hpwl: float = 350000.0
    lambda_update_every: float = 1.0
    inner_iters: float = 1.0
    max_iters: int = 1000

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        if self.wirelength_model not in WIRELENGTH_MODELS:
            raise ValueError(f"wirelength_model must be one of {WIRELENGTH_MODELS}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not (0 < self.lower_pcof <= 1 <= self.upper_pcof):
            raise ValueError("need 0 < lower_pcof <= 1 <= upper_pcof")
        if self.bins_x < 1 or self.bins_y < 1:
            raise ValueError("bins must be positive")
        if self.target_density <= 0:
            raise ValueError("target_density must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")

    @property
    def lambda_period(self) -> int:
        return max(1, int(math.floor(self.lambda_update_every + 0.5)))

    @property
    def inner_steps(self) -> int:
        return max(1, int(math.floor(self.inner_iters + 0.5)))

    @classmethod
    def for_netlist(cls, netlist: Netlist, **overrides) -> "PlacerConfig":
        """Defaults sized to the instance: bins no wider than a typical movable
        module (cells strictly inside a bin feel no density force) and at
        least about one bin per module; gamma = 2 bins."""
        c = netlist.canvas
        mov = ~netlist.fixed
        side = np.sqrt(netlist.width[mov] * netlist.height[mov]) if mov.any() else np.zeros(0)
        side = float(np.median(side[side > 0])) if np.any(side > 0) else 0.0
        base = math.ceil(math.sqrt(max(netlist.n_modules, 1)))
        nb = []
        for extent in (c.width, c.height):
            n = max(base, math.ceil(extent / side)) if side > 0 else base
            nb.append(int(np.clip(n, 4, 128)))
        gamma = 2.0 * 0.5 * (c.width / nb[0] + c.height / nb[1])
        ref = max(1.0, 0.1 * total_hpwl(netlist.initial_placement(seed=0)))
        cfg = dict(bins_x=nb[0], bins_y=nb[1], gamma=gamma, ref_hpwl=ref)
        cfg.update(overrides)
        return cls(**cfg)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_(self, **kw) -> "PlacerConfig":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# Smoothed wirelength
# ---------------------------------------------------------------------------

class _NetIndex:
    """Pins grouped by net for segment reductions."""

    def __init__(self, netlist: Netlist):
        self.pins = netlist.net_pins
        self.starts = netlist.net_ptr[:-1]
        self.deg = netlist.net_degrees()
        self.owner = netlist.pin_owner[self.pins]
        self.n_modules = netlist.n_modules


def _axis_terms(p, idx: _NetIndex, gamma, model, want_grad):
    """Per-net smoothed span on one axis and (optionally) per-pin gradient."""
    st, deg = idx.starts, idx.deg
    pmax = np.maximum.reduceat(p, st)
    pmin = np.minimum.reduceat(p, st)
    ep = np.exp((p - np.repeat(pmax, deg)) / gamma)
    em = np.exp((np.repeat(pmin, deg) - p) / gamma)
    sp = np.add.reduceat(ep, st)
    sm = np.add.reduceat(em, st)
    if model == "logsumexp":
        val = gamma * np.log(sp) + pmax + gamma * np.log(sm) - pmin
        if not want_grad:
            return val, None
        grad = ep / np.repeat(sp, deg) - em / np.repeat(sm, deg)
        return val, grad
    tp = np.add.reduceat(p * ep, st)
    tm = np.add.reduceat(p * em, st)
    wmax = tp / sp
    wmin = tm / sm
    val = wmax - wmin
    if not want_grad:
        return val, None
    gp = ep / np.repeat(sp, deg) * (1.0 + (p - np.repeat(wmax, deg)) / gamma)
    gm = em / np.repeat(sm, deg) * (1.0 - (p - np.repeat(wmin, deg)) / gamma)
    return val, gp - gm


def net_smoothed_wl(placement: Placement, gamma: float, model: str = "weighted_average"):
    """Per-net, per-axis smoothed spans: arrays ``(x_terms, y_terms)``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    nl = placement.netlist
    if nl.n_nets == 0:
        return np.zeros(0), np.zeros(0)
    idx = _NetIndex(nl)
    px, py = placement.pin_xy()
    vx, _ = _axis_terms(px[idx.pins], idx, gamma, model, False)
    vy, _ = _axis_terms(py[idx.pins], idx, gamma, model, False)
    return vx, vy


def smoothed_wl(placement: Placement, gamma: float, model: str = "weighted_average") -> float:
    vx, vy = net_smoothed_wl(placement, gamma, model)
    return float(vx.sum() + vy.sum())


def smoothed_wl_grad(placement: Placement, gamma: float, model: str = "weighted_average",
                     movable=None):
    """Gradient of ``smoothed_wl`` w.r.t. lower-left module coordinates.

    Returns ``(gx, gy)`` over all modules; entries of non-movable modules
    are zero.
    """
    val, gx, gy = _wl_value_grad(placement, _NetIndex(placement.netlist), gamma, model)
    mov = _movable_mask(placement.netlist, movable)
    gx[~mov] = 0.0
    gy[~mov] = 0.0
    return gx, gy


def _movable_mask(netlist, movable):
    if movable is None:
        return ~netlist.fixed
    mask = np.zeros(netlist.n_modules, dtype=bool)
    mask[np.asarray(movable, dtype=np.int64)] = True
    return mask


def _wl_value_grad(placement, idx: _NetIndex, gamma, model):
    n = idx.n_modules
    if len(idx.starts) == 0:
        return 0.0, np.zeros(n), np.zeros(n)
    px, py = placement.pin_xy()
    vx, gpx = _axis_terms(px[idx.pins], idx, gamma, model, True)
    vy, gpy = _axis_terms(py[idx.pins], idx, gamma, model, True)
    gx = np.bincount(idx.owner, weights=gpx, minlength=n)
    gy = np.bincount(idx.owner, weights=gpy, minlength=n)
    return float(vx.sum() + vy.sum()), gx, gy


# ---------------------------------------------------------------------------
# Density penalty
# ---------------------------------------------------------------------------

def _overlap_deriv(lo, hi, edges):
    """d(overlap length)/d(lo) for intervals shifted rigidly, (modules x bins)."""
    e0 = edges[None, :-1]
    e1 = edges[None, 1:]
    lo = lo[:, None]
    hi = hi[:, None]
    ov = np.minimum(hi, e1) - np.maximum(lo, e0)
    d = (hi < e1).astype(np.float64) - (lo > e0).astype(np.float64)
    return np.where(ov > 0, d, 0.0)


def _escape_depth(cap, room):
    """Distance in bins from each bin with less than ``room`` capacity to the nearest roomy bin."""
    full = cap < room
    if not full.any() or full.all():
        return np.zeros_like(cap)
    return ndimage.distance_transform_edt(full)


class _Density:
    """Hard-bin density penalty.  ``spread`` adds the placer's aids: escape
    slopes in blocked bins, stretched small footprints, wall folding and
    coarser grid levels."""

    def __init__(self, placement: Placement, bins_x, bins_y, target, movable, spread=False, levels=True):
        nl = placement.netlist
        self.grid = DensityGrid(nl, bins_x, bins_y)
        mov = np.asarray(movable, dtype=np.int64)
        self.ids = mov[nl.area[mov] > 0]
        self.w = nl.width[self.ids]
        self.h = nl.height[self.ids]
        # footprint offset from the module's lower-left corner and density scale
        self.sx = np.zeros(len(self.ids))
        self.sy = np.zeros(len(self.ids))
        self.scale = np.ones(len(self.ids))
        self.fold = spread
        self.levels = []
        self.cap = bin_capacity(placement, self.grid, self.ids, target)
        if spread:
            # inside a large blockage every bin is equally full and the penalty
            # is flat; deeper bins get less capacity so buried modules slide out
            a = self.grid.bin_area
            self.cap = self.cap - a * _escape_depth(self.cap, 0.5 * target * a)
            # a module inside a single bin sees a flat penalty; spread small
            # modules over sqrt(2) bins per axis at reduced density
            w = np.maximum(self.w, math.sqrt(2.0) * self.grid.bin_w)
            h = np.maximum(self.h, math.sqrt(2.0) * self.grid.bin_h)
            self.sx = 0.5 * (self.w - w)
            self.sy = 0.5 * (self.h - h)
            self.scale = (self.w * self.h) / (w * h)
            self.w, self.h = w, h
            # the same penalty on coarser grids sees past blockage walls and
            # drains pockets that are full at the finest level
            bx, by = bins_x // 2, bins_y // 2
            while levels and min(bx, by) >= 4:
                self.levels.append(_Density(placement, bx, by, target, movable, spread=True, levels=False))
                bx, by = bx // 2, by // 2

    def _axis(self, lo, hi, axis):
        """Per-bin overlaps and their shift derivatives along one axis."""
        g = self.grid
        e = g.edges_x if axis == "x" else g.edges_y
        ov = g.axis_overlap(lo, hi, axis)
        d = _overlap_deriv(lo, hi, e)
        if self.fold:
            # footprint hanging off the canvas is mirrored back into the edge
            # bins, so area is conserved and the wall pushes modules inward
            for a in (e[0], e[-1]):
                rlo, rhi = 2 * a - hi, 2 * a - lo
                ov = ov + g.axis_overlap(rlo, rhi, axis)
                d = d - _overlap_deriv(rlo, rhi, e)
        return ov, d

    def value_grad(self, x, y):
        lx = x[self.ids] + self.sx
        ly = y[self.ids] + self.sy
        ox, dox = self._axis(lx, lx + self.w, "x")
        oy, doy = self._axis(ly, ly + self.h, "y")
        ox = ox * self.scale[:, None]
        occ = ox.T @ oy
        # empty bins never count, even where capacity is negative
        over = np.where(occ > 0, np.maximum(occ - self.cap, 0.0), 0.0)
        val = float(np.sum(over * over))
        G = 2.0 * over
        gx = self.scale * np.einsum("mb,mb->m", dox, oy @ G.T)
        gy = np.einsum("mb,mb->m", doy, ox @ G)
        for sub in self.levels:
            v, sx, sy = sub.value_grad(x, y)
            val += v
            gx += sx
            gy += sy
        return val, gx, gy


def density_penalty_and_grad(placement: Placement, bins_x: int, bins_y: int, target_density: float,
                             movable=None):
    """``sum_b max(0, occ_b - cap_b)^2`` over movable-module occupancy and its gradient.

    Capacity is ``target_density`` times the bin area left free by the
    non-movable modules.  Gradients are returned for all modules (zero for
    non-movable ones).
    """
    nl = placement.netlist
    mov = np.flatnonzero(_movable_mask(nl, movable))
    d = _Density(placement, bins_x, bins_y, target_density, mov)
    val, gx_m, gy_m = d.value_grad(placement.x, placement.y)
    gx = np.zeros(nl.n_modules)
    gy = np.zeros(nl.n_modules)
    gx[d.ids] = gx_m
    gy[d.ids] = gy_m
    return val, (gx, gy)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

@dataclass
class PlacementReport:
    iterations: int = 0
    status: str = "converged"
    final_overflow: float = 0.0
    final_hpwl: float = 0.0
    initial_lambda: float = 0.0
    overflow: list = field(default_factory=list)
    hpwl: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)

    @property
    def diverged(self) -> bool:
        return self.status == "diverged"

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def run_placement(netlist: Netlist, config: PlacerConfig, frozen=(), seed: int = 0,
                  placement: Placement | None = None, active=None):
    """Place every movable, non-frozen module.

    ``placement`` supplies coordinates of frozen modules (default: parsed
    coordinates).  ``active`` restricts which modules take part at all;
    others are ignored for wirelength and density.  Returns the final
    placement and a ``PlacementReport``.
    """
    cfg = config
    nl = netlist
    base = placement.copy() if placement is not None else nl.initial_placement(seed=seed)
    movable = ~nl.fixed
    if len(frozen):
        movable[np.asarray(frozen, dtype=np.int64)] = False
    if active is not None:
        keep = np.zeros(nl.n_modules, dtype=bool)
        keep[np.asarray(active, dtype=np.int64)] = True
        movable &= keep
        sub, old = nl.subset(np.flatnonzero(keep))
        sub_pl = Placement(sub, base.x[old], base.y[old])
        sub_frozen = np.flatnonzero(~movable[old] & ~sub.fixed)
        out, rep = run_placement(sub, cfg, sub_frozen, seed, sub_pl)
        base.x[old] = out.x
        base.y[old] = out.y
        return base, rep
    mov = np.flatnonzero(movable)
    if len(mov) == 0 or cfg.max_iters == 0:
        rep = PlacementReport(iterations=0, final_hpwl=total_hpwl(base))
        if len(mov) == 0:
            return base, rep
    c = nl.canvas
    rng = np.random.default_rng(seed)
    span = max(c.width, c.height)
    x = base.x.copy()
    y = base.y.copy()
    x[mov] = c.x + 0.5 * c.width - 0.5 * nl.width[mov] + rng.normal(0, 0.01 * c.width, len(mov))
    y[mov] = c.y + 0.5 * c.height - 0.5 * nl.height[mov] + rng.normal(0, 0.01 * c.height, len(mov))
    xmax = c.x + np.maximum(c.width - nl.width, 0.0)
    ymax = c.y + np.maximum(c.height - nl.height, 0.0)
    np.clip(x, c.x, xmax, out=x, where=movable)
    np.clip(y, c.y, ymax, out=y, where=movable)
    pl = Placement(nl, x, y)
    x, y = pl.x, pl.y
    if cfg.max_iters == 0:
        rep.final_hpwl = total_hpwl(pl)
        return pl, rep

    idx = _NetIndex(nl)
    dens = _Density(pl, cfg.bins_x, cfg.bins_y, cfg.target_density, mov, spread=True)
    model = cfg.wirelength_model
    gamma = cfg.gamma

    def objective_grad(lam):
        # overflow to inf/nan is caught below and reported as divergence
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            w, wgx, wgy = _wl_value_grad(pl, idx, gamma, model)
            d, dgx, dgy = dens.value_grad(pl.x, pl.y)
        gx = wgx[mov].copy()
        gy = wgy[mov].copy()
        pos = np.searchsorted(mov, dens.ids)
        gx[pos] += lam * dgx
        gy[pos] += lam * dgy
        return w + lam * d, gx, gy, wgx[mov], wgy[mov], dgx, dgy

    _, _, _, wgx, wgy, dgx, dgy = objective_grad(0.0)
    wnorm = float(np.abs(wgx).sum() + np.abs(wgy).sum())
    dnorm = float(np.abs(dgx).sum() + np.abs(dgy).sum())
    lam = cfg.density_weight * (wnorm / dnorm if dnorm > 0 and wnorm > 0 else 1.0)
    rep = PlacementReport(initial_lambda=lam)

    lr = cfg.learning_rate * span
    m1x = np.zeros(len(mov)); m1y = np.zeros(len(mov))
    m2x = np.zeros(len(mov)); m2y = np.zeros(len(mov))
    b1, b2, eps = 0.9, 0.999, 1e-12
    t = 0
    last_hpwl = total_hpwl(pl)
    prev_hpwl = last_hpwl
    period = cfg.lambda_period
    inner = cfg.inner_steps
    for it in range(1, cfg.max_iters + 1):
        obj = None
        for _ in range(inner):
            obj, gx, gy, *_ = objective_grad(lam)
            if not (math.isfinite(obj) and np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
                rep.status = "diverged"
                rep.iterations = it
                rep.final_hpwl = math.inf
                rep.final_overflow = math.inf
                log.warning("placement diverged at iteration %d", it)
                return pl, rep
            t += 1
            if cfg.optimizer == "adam":
                m1x = b1 * m1x + (1 - b1) * gx
                m1y = b1 * m1y + (1 - b1) * gy
                m2x = b2 * m2x + (1 - b2) * gx * gx
                m2y = b2 * m2y + (1 - b2) * gy * gy
                c1 = 1 - b1 ** t
                c2 = 1 - b2 ** t
                sx = lr * (m1x / c1) / (np.sqrt(m2x / c2) + eps)
                sy = lr * (m1y / c1) / (np.sqrt(m2y / c2) + eps)
                x[mov] -= sx
                y[mov] -= sy
            else:
                # Nesterov momentum on RMS-normalized gradients
                scale = math.sqrt(float(np.mean(gx * gx) + np.mean(gy * gy)) / 2.0) or 1.0
                ux, uy = gx / scale, gy / scale
                new_x = b1 * m1x - lr * ux
                new_y = b1 * m1y - lr * uy
                x[mov] += b1 * new_x - lr * ux
                y[mov] += b1 * new_y - lr * uy
                m1x, m1y = new_x, new_y
            np.clip(x, c.x, xmax, out=x, where=movable)
            np.clip(y, c.y, ymax, out=y, where=movable)
        lr *= cfg.lr_decay
        overflow = density_overflow(pl, cfg.bins_x, cfg.bins_y, cfg.target_density, movable=mov)
        hpwl = total_hpwl(pl)
        rep.overflow.append(overflow)
        rep.hpwl.append(hpwl)
        rep.lambdas.append(lam)
        if it % period == 0:
            delta = hpwl - last_hpwl
            ratio = cfg.upper_pcof ** (1.0 - delta / cfg.ref_hpwl)
            lam *= min(max(ratio, cfg.lower_pcof), cfg.upper_pcof)
            last_hpwl = hpwl
        rep.iterations = it
        # low overflow alone is not enough: a lone module never overflows
        settled = abs(prev_hpwl - hpwl) <= 1e-3 * max(hpwl, 1e-12)
        prev_hpwl = hpwl
        if overflow <= cfg.stop_overflow and settled:
            break
    else:
        rep.status = "max_iters"
    rep.final_overflow = rep.overflow[-1] if rep.overflow else 0.0
    rep.final_hpwl = total_hpwl(pl)
    return pl, rep
