"""Fitness measures: macro-pin HPWL and post-cell-placement HPWL."""
from __future__ import annotations

import logging

import numpy as np

from .. import kernels
from ..metrics import overlap_area, total_hpwl
from ..netlist import Netlist, Placement
from ..placer import PlacerConfig, run_placement

log = logging.getLogger(__name__)

OVERLAP_WEIGHT = 1.0


def worst_fitness(netlist: Netlist) -> float:
    """Upper bound on any in-canvas HPWL, times ten."""
    return 10.0 * netlist.canvas.half_perimeter * max(netlist.n_nets, 1)


class MpHpwl:
    """HPWL over macro and fixed-module pins, on nets with at least two of them."""

    def __init__(self, netlist: Netlist, overlap_weight: float = OVERLAP_WEIGHT):
        self.netlist = netlist
        self.overlap_weight = overlap_weight
        keep = np.zeros(netlist.n_modules, dtype=bool)
        keep[netlist.macro_ids] = True
        keep |= netlist.fixed
        ptr, pins = [0], []
        for e in range(netlist.n_nets):
            q = netlist.net(e)
            q = q[keep[netlist.pin_owner[q]]]
            if len(q) >= 2:
                pins.append(q)
                ptr.append(ptr[-1] + len(q))
        self.net_ptr = np.array(ptr, dtype=np.int64)
        self.net_pins = np.concatenate(pins).astype(np.int64) if pins else np.zeros(0, dtype=np.int64)

    @property
    def n_nets(self) -> int:
        return len(self.net_ptr) - 1

    def hpwl(self, placement: Placement) -> float:
        px, py = placement.pin_xy()
        return kernels.total_hpwl(self.net_ptr, self.net_pins, px, py)

    def __call__(self, placement: Placement) -> float:
        val = self.hpwl(placement)
        if self.overlap_weight and len(self.netlist.macro_ids) > 1:
            ov = overlap_area(placement, self.netlist.macro_ids)
            if ov > 0:
                val += self.overlap_weight * ov
        return val


def evaluate_mp_hpwl(placement: Placement, overlap_weight: float = OVERLAP_WEIGHT) -> float:
    return MpHpwl(placement.netlist, overlap_weight)(placement)


def gp_fitness(placement: Placement, report, stop_overflow: float) -> float:
    """Total HPWL of a global placement, charged for density left unresolved.

    Clumped, unspread cells have deceptively short wires; each unit of
    overflow above ``stop_overflow`` costs ``worst_fitness``.
    """
    nl = placement.netlist
    if report.diverged:
        return worst_fitness(nl)
    excess = max(0.0, report.final_overflow - stop_overflow)
    return total_hpwl(placement) + worst_fitness(nl) * min(excess, 1.0)


def evaluate_gp_hpwl(macro_placement: Placement, netlist: Netlist | None = None,
                     config: PlacerConfig | None = None, seed: int = 0):
    """Freeze macros, place the remaining movable modules, return ``(fitness, placement)``."""
    nl = netlist or macro_placement.netlist
    cfg = config or PlacerConfig.for_netlist(nl)
    pl, rep = run_placement(nl, cfg, frozen=nl.macro_ids, seed=seed, placement=macro_placement)
    if rep.diverged:
        log.warning("cell placement diverged; worst fitness")
    return gp_fitness(pl, rep, cfg.stop_overflow), pl
