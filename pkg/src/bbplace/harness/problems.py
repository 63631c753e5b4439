"""Formulation decode composed with a fitness measure."""
from __future__ import annotations

import numpy as np

from .. import hpo as hpo_mod
from ..mgo import DEFAULT_GRID, MgoDecoder, bounds
from ..netlist import Netlist
from ..optim import BoxSpace, PermSpace
from ..placer import PlacerConfig
from ..sp import SpGenotype, decode_sp_full, penalty_weight
from .evaluate import MpHpwl, evaluate_gp_hpwl, gp_fitness, worst_fitness

PLACERS = ("sp", "mgo", "hpo")
ALGOS = ("sa", "ea", "es", "pso", "bo")


def check_combination(placer: str, algo: str):
    if placer not in PLACERS:
        raise ValueError(f"placer must be one of {PLACERS}")
    if algo not in ALGOS:
        raise ValueError(f"algo must be one of {ALGOS}")
    if placer == "sp" and algo not in ("sa", "ea"):
        raise ValueError(f"placer 'sp' searches permutations and requires algo sa or ea, got {algo!r}")


class PlacementProblem:
    """Callable ``genotype -> (fitness, placement)`` plus its search space."""

    def __init__(self, netlist: Netlist, placer: str, eval_gp_hpwl: bool = False, grid: int = DEFAULT_GRID,
                 gp_config: PlacerConfig | None = None, hpo_scope: str = "all_modules",
                 hpo_max_iters: int | None = None, shuffle_m=None, seed: int = 0, backend=None):
        if len(netlist.macro_ids) == 0 and placer != "hpo":
            raise ValueError("netlist designates no macros")
        self.netlist = netlist
        self.placer = placer
        self.gp = eval_gp_hpwl
        self.seed = seed
        self.mp = MpHpwl(netlist)
        self.B = penalty_weight(netlist)
        self.worst = worst_fitness(netlist)
        self.gp_config = gp_config or PlacerConfig.for_netlist(netlist)
        self.base = netlist.initial_placement(seed=seed)
        if placer == "sp":
            self.space = PermSpace(len(netlist.macro_ids))
        elif placer == "mgo":
            lo, hi = bounds(netlist)
            self.space = BoxSpace(lo, hi, mutation="shuffle", shuffle_m=shuffle_m)
            self.decoder = MgoDecoder(netlist, grid, backend)
        elif placer == "hpo":
            self.space = BoxSpace(np.zeros(hpo_mod.DIM), np.ones(hpo_mod.DIM))
            self.scope = hpo_scope
            self.hpo_max_iters = hpo_max_iters
            self.hpwl_scale = hpo_mod.instance_hpwl(netlist, seed)
        else:
            raise ValueError(f"placer must be one of {PLACERS}")

    def _cells(self, pl):
        if not self.gp:
            return self.mp.hpwl(pl), pl
        return evaluate_gp_hpwl(pl, self.netlist, self.gp_config, self.seed)

    def __call__(self, genotype):
        nl = self.netlist
        if self.placer == "sp":
            g = genotype if isinstance(genotype, SpGenotype) else SpGenotype.from_array(genotype)
            dec = decode_sp_full(g, nl, self.base)
            val, pl = self._cells(dec.placement)
            return val + self.B * dec.exceed_area, pl
        if self.placer == "mgo":
            pl, ok = self.decoder.decode(genotype, self.base)
            if not ok:
                return self.worst, pl
            return self._cells(pl)
        ev = hpo_mod.evaluate_hpo(genotype, nl, self.scope, self.seed, self.hpo_max_iters,
                                  base=self.base, hpwl_scale=self.hpwl_scale)
        if ev.diverged:
            return self.worst, ev.placement
        if self.gp:
            if self.scope == "macros_only":
                return evaluate_gp_hpwl(ev.placement, nl, self.gp_config, self.seed)
            return gp_fitness(ev.placement, ev.report, ev.config.stop_overflow), ev.placement
        # the analytical placer does not legalize macros, so overlap is charged
        return self.mp(ev.placement), ev.placement
