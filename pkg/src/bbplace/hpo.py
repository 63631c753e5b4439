"""Placer hyperparameters as a 15-dimensional unit-cube genotype."""
from __future__ import annotations

import json
import math
import threading
import weakref
from dataclasses import dataclass

import numpy as np

from .netlist import Netlist, Placement
from .placer import PlacementReport, PlacerConfig, run_placement

# (field, kind, range); order fixes the genotype layout
SEARCH_SPACE = (
    ("bins_x", "choice", (1024, 2048)),
    ("bins_y", "choice", (1024, 2048)),
    ("optimizer", "choice", ("adam", "nesterov")),
    ("wirelength_model", "choice", ("weighted_average", "logsumexp")),
    ("learning_rate", "linear", (0.001, 0.01)),
    ("lambda_update_every", "linear", (1.0, 3.0)),
    ("inner_iters", "linear", (1.0, 3.0)),
    ("lr_decay", "linear", (0.99, 1.0)),
    ("stop_overflow", "linear", (0.06, 0.1)),
    ("target_density", "linear", (0.8, 1.2)),
    ("lower_pcof", "linear", (0.9, 0.99)),
    ("upper_pcof", "linear", (1.02, 1.15)),
    ("ref_hpwl", "linear", (150000.0, 550000.0)),
    ("density_weight", "log", (1e-6, 1e-4)),
    ("gamma", "linear", (1.0, 4.0)),
)
DIM = len(SEARCH_SPACE)
FIELDS = tuple(f for f, _, _ in SEARCH_SPACE)
SCOPES = ("macros_only", "all_modules")

# the instance the ranges were tuned for (adaptec1): module count and a
# typical converged global-placement HPWL
REF_MODULES = 211447
REF_GP_HPWL = 6.05e7

_scale_cache: dict = {}
_scale_lock = threading.Lock()


def instance_hpwl(netlist: Netlist, seed: int = 0) -> float:
    """HPWL after a default placement run; the instance's wirelength scale.

    Computed once per netlist object and cached.
    """
    key = (id(netlist), seed)
    with _scale_lock:
        hit = _scale_cache.get(key)
        if hit is not None and hit[0]() is netlist:
            return hit[1]
    _, rep = run_placement(netlist, PlacerConfig.for_netlist(netlist), seed=seed)
    val = rep.final_hpwl if math.isfinite(rep.final_hpwl) and rep.final_hpwl > 0 else 1.0
    with _scale_lock:
        _scale_cache[key] = (weakref.ref(netlist), val)
    return val


@dataclass
class HpoGenotype:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if len(v) != DIM:
            raise ValueError(f"HPO genotype needs {DIM} values, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("HPO genotype must be finite")
        self.values = np.clip(v, 0.0, 1.0)

    def copy(self):
        return HpoGenotype(self.values.copy())


def _decode_value(kind, rng, v):
    lo, hi = rng
    if kind == "choice":
        return lo if v < 0.5 else hi
    if kind == "log":
        return float(10.0 ** (math.log10(lo) + v * (math.log10(hi) - math.log10(lo))))
    return float((1.0 - v) * lo + v * hi)


def decode_hpo_dict(genotype) -> dict:
    g = genotype if isinstance(genotype, HpoGenotype) else HpoGenotype(genotype)
    return {f: _decode_value(k, r, v) for (f, k, r), v in zip(SEARCH_SPACE, g.values)}


def decode_hpo(genotype, **overrides) -> PlacerConfig:
    """Raw (unscaled) placer configuration for a genotype."""
    d = decode_hpo_dict(genotype)
    d.update(overrides)
    return PlacerConfig(**d)


def encode_hpo(config) -> HpoGenotype:
    """Inverse of ``decode_hpo``; categoricals map to 0.25 / 0.75."""
    get = config.get if isinstance(config, dict) else lambda f: getattr(config, f)
    vals = []
    for f, kind, (lo, hi) in SEARCH_SPACE:
        val = get(f)
        if kind == "choice":
            if val not in (lo, hi):
                raise ValueError(f"{f}={val!r} is not one of {(lo, hi)}")
            vals.append(0.25 if val == lo else 0.75)
        elif kind == "log":
            vals.append((math.log10(val) - math.log10(lo)) / (math.log10(hi) - math.log10(lo)))
        else:
            vals.append((val - lo) / (hi - lo))
    return HpoGenotype(vals)


def random_hpo(seed=None) -> HpoGenotype:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return HpoGenotype(rng.random(DIM))


def scale_to_instance(config: PlacerConfig, netlist: Netlist, max_iters: int | None = None,
                      hpwl_scale: float | None = None) -> PlacerConfig:
    """Rescale size-dependent knobs from the reference benchmark to ``netlist``.

    Bin counts keep the modules-per-bin ratio, gamma is taken in units of
    the mean bin size and ref_hpwl follows the instance's wirelength scale
    (``instance_hpwl`` unless ``hpwl_scale`` is given).
    """
    ratio = math.sqrt(max(netlist.n_modules, 1) / REF_MODULES)
    bx = max(8, int(round(config.bins_x * ratio)))
    by = max(8, int(round(config.bins_y * ratio)))
    c = netlist.canvas
    bin_size = 0.5 * (c.width / bx + c.height / by)
    if hpwl_scale is None:
        hpwl_scale = instance_hpwl(netlist)
    ref = config.ref_hpwl * hpwl_scale / REF_GP_HPWL
    kw = dict(bins_x=bx, bins_y=by, gamma=config.gamma * bin_size, ref_hpwl=ref)
    if max_iters is not None:
        kw["max_iters"] = max_iters
    return config.with_(**kw)


@dataclass
class HpoEvaluation:
    placement: Placement
    config: PlacerConfig
    report: PlacementReport

    @property
    def diverged(self) -> bool:
        return self.report.diverged

    def config_json(self) -> str:
        return json.dumps(self.config.to_dict(), sort_keys=True)


def evaluate_hpo(genotype, netlist: Netlist, scope: str = "all_modules", seed: int = 0,
                 max_iters: int | None = None, scale: bool = True,
                 base: Placement | None = None, hpwl_scale: float | None = None) -> HpoEvaluation:
    """Run the placer configured by ``genotype`` on ``netlist``.

    ``macros_only`` places the macros against fixed modules and ignores
    standard cells (they keep their ``base`` coordinates); ``all_modules``
    places every movable module.
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    cfg = decode_hpo(genotype)
    if scale:
        cfg = scale_to_instance(cfg, netlist, max_iters, hpwl_scale)
    elif max_iters is not None:
        cfg = cfg.with_(max_iters=max_iters)
    base = base if base is not None else netlist.initial_placement(seed=seed)
    if scope == "macros_only":
        keep = np.union1d(netlist.macro_ids, np.flatnonzero(netlist.fixed))
        pl, rep = run_placement(netlist, cfg, seed=seed, placement=base, active=keep)
    else:
        pl, rep = run_placement(netlist, cfg, seed=seed, placement=base)
    return HpoEvaluation(pl, cfg, rep)
