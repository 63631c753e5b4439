"""Experiment configuration, traces and the optimization loop."""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..mgo import DEFAULT_GRID
from ..netlist import NetlistError, Placement, generate_synthetic, load, select_macros
from ..optim import make_optimizer
from ..placer import PlacerConfig
from .problems import PlacementProblem, check_combination

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUT_ENV = "BBPLACE_OUT"
MP_BUDGET = 10_000
GP_BUDGET = 200


class ConfigError(ValueError):
    pass


@dataclass
class HarnessConfig:
    benchmark: str
    placer: str = "mgo"
    algo: str = "ea"
    eval_gp_hpwl: bool = False
    budget: int | None = None
    pop_size: int = 50
    n_macros: int | None = None
    grid: int = DEFAULT_GRID
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    density: float = 0.07
    out: str | None = None
    workers: int = 1
    hpo_scope: str = "all_modules"
    hpo_max_iters: int | None = None
    gp_max_iters: int = 1000
    shuffle_m: int | None = None
    full_genotypes: bool = False

    def __post_init__(self):
        try:
            check_combination(self.placer, self.algo)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.budget is None:
            self.budget = GP_BUDGET if self.eval_gp_hpwl else MP_BUDGET
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.pop_size < 2:
            raise ConfigError("pop_size must be >= 2")
        if self.grid < 1:
            raise ConfigError("grid must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.hpo_scope not in ("macros_only", "all_modules"):
            raise ConfigError("hpo_scope must be macros_only or all_modules")
        self.seeds = [int(s) for s in self.seeds]

    @property
    def method(self) -> str:
        return f"{self.placer}-{self.algo}"

    @property
    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV) or "bbplace_out")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, d: dict) -> "HarnessConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "benchmark" not in d:
            raise ConfigError("config needs a benchmark")
        return cls(**d)


_INT_KEYS = {"budget", "pop_size", "n_macros", "grid", "workers", "hpo_max_iters", "gp_max_iters",
             "shuffle_m"}
_FLOAT_KEYS = {"density"}
_BOOL_KEYS = {"eval_gp_hpwl", "full_genotypes"}


def coerce(key: str, value: str):
    """Typed value of a ``key=value`` config entry."""
    value = value.strip().strip('"').strip("'")
    try:
        if key in _INT_KEYS:
            return None if value.lower() in ("", "none") else int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key == "seeds":
            return [int(s) for s in value.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def read_config_file(path) -> dict:
    """``key = value`` lines (``#`` comments, optional ``[section]`` headers ignored)."""
    text = Path(path).read_text()
    cp = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
                                   default_section="__all__")
    try:
        cp.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out = {}
    for sec in cp.sections():
        for k, v in cp.items(sec):
            out[k.replace("-", "_")] = coerce(k.replace("-", "_"), v)
    return out


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

_SYN_INT = {"n_macros", "n_cells", "n_nets", "n_terminals", "seed"}


def resolve_benchmark(spec: str, n_macros: int | None = None):
    """Netlist for a ``.aux``/``.json`` path or ``synthetic:key=value,...``."""
    if spec.startswith("synthetic"):
        kw = dict(n_macros=20, n_cells=500, n_nets=600, n_terminals=8, seed=0)
        _, _, rest = spec.partition(":")
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            k = k.strip()
            try:
                kw[k] = int(v) if k in _SYN_INT else float(v)
            except ValueError:
                raise ConfigError(f"bad synthetic parameter {item!r}") from None
        try:
            nl = generate_synthetic(**kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
    else:
        if not Path(spec).exists():
            raise NetlistError(f"benchmark not found: {spec}")
        nl = load(spec)
    if n_macros is not None:
        select_macros(nl, n_macros)
    return nl


def benchmark_label(spec: str) -> str:
    if spec.startswith("synthetic"):
        return spec.replace(":", "_").replace(",", "_").replace("=", "")
    return Path(spec).stem


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

def digest(genotype) -> str:
    arr = genotype.as_array() if hasattr(genotype, "as_array") else np.asarray(genotype)
    return hashlib.sha1(np.ascontiguousarray(arr, dtype=np.float64).tobytes()).hexdigest()


@dataclass
class EvalRecord:
    index: int
    digest: str
    fitness: float
    best_fitness: float
    opt_time_s: float
    eval_time_s: float
    wall_time_s: float = 0.0  # ask of this record's batch to its tell
    genotype: list | None = None


@dataclass
class Trace:
    instance: str
    method: str
    seed: int
    config: dict
    records: list = field(default_factory=list)
    final_placement: dict | None = None
    best_fitness: float = float("inf")
    wall_time_s: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def curve(self) -> list:
        return [r.best_fitness for r in self.records]

    @property
    def final_fitness(self) -> float:
        return self.best_fitness

    def to_dict(self) -> dict:
        d = asdict(self)
        if not any(r.genotype is not None for r in self.records):
            for r in d["records"]:
                r.pop("genotype")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Trace":
        d = dict(d)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise NetlistError(f"unsupported trace schema {d.get('schema_version')!r}")
        d["records"] = [EvalRecord(**r) for r in d.get("records", [])]
        return cls(**d)

    @classmethod
    def load(cls, path) -> "Trace":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise NetlistError(f"{path}: not a trace file ({exc})") from None

    def curve_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eval_index", "best_fitness", "opt_time_s", "eval_time_s"])
        for r in self.records:
            w.writerow([r.index, repr(r.best_fitness), f"{r.opt_time_s:.6g}", f"{r.eval_time_s:.6g}"])
        return buf.getvalue()

    def placement(self, netlist) -> Placement:
        return Placement(netlist, self.final_placement["x"], self.final_placement["y"])

    @property
    def stem(self) -> str:
        return f"{self.instance}__{self.method}__seed{self.seed}"

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        pj = out / f"{self.stem}.json"
        pc = out / f"{self.stem}.csv"
        pj.write_text(self.to_json())
        pc.write_text(self.curve_csv())
        return pj, pc


def _timed(problem):
    def run(g):
        t = time.perf_counter()
        f, pl = problem(g)
        return float(f), pl, time.perf_counter() - t
    return run


def run_seed(cfg: HarnessConfig, seed: int, netlist=None, executor=None) -> Trace:
    """One optimization run; ``netlist`` may be passed to skip benchmark loading."""
    t_start = time.perf_counter()
    nl = netlist if netlist is not None else resolve_benchmark(cfg.benchmark, cfg.n_macros)
    gp_cfg = PlacerConfig.for_netlist(nl, max_iters=cfg.gp_max_iters, stop_overflow=cfg.density)
    problem = PlacementProblem(nl, cfg.placer, cfg.eval_gp_hpwl, cfg.grid, gp_cfg, cfg.hpo_scope,
                               cfg.hpo_max_iters, cfg.shuffle_m, seed)
    kw = {}
    if cfg.algo == "ea":
        kw["pop_size"] = cfg.pop_size
    elif cfg.algo == "pso":
        kw["n_particles"] = cfg.pop_size
    opt = make_optimizer(cfg.algo, problem.space, cfg.budget, seed, **kw)
    trace = Trace(benchmark_label(cfg.benchmark), cfg.method, seed, cfg.to_dict())
    evaluate = _timed(problem)
    best_pl = None
    while not opt.done:
        t_batch = time.perf_counter()
        batch = opt.ask()
        t_ask = time.perf_counter() - t_batch
        if executor is not None and len(batch) > 1:
            results = list(executor.map(evaluate, batch))
        else:
            results = [evaluate(g) for g in batch]
        fits = [r[0] for r in results]
        t0 = time.perf_counter()
        opt.tell(batch, fits)
        t_end = time.perf_counter()
        t_opt = (t_ask + t_end - t0) / len(batch)
        wall = t_end - t_batch
        for g, (f, pl, dt) in zip(batch, results):
            f = f if np.isfinite(f) else float("inf")
            if best_pl is None or f < trace.best_fitness:
                trace.best_fitness = min(f, trace.best_fitness)
                best_pl = pl
            trace.records.append(EvalRecord(
                len(trace.records), digest(g), f, trace.best_fitness, t_opt, dt, wall,
                problem.space.as_array(g).tolist() if cfg.full_genotypes else None))
    trace.final_placement = best_pl.to_dict() if best_pl is not None else None
    trace.wall_time_s = time.perf_counter() - t_start
    return trace


def run_experiment(cfg: HarnessConfig, write: bool = True) -> list[Trace]:
    """Run every seed of ``cfg``; traces are written under ``cfg.out_dir``."""
    nl = resolve_benchmark(cfg.benchmark, cfg.n_macros)
    traces = []
    executor = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for seed in cfg.seeds:
            tr = run_seed(cfg, seed, nl, executor)
            log.info("%s %s seed %d: best %.6g", tr.instance, tr.method, seed, tr.best_fitness)
            if write:
                tr.write(cfg.out_dir)
            traces.append(tr)
    finally:
        if executor is not None:
            executor.shutdown()
    return traces
