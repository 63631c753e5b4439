"""Ask/tell plumbing shared by all optimizers."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..sp import SpGenotype, random_sp
from . import operators as ops

log = logging.getLogger(__name__)


class ProtocolError(RuntimeError):
    """ask/tell called out of order or with a foreign batch."""


class BudgetExhausted(RuntimeError):
    pass


class BoxSpace:
    """Box ``[lo, hi]^d``.  ``mutation`` is ``random_reset`` or ``shuffle`` (pairs)."""

    kind = "box"

    def __init__(self, lo, hi, mutation="random_reset", shuffle_m=None):
        self.lo = np.asarray(lo, dtype=np.float64).ravel()
        self.hi = np.asarray(hi, dtype=np.float64).ravel()
        if self.lo.shape != self.hi.shape or np.any(self.hi < self.lo):
            raise ValueError("box bounds must have equal shape and lo <= hi")
        if mutation not in ("random_reset", "shuffle"):
            raise ValueError(f"unknown box mutation {mutation!r}")
        if mutation == "shuffle" and len(self.lo) % 2:
            raise ValueError("shuffle mutation needs coordinate pairs")
        self.mutation = mutation
        self.shuffle_m = shuffle_m

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def span(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return x.shape == self.lo.shape and bool(np.all((x >= self.lo) & (x <= self.hi)))

    def clip(self, x):
        return np.clip(x, self.lo, self.hi)

    def sample(self, rng, n=None):
        if n is None:
            return self.lo + rng.random(self.dim) * self.span
        return self.lo + rng.random((n, self.dim)) * self.span

    def mutate(self, x, rng):
        if self.mutation == "shuffle":
            return ops.shuffle(x, rng, self.shuffle_m)
        return ops.random_reset(x, self.lo, self.hi, rng)

    def crossover(self, a, b, rng):
        return ops.uniform_crossover(a, b, rng)

    def as_array(self, x):
        return np.asarray(x, dtype=np.float64)

    def copy(self, x):
        return np.array(x, dtype=np.float64)


class PermSpace:
    """Pairs of permutations of ``0..k-1`` (sequence pairs)."""

    kind = "perm"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k

    @property
    def dim(self) -> int:
        return 2 * self.k

    def contains(self, g) -> bool:
        if not isinstance(g, SpGenotype) or g.k != self.k:
            return False
        ref = np.arange(self.k)
        return bool(np.array_equal(np.sort(g.pi_plus), ref) and np.array_equal(np.sort(g.pi_minus), ref))

    def sample(self, rng, n=None):
        if n is None:
            return random_sp(self.k, rng)
        return [random_sp(self.k, rng) for _ in range(n)]

    def mutate(self, g, rng):
        return ops.inversion(g, rng)

    def crossover(self, a, b, rng):
        return SpGenotype(ops.order_crossover(a.pi_plus, b.pi_plus, rng),
                          ops.order_crossover(a.pi_minus, b.pi_minus, rng))

    def as_array(self, g):
        return g.as_array()

    def copy(self, g):
        return g.copy()


@dataclass
class Problem:
    space: object
    evaluate: Callable
    budget: int
    name: str = ""

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass
class TellRecord:
    n_evals: int
    best_f: float
    fitnesses: list = field(default_factory=list)


class Optimizer:
    """Minimizer behind ``ask()`` / ``tell(batch, fitnesses)``.

    Subclasses implement ``_ask(remaining)`` and ``_tell(batch, f)``.
    Non-finite fitnesses are treated as ``+inf``.
    """

    name = "base"
    spaces = ("box",)

    def __init__(self, space, budget: int, seed=0):
        if space.kind not in self.spaces:
            raise ValueError(f"{self.name} does not support {space.kind} genotypes")
        if budget < 1:
            raise ValueError("budget must be >= 1")
        self.space = space
        self.budget = int(budget)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.n_evals = 0
        self.best_x = None
        self.best_f = math.inf
        self.history: list[TellRecord] = []
        self._pending = None

    @property
    def remaining(self) -> int:
        return self.budget - self.n_evals

    @property
    def done(self) -> bool:
        return self.remaining <= 0

    def ask(self) -> list:
        if self._pending is not None:
            raise ProtocolError("ask called again before tell")
        if self.remaining <= 0:
            raise BudgetExhausted(f"budget of {self.budget} evaluations used")
        batch = list(self._ask(self.remaining))[: self.remaining]
        self._pending = batch
        return [self.space.copy(g) for g in batch]

    def tell(self, genotypes, fitnesses):
        if self._pending is None:
            raise ProtocolError("tell without a pending ask")
        batch = self._pending
        if len(genotypes) != len(batch) or len(fitnesses) != len(batch):
            raise ProtocolError("tell must receive exactly the last asked batch")
        for g, p in zip(genotypes, batch):
            if not np.array_equal(self.space.as_array(g), self.space.as_array(p)):
                raise ProtocolError("told genotype differs from the asked one")
        f = np.array([float(v) for v in fitnesses])
        f[~np.isfinite(f)] = math.inf
        self._pending = None
        self.n_evals += len(batch)
        i = int(np.argmin(f)) if len(f) else -1
        if i >= 0 and (f[i] < self.best_f or self.best_x is None):
            self.best_f = float(f[i])
            self.best_x = self.space.copy(batch[i])
        self._tell(batch, f)
        self.history.append(TellRecord(self.n_evals, self.best_f, f.tolist()))

    def _ask(self, remaining):
        raise NotImplementedError

    def _tell(self, batch, f):
        raise NotImplementedError


def minimize(opt: Optimizer, fn: Callable) -> Optimizer:
    """Serial ask/evaluate/tell loop until the budget is spent."""
    while not opt.done:
        batch = opt.ask()
        opt.tell(batch, [fn(g) for g in batch])
    return opt
