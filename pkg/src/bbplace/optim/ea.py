"""Vanilla evolutionary algorithm: tournament, crossover, mutation, (mu+lambda)."""
from __future__ import annotations

import numpy as np

from .base import Optimizer


class VanillaEA(Optimizer):
    name = "ea"
    spaces = ("box", "perm")

    def __init__(self, space, budget, seed=0, pop_size=50, crossover_prob=0.9):
        super().__init__(space, budget, seed)
        if pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        self.pop_size = pop_size
        self.crossover_prob = crossover_prob
        self.pop = []
        self.pop_f = np.zeros(0)

    def _tournament(self):
        i, j = self.rng.integers(len(self.pop), size=2)
        return self.pop[i] if self.pop_f[i] <= self.pop_f[j] else self.pop[j]

    def _ask(self, remaining):
        n = min(self.pop_size, remaining)
        if not self.pop:
            return [self.space.sample(self.rng) for _ in range(n)]
        out = []
        for _ in range(n):
            a = self._tournament()
            b = self._tournament()
            if self.rng.random() < self.crossover_prob:
                child = self.space.crossover(a, b, self.rng)
            else:
                child = self.space.copy(a)
            out.append(self.space.mutate(child, self.rng))
        return out

    def _tell(self, batch, f):
        pool = self.pop + list(batch)
        pool_f = np.concatenate([self.pop_f, f])
        keep = np.argsort(pool_f, kind="stable")[: self.pop_size]
        self.pop = [pool[i] for i in keep]
        self.pop_f = pool_f[keep]
