"""Particle swarm optimization with velocity clamping."""
from __future__ import annotations

import numpy as np

from .base import Optimizer


def velocity_update(v, x, pbest, gbest, w, c1, c2, r1, r2, vmax):
    v = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    return np.clip(v, -vmax, vmax)


class ParticleSwarm(Optimizer):
    name = "pso"
    spaces = ("box",)

    def __init__(self, space, budget, seed=0, n_particles=20, w=0.7, c1=2.0, c2=2.0,
                 max_velocity_ratio=0.2):
        super().__init__(space, budget, seed)
        self.n = n_particles
        self.w, self.c1, self.c2 = w, c1, c2
        self.vmax = max_velocity_ratio * space.span
        self.x = space.sample(self.rng, self.n)
        self.v = (2.0 * self.rng.random((self.n, space.dim)) - 1.0) * self.vmax
        self.pbest = self.x.copy()
        self.pbest_f = np.full(self.n, np.inf)
        self.gbest = None
        self._started = False

    def _ask(self, remaining):
        if self._started:
            r1 = self.rng.random(self.x.shape)
            r2 = self.rng.random(self.x.shape)
            self.v = velocity_update(self.v, self.x, self.pbest, self.gbest, self.w, self.c1,
                                     self.c2, r1, r2, self.vmax)
            self.x = self.space.clip(self.x + self.v)
        self._started = True
        return [row for row in self.x[: min(self.n, remaining)]]

    def _tell(self, batch, f):
        m = len(batch)
        better = f < self.pbest_f[:m]
        self.pbest[:m][better] = self.x[:m][better]
        self.pbest_f[:m][better] = f[better]
        self.gbest = self.pbest[int(np.argmin(self.pbest_f))].copy()
