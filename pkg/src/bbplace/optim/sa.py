"""Simulated annealing with geometric cooling."""
from __future__ import annotations

import math

from .base import Optimizer


def accept(delta: float, temperature: float, rng) -> bool:
    """Metropolis rule: improvements always, worse moves with ``exp(-delta/T)``."""
    if delta <= 0:
        return True
    if temperature <= 0:
        return False
    return bool(rng.random() < math.exp(-delta / temperature))


class SimulatedAnnealing(Optimizer):
    """One proposal per ask.  ``T = t0 * decay ** (evals // period)``; evals count proposals."""

    name = "sa"
    spaces = ("box", "perm")

    def __init__(self, space, budget, seed=0, t0=100.0, decay=0.99, period=100):
        super().__init__(space, budget, seed)
        self.t0 = t0
        self.decay = decay
        self.period = period
        self.current = None
        self.current_f = math.inf

    @property
    def temperature(self) -> float:
        return self.t0 * self.decay ** (self.n_evals // self.period)

    def _ask(self, remaining):
        if self.current is None:
            return [self.space.sample(self.rng)]
        return [self.space.mutate(self.current, self.rng)]

    def _tell(self, batch, f):
        # temperature in force when the proposal was made
        temp = self.t0 * self.decay ** ((self.n_evals - 1) // self.period)
        g, fx = batch[0], float(f[0])
        if self.current is None:
            self.current, self.current_f = g, fx
        elif accept(fx - self.current_f, temp, self.rng):
            self.current, self.current_f = g, fx
