"""CMA-ES on the box rescaled to the unit cube.

Samples outside the box are clipped and the clipped points drive the
update.  Above ``full_cov_max_dim`` dimensions only the diagonal of the
covariance is adapted.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from .base import Optimizer

log = logging.getLogger(__name__)


def default_popsize(d: int) -> int:
    return 4 + int(math.floor(3 * math.log(d)))


class CMAES(Optimizer):
    name = "es"
    spaces = ("box",)

    def __init__(self, space, budget, seed=0, sigma0=0.5, popsize=None, full_cov_max_dim=200,
                 x0=None):
        super().__init__(space, budget, seed)
        n = space.dim
        self.n = n
        self.lam = popsize or default_popsize(n)
        self.mu = self.lam // 2
        w = math.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / float(np.sum(self.weights ** 2))
        me = self.mueff
        self.cc = (4 + me / n) / (n + 4 + 2 * me / n)
        self.cs = (me + 2) / (n + me + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + me)
        self.cmu = min(1 - self.c1, 2 * (me - 2 + 1 / me) / ((n + 2) ** 2 + me))
        self.separable = n > full_cov_max_dim
        if self.separable:
            f = (n + 2) / 3.0
            self.c1 = min(1.0, self.c1 * f)
            self.cmu = min(1 - self.c1, self.cmu * f)
        self.damps = 1 + 2 * max(0.0, math.sqrt((me - 1) / (n + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))
        self.sigma = sigma0
        if x0 is None:
            self.m = self.rng.random(n)
        else:
            self.m = np.clip((np.asarray(x0, dtype=np.float64) - space.lo) / self._span(), 0, 1)
        self.ps = np.zeros(n)
        self.pc = np.zeros(n)
        if self.separable:
            self.diag = np.ones(n)
        else:
            self.C = np.eye(n)
            self.B = np.eye(n)
            self.D = np.ones(n)
        self.generation = 0
        self._u = None

    def _span(self):
        s = self.space.span
        return np.where(s > 0, s, 1.0)

    @property
    def mean(self) -> np.ndarray:
        return self.space.lo + self.m * self.space.span

    def _ask(self, remaining):
        z = self.rng.standard_normal((self.lam, self.n))
        if self.separable:
            y = z * np.sqrt(self.diag)
        else:
            y = (z * self.D) @ self.B.T
        u = np.clip(self.m + self.sigma * y, 0.0, 1.0)
        self._u = u
        return [self.space.lo + row * self.space.span for row in u]

    def _tell(self, batch, f):
        if len(batch) < self.lam:
            return
        n = self.n
        if np.all(f == f[0]):
            # flat fitness: no ranking signal, keep the mean and widen the search
            self.sigma *= math.exp(0.2 + self.cs / self.damps)
            log.info("flat fitness at generation %d; sigma -> %g", self.generation, self.sigma)
            self.generation += 1
            return
        order = np.argsort(f, kind="stable")[: self.mu]
        y = (self._u[order] - self.m) / self.sigma
        yw = self.weights @ y
        self.m = self.m + self.sigma * yw
        if self.separable:
            inv_sqrt = yw / np.sqrt(self.diag)
        else:
            inv_sqrt = self.B @ ((self.B.T @ yw) / self.D)
        cs, cc = self.cs, self.cc
        self.ps = (1 - cs) * self.ps + math.sqrt(cs * (2 - cs) * self.mueff) * inv_sqrt
        self.generation += 1
        norm_ps = float(np.linalg.norm(self.ps))
        hsig = norm_ps / math.sqrt(1 - (1 - cs) ** (2 * self.generation)) / self.chi_n < 1.4 + 2 / (n + 1)
        self.pc = (1 - cc) * self.pc + (math.sqrt(cc * (2 - cc) * self.mueff) * yw if hsig else 0.0)
        dh = (1 - hsig) * cc * (2 - cc)
        if self.separable:
            self.diag = ((1 - self.c1 - self.cmu) * self.diag
                         + self.c1 * (self.pc ** 2 + dh * self.diag)
                         + self.cmu * (self.weights @ (y ** 2)))
            ok = np.all(self.diag > 0) and np.all(np.isfinite(self.diag))
            if not ok:
                log.warning("covariance lost positive definiteness; reset to identity")
                self.diag = np.ones(n)
        else:
            C = ((1 - self.c1 - self.cmu) * self.C
                 + self.c1 * (np.outer(self.pc, self.pc) + dh * self.C)
                 + self.cmu * (y.T * self.weights) @ y)
            C = 0.5 * (C + C.T)
            try:
                evals, evecs = np.linalg.eigh(C)
                ok = bool(np.all(np.isfinite(evals)) and evals.min() > 0)
            except np.linalg.LinAlgError:
                ok = False
            if not ok:
                log.warning("covariance lost positive definiteness; reset to identity")
                C = np.eye(n)
                evals, evecs = np.ones(n), np.eye(n)
            self.C = C
            self.B = evecs
            self.D = np.sqrt(evals)
        self.sigma *= math.exp((cs / self.damps) * (norm_ps / self.chi_n - 1))
        self.sigma = min(self.sigma, 1e3)
