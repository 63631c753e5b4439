"""Gaussian-process Bayesian optimization with expected improvement."""
from __future__ import annotations

import logging
import warnings

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc
from sklearn.exceptions import ConvergenceWarning
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import ConstantKernel, Matern, WhiteKernel

from .base import Optimizer

log = logging.getLogger(__name__)


def expected_improvement(mu, sigma, best):
    """EI for minimization; zero where the posterior is certain and no better."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    imp = best - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0, imp / sigma, 0.0)
        ei = np.where(sigma > 0, imp * norm.cdf(z) + sigma * norm.pdf(z), np.maximum(imp, 0.0))
    return np.maximum(ei, 0.0)


def make_gp(d: int, random_state: int, restarts: int = 3) -> GaussianProcessRegressor:
    kernel = (ConstantKernel(1.0, (1e-3, 1e3))
              * Matern(length_scale=np.full(d, 0.5), length_scale_bounds=(1e-3, 1e3), nu=2.5)
              + WhiteKernel(1e-4, (1e-6, 1e-1)))
    return GaussianProcessRegressor(kernel=kernel, alpha=1e-10, normalize_y=False,
                                    n_restarts_optimizer=restarts, random_state=random_state)


class BayesianOptimization(Optimizer):
    """One point per ask.  Works on the unit cube; fitnesses are standardized."""

    name = "bo"
    spaces = ("box",)

    def __init__(self, space, budget, seed=0, n_init=None, n_candidates=1024, n_refine=8,
                 restarts=3):
        super().__init__(space, budget, seed)
        d = space.dim
        self.n_init = n_init if n_init is not None else 2 * d + 1
        self.n_candidates = n_candidates
        self.n_refine = n_refine
        self.restarts = restarts
        lhs = qmc.LatinHypercube(d=d, seed=self.rng)
        self._init = lhs.random(self.n_init)
        self.X = np.zeros((0, d))
        self.y = np.zeros(0)
        self.gp = None

    def _to_box(self, u):
        return self.space.lo + u * self.space.span

    def _to_unit(self, x):
        span = np.where(self.space.span > 0, self.space.span, 1.0)
        return (np.asarray(x) - self.space.lo) / span

    def fit(self):
        y = self.y.copy()
        finite = np.isfinite(y)
        if finite.any():
            y[~finite] = y[finite].max()
        std = y.std()
        if not finite.any() or std == 0:
            self.gp = None
            return None
        ys = (y - y.mean()) / std
        gp = make_gp(self.space.dim, int(self.rng.integers(2 ** 31 - 1)), self.restarts)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            gp.fit(self.X, ys)
        self.gp = gp
        self._ybest = float(ys.min())
        return gp

    def acquisition(self, u):
        mu, sd = self.gp.predict(np.atleast_2d(u), return_std=True)
        return expected_improvement(mu, sd, self._ybest)

    def _ask(self, remaining):
        k = len(self.y)
        if k < self.n_init:
            return [self._to_box(self._init[k])]
        if self.fit() is None:
            log.info("degenerate observations; random ask")
            return [self._to_box(self.rng.random(self.space.dim))]
        d = self.space.dim
        cand = self.rng.random((self.n_candidates, d))
        ei = self.acquisition(cand)
        best_u, best_ei = cand[int(np.argmax(ei))], float(ei.max())
        for i in np.argsort(-ei, kind="stable")[: self.n_refine]:
            res = minimize(lambda u: -float(self.acquisition(u)[0]), cand[i], method="L-BFGS-B",
                           bounds=[(0.0, 1.0)] * d, options={"maxiter": 50})
            if np.isfinite(res.fun) and -res.fun > best_ei:
                best_ei, best_u = -float(res.fun), np.clip(res.x, 0.0, 1.0)
        return [self._to_box(best_u)]

    def _tell(self, batch, f):
        self.X = np.vstack([self.X, self._to_unit(np.asarray(batch))])
        self.y = np.concatenate([self.y, f])
