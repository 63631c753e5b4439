"""Black-box optimizers behind a common ask/tell interface."""
from .base import BoxSpace, BudgetExhausted, Optimizer, PermSpace, Problem, ProtocolError, minimize
from .bo import BayesianOptimization, expected_improvement
from .cmaes import CMAES
from .ea import VanillaEA
from .operators import inversion, order_crossover, random_reset, shuffle, uniform_crossover
from .pso import ParticleSwarm
from .sa import SimulatedAnnealing, accept

ALGORITHMS = {
    "sa": SimulatedAnnealing,
    "ea": VanillaEA,
    "pso": ParticleSwarm,
    "es": CMAES,
    "bo": BayesianOptimization,
}


def make_optimizer(name: str, space, budget: int, seed=0, **kw) -> Optimizer:
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    cls = ALGORITHMS[name]
    if space.kind not in cls.spaces:
        raise ValueError(f"algorithm {name!r} cannot search {space.kind} genotypes "
                         f"(sequence pairs need sa or ea)")
    return cls(space, budget, seed, **kw)


__all__ = [
    "ALGORITHMS", "BayesianOptimization", "BoxSpace", "BudgetExhausted", "CMAES", "Optimizer",
    "ParticleSwarm", "PermSpace", "Problem", "ProtocolError", "SimulatedAnnealing", "VanillaEA",
    "accept", "expected_improvement", "inversion", "make_optimizer", "minimize", "order_crossover",
    "random_reset", "shuffle", "uniform_crossover",
]
