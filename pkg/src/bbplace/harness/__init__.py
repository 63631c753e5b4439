"""Experiment orchestration, evaluation protocols, summaries and rendering."""
from .evaluate import MpHpwl, evaluate_gp_hpwl, evaluate_mp_hpwl, gp_fitness, worst_fitness
from .experiment import (ConfigError, EvalRecord, HarnessConfig, Trace, read_config_file,
                         resolve_benchmark, run_experiment, run_seed)
from .problems import PlacementProblem, check_combination
from .render import render_svg
from .summary import Summary, summarize

__all__ = [
    "ConfigError", "EvalRecord", "HarnessConfig", "MpHpwl", "PlacementProblem", "Summary", "Trace",
    "check_combination", "evaluate_gp_hpwl", "evaluate_mp_hpwl", "gp_fitness", "read_config_file", "render_svg",
    "resolve_benchmark", "run_experiment", "run_seed", "summarize", "worst_fitness",
]
