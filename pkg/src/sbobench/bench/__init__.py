"""Benchmark harness: configuration, problem generation, campaigns, plots and CLI."""

from .config import BenchmarkConfig, ConfigError, load_config, parse_config
from .plots import PlotError, box_stats, emit_plots, status_shares
from .problems import (
    BenchProblem,
    ProblemGenerationError,
    generate_problem,
    generate_problems,
    load_problems,
    save_problems,
)
from .runner import CSV_COLUMNS, read_results, run_benchmark, run_once, run_seed, summarize, write_results

__all__ = [
    "CSV_COLUMNS",
    "BenchProblem",
    "BenchmarkConfig",
    "ConfigError",
    "PlotError",
    "ProblemGenerationError",
    "box_stats",
    "emit_plots",
    "generate_problem",
    "generate_problems",
    "load_config",
    "load_problems",
    "parse_config",
    "read_results",
    "run_benchmark",
    "run_once",
    "run_seed",
    "save_problems",
    "status_shares",
    "summarize",
    "write_results",
]
