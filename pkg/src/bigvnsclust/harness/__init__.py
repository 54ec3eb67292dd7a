"""Experiment harness: data ingestion, batteries, metrics and the CLI."""

from .battery import derive_seed, estimate_best_known, run_battery
from .data import (
    X1_ADVERSARIAL_INIT,
    X1_SPEC,
    DatasetSpec,
    ExperimentSpec,
    MixtureSpec,
    generate_gaussian_mixture,
    load_csv,
    parse_experiment_spec,
    parse_mixture_spec,
)
from .metrics import AggregateRow, RunRecord, aggregate, count_succ, emit_table, relative_error
