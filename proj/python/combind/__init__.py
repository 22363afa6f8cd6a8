"""Python front end for the combind command runner."""

import json

from ._combind import (
    ConfigError,
    Error,
    cover_number,
    golden_entropy_rate,
    km_threshold,
    l1_constant,
    largest_shattered_subset,
    run_json,
)

__all__ = [
    "ConfigError",
    "Error",
    "cover_number",
    "golden_entropy_rate",
    "km_threshold",
    "l1_constant",
    "largest_shattered_subset",
    "run",
    "run_json",
]


def run(command, params=None, *, suite=None, seed=0, budget=None):
    """Run one command and return (exit_code, report dict, csv text)."""
    config = {"schema_version": 1, "command": command, "seed": seed, "params": params or {}}
    if suite is not None:
        config["suite"] = suite
    if budget is not None:
        config["budget"] = budget
    code, report, csv = run_json(json.dumps(config))
    return code, json.loads(report), csv
