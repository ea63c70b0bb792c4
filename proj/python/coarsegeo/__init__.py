"""Python access to the coarsegeo core.

Reports and rate tables cross the boundary as JSON text; the helpers below
decode them.
"""

import json

from ._coarsegeo import (
    REPORT_SCHEMA_VERSION,
    AlphabetError,
    ConfigError,
    FixtureError,
    GroupModel,
    PreconditionError,
    ResourceError,
)
from . import _coarsegeo as _core

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "AlphabetError",
    "ConfigError",
    "FixtureError",
    "GroupModel",
    "PreconditionError",
    "ResourceError",
    "compute_constants",
    "run_experiment",
]


def run_experiment(config, base_dir="."):
    """Run a config (dict or JSON text) and return the report as a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.run_experiment(text, base_dir))


def compute_constants(rates, lam=1, c=0):
    text = rates if isinstance(rates, str) else json.dumps(rates)
    return json.loads(_core.compute_constants(text, lam, c))
