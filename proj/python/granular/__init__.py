"""Python front end for the granular toolkit."""

from ._granular import (
    EmptyInputError,
    Error,
    ParameterError,
    ParseError,
    approximate,
    cli,
    close_open_restart,
    config_keys,
    default_config,
    delta_pheromone,
    effective_config,
    evaluate,
    fcm,
    normalize_errors,
    run,
    som_granules,
)

__all__ = [
    "EmptyInputError",
    "Error",
    "ParameterError",
    "ParseError",
    "approximate",
    "cli",
    "close_open_restart",
    "config_keys",
    "default_config",
    "delta_pheromone",
    "effective_config",
    "evaluate",
    "fcm",
    "normalize_errors",
    "run",
    "som_granules",
]
