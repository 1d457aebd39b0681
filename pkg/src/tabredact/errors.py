"""Exception types shared across the package."""


class TabRedactError(Exception):
    """Base class for all package errors."""


class DataError(TabRedactError):
    """Malformed input data (CSV, rows, schema violations)."""


class ConfigError(TabRedactError):
    """Invalid run configuration."""


class TrainingError(TabRedactError):
    """A model cannot be trained on the given data."""
