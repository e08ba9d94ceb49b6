"""Shared exception types."""


class DataError(ValueError):
    """Malformed input data (treebank, grammar, constraints or model files)."""
