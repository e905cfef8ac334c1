"""Exception types shared across the package."""


class GraphvarError(Exception):
    """Base class for errors raised by this package."""


class FormatError(GraphvarError, ValueError):
    """Malformed input data (graph records, CSV datasets, report files)."""


class InfeasibleError(GraphvarError, ValueError):
    """Request is out of the supported size range (e.g. census on too many nodes)."""
