"""Exception types raised across the package."""


class ClusteringError(Exception):
    """Base class for all package errors."""


class InvalidSolutionError(ClusteringError, ValueError):
    """A centroid set cannot be used for assignment (e.g. every slot is degenerate)."""


class DegenerateSampleError(ClusteringError):
    """Every sample point coincides with an already fixed center; draw a new sample."""


class SeedingError(ClusteringError, ValueError):
    """Not enough distinct points to place the requested number of centers."""


class ShakingError(ClusteringError):
    """A shaking neighborhood turned out to be empty."""


class ClusteringFailure(ClusteringError):
    """A run could not produce a valid solution after bounded retries."""


class IngestionError(ClusteringError, ValueError):
    """Malformed input data."""


class AggregationError(ClusteringError, ValueError):
    """Records do not cover every (dataset, k, algorithm) cell."""
