"""Minimum sum-of-squares clustering with BigVNSClust, Big-means and K-means."""

from .bigvns import BigVnsParams, ClusteringResult, big_vns_clust, kmeans_full, shake_centroids
from .core import CentroidSet, as_data_matrix, assign_points, draw_sample, objective, squared_distance, update_centroids
from .errors import (
    AggregationError,
    ClusteringError,
    ClusteringFailure,
    DegenerateSampleError,
    IngestionError,
    InvalidSolutionError,
    SeedingError,
    ShakingError,
)
from .kmeans import LloydOutcome, LloydParams, kmeanspp_next_center, kmeanspp_seed, lloyd

__version__ = "0.1.0"
