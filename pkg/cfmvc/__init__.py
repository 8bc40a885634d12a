"""Centroid-free multi-view clustering.

Clusters N samples observed through several views directly from per-view distance
matrices, without estimating centroids: discrete label sweeps per view, adaptive view
weights and a tensor Schatten p-norm proximal step that couples the views' label
matrices.
"""

from .config import SolverConfig
from .data import MultiViewDataset, load_dataset, save_dataset
from .exceptions import ClusteringError
from .metrics import accuracy, nmi, purity
from .solver import SolverState, solve

__all__ = [
    'ClusteringError', 'MultiViewDataset', 'SolverConfig', 'SolverState', 'accuracy',
    'load_dataset', 'nmi', 'purity', 'save_dataset', 'solve',
]
