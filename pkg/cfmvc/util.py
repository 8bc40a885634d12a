"""Utility functions and constants."""
import numpy as np
import numpy.typing as npt

IMAG_TOL = 1e-8
"""Default tolerance on the imaginary residue of an inverse mode-3 DFT."""

GST_MAX_ITER = 50
"""Maximum number of fixed-point iterations of the generalised soft-thresholding solver."""

GST_TOL = 1e-10
"""Step size below which the generalised soft-thresholding iteration stops."""

LITE_KMEANS_ITER = 10
"""Lloyd iterations of the lite-k-means routine (anchor selection and label initialisation)."""

FeatureMatrix = npt.NDArray[np.float64]
"""N x d_v real matrix, one sample per row."""

DistanceMatrix = npt.NDArray[np.float64]
"""N x N symmetric, zero-diagonal distance matrix."""

SimilarityMatrix = npt.NDArray[np.float64]
"""N x N symmetric, doubly-stochastic similarity matrix."""

LabelMatrix = npt.NDArray[np.int64]
"""N x C one-hot cluster assignment matrix."""

LabelVector = npt.NDArray[np.int64]
"""N integer cluster ids in [0, C)."""


def one_hot(ids: npt.ArrayLike, c: int) -> LabelMatrix:
    """Convert a vector of cluster ids to an N x C one-hot matrix."""
    ids = np.asarray(ids, dtype=np.int64)
    y = np.zeros((ids.size, c), dtype=np.int64)
    y[np.arange(ids.size), ids] = 1
    return y


def label_ids(y: npt.ArrayLike) -> LabelVector:
    """Convert a one-hot label matrix to a vector of cluster ids (first 1 of each row)."""
    return np.argmax(np.asarray(y), axis=1).astype(np.int64)
