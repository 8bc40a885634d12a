"""Per-view graph construction: anchors, anchor graphs, doubly-stochastic similarities and
filtered distance matrices.

The pipeline of one view is::

    select_anchors -> build_anchor_graph -> doubly_stochastic -> butterworth_distance

Anchor graphs are kept sparse (``scipy.sparse.csr_array``); similarity and distance
matrices are dense N x N arrays because the label sweep reads every entry.
"""
import logging
import typing as ty
import warnings
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.spatial.distance import cdist, pdist, squareform
from sklearn.cluster import KMeans

from .config import SolverConfig
from .exceptions import ConfigError, DeadAnchorWarning, DegenerateAnchorWarning, DomainError
from .util import LITE_KMEANS_ITER, DistanceMatrix, FeatureMatrix, LabelVector, SimilarityMatrix

logger = logging.getLogger(__name__)

AnchorGraph = sparse.csr_array
"""N x theta row-stochastic sparse affinity between samples and anchors."""


def _as_features(x: npt.ArrayLike) -> FeatureMatrix:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1:
        raise DomainError(f'Feature matrix must be 2-D with at least one row, got shape {x.shape}')
    if not np.isfinite(x).all():
        raise DomainError('Feature matrix contains NaN or Inf')
    return x


def lite_kmeans(x: npt.ArrayLike, c: int, seed: int) -> tuple[LabelVector, FeatureMatrix]:
    """Lightweight k-means: seeded k-means++ start followed by a few Lloyd iterations.

    Returns:
        The cluster id of every row and the c x d centroid matrix.
    """
    x = _as_features(x)
    if not 1 <= c <= x.shape[0]:
        raise DomainError(f'Cannot form {c} clusters from {x.shape[0]} samples')
    km = KMeans(n_clusters=c, init='k-means++', n_init=1, max_iter=LITE_KMEANS_ITER,
                random_state=seed)
    with warnings.catch_warnings():
        # duplicate points leave fewer distinct centroids than requested; that is fine here
        warnings.filterwarnings('ignore', message='Number of distinct clusters')
        labels = km.fit_predict(x)
    return labels.astype(np.int64), km.cluster_centers_


def anchor_count(theta: int | float, n: int) -> int:
    """Resolve the anchor setting: an int is an absolute count, a float in (0, 1] a ratio of n."""
    if isinstance(theta, (int, np.integer)) and not isinstance(theta, bool):
        return int(theta)
    if not 0 < theta <= 1:
        raise DomainError(f'Anchor ratio must lie in (0, 1], got {theta}')
    return int(min(n, max(1, round(theta * n))))


def select_anchors(x: npt.ArrayLike, theta: int, seed: int, c: int = 1) -> FeatureMatrix:
    """Pick ``theta`` anchor points for a view by lite-k-means.

    With ``theta == N`` every sample is an anchor (returned in seeded random order).

    Raises:
        DomainError: If theta > N or theta < c.
    """
    x = _as_features(x)
    n = x.shape[0]
    if theta > n or theta < max(c, 1):
        raise DomainError(f'Anchor count {theta} outside [{max(c, 1)}, {n}]')
    if theta == n:
        return x[np.random.default_rng(seed).permutation(n)]
    _, centers = lite_kmeans(x, theta, seed)
    return centers


def build_anchor_graph(x: npt.ArrayLike, anchors: npt.ArrayLike, k: int) -> AnchorGraph:
    """Connect every sample to its k nearest anchors with closed-form simplex weights.

    With squared distances ``delta`` of a sample to its anchors sorted ascending (ties by
    lowest anchor index), the weight of the j-th nearest anchor is
    ``(delta[k] - delta[j]) / (k * delta[k] - sum(delta[:k]))``.  A sample whose k+1
    nearest distances are all equal gets uniform 1/k weights and a
    DegenerateAnchorWarning.

    Raises:
        DomainError: Unless 1 <= k < number of anchors.
    """
    x = _as_features(x)
    anchors = _as_features(anchors)
    n, theta = x.shape[0], anchors.shape[0]
    if not 1 <= k < theta:
        raise DomainError(f'k = {k} must satisfy 1 <= k < {theta} (number of anchors)')

    dist = cdist(x, anchors, 'sqeuclidean')
    nearest = np.argsort(dist, axis=1, kind='stable')[:, :k + 1]
    delta = np.take_along_axis(dist, nearest, axis=1)
    num = delta[:, k:k + 1] - delta[:, :k]
    denom = num.sum(axis=1)
    degenerate = denom <= 0
    weights = np.empty_like(num)
    weights[~degenerate] = num[~degenerate] / denom[~degenerate, None]
    if degenerate.any():
        weights[degenerate] = 1.0 / k
        rows = np.flatnonzero(degenerate)
        warnings.warn(
            f'{rows.size} sample(s) equidistant from their {k + 1} nearest anchors '
            f'(first row {rows[0]}); using uniform weights',
            DegenerateAnchorWarning, stacklevel=2)

    b = sparse.csr_array(
        (weights.ravel(), (np.repeat(np.arange(n), k), nearest[:, :k].ravel())),
        shape=(n, theta))
    b.eliminate_zeros()
    return b


def _live_anchors(b: AnchorGraph) -> tuple[AnchorGraph, npt.NDArray[np.float64]]:
    """Drop anchors without mass, returning the reduced graph and its column sums."""
    mass = np.asarray(b.sum(axis=0)).ravel()
    dead = mass <= 0
    if dead.any():
        warnings.warn(f'Dropping {int(dead.sum())} anchor(s) without assigned mass',
                      DeadAnchorWarning, stacklevel=3)
        live = np.flatnonzero(~dead)
        b = b[:, live]
        mass = mass[live]
    return b, mass


def doubly_stochastic(b: AnchorGraph | npt.ArrayLike) -> SimilarityMatrix:
    """Similarity ``W = B diag(1 / colsum(B)) B^T``, symmetrised.

    Rows of W sum to one whenever B is row-stochastic.  Anchors whose column of B sums to
    zero are dropped with a DeadAnchorWarning.
    """
    b, mass = _live_anchors(sparse.csr_array(b, dtype=np.float64))
    w = (b @ sparse.diags_array(1.0 / mass) @ b.T).toarray()
    return (w + w.T) / 2


def butterworth_distance(w: npt.ArrayLike, omega: float) -> DistanceMatrix:
    """Order-4 Butterworth filter of a similarity: ``d = sqrt(1 / (1 + (w / omega)**4))``
    off the diagonal, 0 on it.

    Raises:
        DomainError: If omega <= 0.
    """
    if not omega > 0:
        raise DomainError(f'omega must be positive, got {omega}')
    w = np.asarray(w, dtype=np.float64)
    with np.errstate(over='ignore'):
        d = np.sqrt(1.0 / (1.0 + (w / omega) ** 4))
    np.fill_diagonal(d, 0.0)
    return d


def euclidean_distance(x: npt.ArrayLike) -> DistanceMatrix:
    """Pairwise squared Euclidean distances."""
    return squareform(pdist(_as_features(x), 'sqeuclidean'))


def anchor_embedding(b: AnchorGraph, c: int) -> FeatureMatrix:
    """Spectral embedding of the similarity induced by an anchor graph.

    The left singular vectors of ``B diag(colsum(B))**-1/2`` are the eigenvectors of
    ``doubly_stochastic(B)``; the leading c of them are returned with unit-length rows.
    """
    b, mass = _live_anchors(sparse.csr_array(b, dtype=np.float64))
    scaled = (b @ sparse.diags_array(mass ** -0.5)).toarray()
    u, _, _ = np.linalg.svd(scaled, full_matrices=False)
    emb = u[:, :c]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    return np.divide(emb, norms, out=np.zeros_like(emb), where=norms > 0)


@dataclass(frozen=True)
class ViewGraph:
    """Graph products of one view.

    Attributes:
        distances: The N x N distance matrix fed to the solver.
        anchor_graph: The anchor graph, or None in euclidean mode.
    """
    distances: DistanceMatrix
    anchor_graph: AnchorGraph | None = None


def view_distances(x: npt.ArrayLike, config: SolverConfig, c: int = 1, seed: int | None = None
                   ) -> ViewGraph:
    """Distance matrix of one view under ``config.distance``.

    In butterworth mode the full anchor pipeline runs; in euclidean mode the squared
    Euclidean distances of the raw features are returned.

    Raises:
        ConfigError: If the resolved anchor count is below c or not above ``config.k_nn``.
    """
    x = _as_features(x)
    if config.distance == 'euclidean':
        return ViewGraph(euclidean_distance(x))

    n = x.shape[0]
    theta = anchor_count(config.anchors, n)
    if theta > n or theta < c or theta <= config.k_nn:
        raise ConfigError(
            f'{theta} anchors for N = {n} samples must lie in [max(C, k_nn + 1), N] '
            f'with C = {c}, k_nn = {config.k_nn}')
    anchors = select_anchors(x, theta, config.seed if seed is None else seed, c)
    b = build_anchor_graph(x, anchors, config.k_nn)
    w = doubly_stochastic(b)
    logger.debug('Anchor graph: %d samples, %d anchors, %d nonzeros', n, theta, b.nnz)
    return ViewGraph(butterworth_distance(w, config.omega), b)


def similarity_floor(w: SimilarityMatrix, truth: ty.Sequence[int]) -> float:
    """Smallest similarity between two distinct samples of the same ground-truth class."""
    truth = np.asarray(truth)
    same = truth[:, None] == truth[None, :]
    np.fill_diagonal(same, False)
    if not same.any():
        raise DomainError('No pair of samples shares a class')
    return float(w[same].min())
