"""Centroid-free multi-view clustering solver.

Each view v contributes a distance matrix D_v and a one-hot label matrix Y_v (N x C).
The label matrices are the frontal slices of an N x C x V tensor Y that is kept close to
a low-rank surrogate J through an augmented Lagrangian with multiplier Q and penalty mu.
One outer iteration runs, in order:

1. a row sweep over every view, setting row k of Y_v to the cluster minimising
   ``2 alpha_v**r (D_v Y_v)[k, j] - mu S_v[k, j]`` with ``S_v = J_v - Q_v / mu``;
2. ``J = prox_schatten_p(Y + Q / mu, lam / mu, p)``;
3. ``Q = Q + mu (Y - J)``;
4. the view weights ``alpha_v ~ tr(Y_v^T D_v Y_v)**(1 / (1 - r))``;
5. ``mu = min(rho mu, mu_max)``.

The loop stops once ``sum_v ||J_v - Y_v||_F**2`` drops below ``tol``.  The final
assignment takes, for every sample, the cluster with the largest alpha-weighted vote.

The sweep keeps ``P_v = D_v Y_v`` (stored transposed, C x N) and patches two of its rows
per label change, so a sweep costs O(N C) plus O(N) per change.
"""
import logging
import time
import typing as ty
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from numba import njit
from scipy.optimize import linear_sum_assignment

from .config import SolverConfig
from .exceptions import ConfigError, DomainError, EmptyClusterError, ZeroTraceWarning
from .graph import (anchor_count, anchor_embedding, build_anchor_graph, lite_kmeans,
                    select_anchors, view_distances)
from .tensor3 import Tensor3, prox_schatten_p
from .util import IMAG_TOL, DistanceMatrix, FeatureMatrix, LabelMatrix, LabelVector, label_ids, one_hot

logger = logging.getLogger(__name__)


@njit(cache=True, nogil=True)
def _sweep_rows(d, pt, labels, coef, mu, s):
    """One ascending sweep over the rows of a view; updates ``pt`` and ``labels`` in
    place and returns the number of changed rows."""
    n = labels.shape[0]
    c = pt.shape[0]
    changes = 0
    for k in range(n):
        best = 0
        best_score = coef * pt[0, k] - mu * s[k, 0]
        for j in range(1, c):
            score = coef * pt[j, k] - mu * s[k, j]
            if score < best_score:
                best = j
                best_score = score
        old = labels[k]
        if best != old:
            for i in range(n):
                pt[old, i] -= d[k, i]
                pt[best, i] += d[k, i]
            labels[k] = best
            changes += 1
    return changes


@dataclass
class SolverState:
    """Variables of the solver after the last iteration, and the run trace.

    Attributes:
        labels: Label matrix of every view (frontal slices of the label tensor).
        j_tensor: Low-rank surrogate J (N x C x V).
        q_tensor: Lagrange multiplier Q (N x C x V).
        alpha: View weights; nonnegative, summing to one.
        mu: Penalty parameter.
        iteration: Number of outer iterations executed.
        residual_trace: ``sum_v ||J_v - Y_v||_F**2`` after every iteration.
        mu_trace: Penalty parameter after every iteration.
        alpha_trace: View weights after every iteration.
        changes_trace: Label changes per view in every iteration.
        converged: Whether the residual fell below the tolerance.
    """
    labels: list[LabelMatrix]
    j_tensor: Tensor3
    q_tensor: Tensor3
    alpha: npt.NDArray[np.float64]
    mu: float
    iteration: int = 0
    residual_trace: list[float] = field(default_factory=list)
    mu_trace: list[float] = field(default_factory=list)
    alpha_trace: list[list[float]] = field(default_factory=list)
    changes_trace: list[list[int]] = field(default_factory=list)
    converged: bool = False
    graph_seconds: float = 0.0
    init_seconds: float = 0.0
    solver_seconds: float = 0.0

    @property
    def label_ids(self) -> list[LabelVector]:
        """Per-view cluster ids."""
        return [label_ids(y) for y in self.labels]


def _as_distances(d: npt.ArrayLike) -> DistanceMatrix:
    d = np.ascontiguousarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DomainError(f'Distance matrix must be square, got shape {d.shape}')
    return d


def update_labels(view: int, d: npt.ArrayLike, s: npt.ArrayLike, alpha_v: float, r: float,
                  mu: float, labels_in: npt.ArrayLike, sweeps: int = 1) -> LabelMatrix:
    """Row-by-row label update of one view.

    Rows are visited in ascending order; row k moves to
    ``argmin_j 2 alpha_v**r (Y^T d_k)_j - mu s[k, j]`` (lowest j on ties), where Y already
    holds the new rows before k.

    Args:
        view: Index of the view, for logging.
        d: N x N distance matrix with zero diagonal.
        s: N x C matrix ``J_v - Q_v / mu``.
        alpha_v: Weight of the view.
        r: Weight exponent.
        mu: Penalty parameter.
        labels_in: Current one-hot N x C label matrix.
        sweeps: Number of full sweeps.

    Returns:
        The updated one-hot label matrix.
    """
    d = _as_distances(d)
    y = np.asarray(labels_in)
    ids = label_ids(y)
    pt = np.ascontiguousarray((d @ y).T, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)
    coef = 2.0 * alpha_v ** r
    changes = sum(_sweep_rows(d, pt, ids, coef, float(mu), s) for _ in range(sweeps))
    logger.debug('View %d: %d label change(s)', view, changes)
    return one_hot(ids, y.shape[1])


def update_alpha(traces: npt.ArrayLike, r: float) -> npt.NDArray[np.float64]:
    """View weights ``alpha_v = M_v**(1/(1-r)) / sum_u M_u**(1/(1-r))``.

    Views with a zero trace take all the weight, shared uniformly (the limit of the
    formula), and a ZeroTraceWarning is issued.

    Raises:
        DomainError: If a trace is negative or r <= 1.
    """
    m = np.asarray(traces, dtype=np.float64)
    if r <= 1:
        raise DomainError(f'r must exceed 1, got {r}')
    if (m < 0).any():
        raise DomainError(f'Traces must be nonnegative, got {m}')
    zero = m == 0
    if zero.any():
        warnings.warn(f'View(s) {np.flatnonzero(zero).tolist()} have zero trace; '
                      'weight shared among them', ZeroTraceWarning, stacklevel=2)
        return zero / zero.sum()
    log_w = np.log(m) / (1.0 - r)
    w = np.exp(log_w - log_w.max())
    return w / w.sum()


def update_j(y: Tensor3, q: Tensor3, lam: float, mu: float, p: float,
             imag_tol: float = IMAG_TOL) -> Tensor3:
    """Low-rank surrogate ``prox_schatten_p(Y + Q / mu, lam / mu, p)``."""
    if not mu > 0:
        raise DomainError(f'mu must be positive, got {mu}')
    return prox_schatten_p(Tensor3(y.values + q.values / mu), lam / mu, p, imag_tol)


def update_q(q: Tensor3, mu: float, y: Tensor3, j: Tensor3) -> Tensor3:
    """Multiplier ascent ``Q + mu (Y - J)``."""
    return Tensor3(q.values + mu * (y.values - j.values))


def update_mu(mu: float, rho: float, mu_max: float) -> float:
    """Penalty schedule ``min(rho mu, mu_max)``."""
    return min(rho * mu, mu_max)


def fuse_labels(labels: ty.Sequence[npt.ArrayLike], alpha: npt.ArrayLike, r: float) -> LabelMatrix:
    """Final assignment: one-hot at the argmax of ``sum_v alpha_v**r Y_v`` (lowest column
    on ties)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    votes = sum(a ** r * np.asarray(y, dtype=np.float64) for a, y in zip(alpha, labels))
    return one_hot(np.argmax(votes, axis=1), np.asarray(labels[0]).shape[1])


def trace_objective(y: npt.ArrayLike, d: npt.ArrayLike, normalized: bool = False) -> float:
    """``tr(G^T D G)`` with ``G = Y`` or, when normalized, ``G = Y (Y^T Y)**-1/2``.

    With squared Euclidean distances the normalized value is twice the k-means
    objective of the same partition.

    Raises:
        EmptyClusterError: If normalized and some cluster is empty.
    """
    g = np.asarray(y, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if normalized:
        sizes = g.sum(axis=0)
        if (sizes == 0).any():
            raise EmptyClusterError(f'Cluster(s) {np.flatnonzero(sizes == 0).tolist()} are empty')
        g = g / np.sqrt(sizes)
    return float(np.sum(g * (d @ g)))


def kmeans_objective(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Sum of squared distances of the samples to the mean of their cluster.

    Raises:
        EmptyClusterError: If some cluster is empty.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(y, dtype=np.float64)
    sizes = y.sum(axis=0)
    if (sizes == 0).any():
        raise EmptyClusterError(f'Cluster(s) {np.flatnonzero(sizes == 0).tolist()} are empty')
    means = (y.T @ x) / sizes[:, None]
    return float(np.sum((x - y @ means) ** 2))


def align_labels(reference: npt.ArrayLike, ids: npt.ArrayLike, c: int) -> LabelVector:
    """Rename the clusters of ``ids`` to maximise agreement with ``reference``."""
    reference = np.asarray(reference, dtype=np.int64)
    ids = np.asarray(ids, dtype=np.int64)
    overlap = np.bincount(ids * c + reference, minlength=c * c).reshape(c, c)
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    mapping = np.empty(c, dtype=np.int64)
    mapping[rows] = cols
    return mapping[ids]


def initial_labels(views: ty.Sequence[FeatureMatrix], c: int, config: SolverConfig,
                   anchor_graphs: ty.Sequence | None = None) -> list[LabelVector]:
    """Per-view initial cluster ids, aligned to the first view.

    With the spectral initialisation, lite-k-means runs on the anchor-graph embedding of
    each view (an anchor graph is built when none is given); otherwise on the raw
    features.
    """
    out = []
    for v, x in enumerate(views):
        if config.init == 'spectral':
            b = anchor_graphs[v] if anchor_graphs is not None else None
            if b is None:
                n = np.asarray(x).shape[0]
                theta = anchor_count(config.anchors, n)
                b = build_anchor_graph(x, select_anchors(x, theta, config.seed, c), config.k_nn)
            ids, _ = lite_kmeans(anchor_embedding(b, c), c, config.seed)
        else:
            ids, _ = lite_kmeans(x, c, config.seed)
        out.append(ids if v == 0 else align_labels(out[0], ids, c))
    return out


def _map(fn: ty.Callable, items: ty.Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def iterate(distances: ty.Sequence[npt.ArrayLike], initial: ty.Sequence[npt.ArrayLike], c: int,
            config: SolverConfig) -> SolverState:
    """Run the outer iterations from given distance matrices and initial cluster ids.

    J starts at Y, Q at zero, the weights at 1/V and mu at ``config.mu0``.
    """
    ds = [_as_distances(d) for d in distances]
    ids = [np.array(i, dtype=np.int64) for i in initial]
    n_views = len(ds)
    n = ds[0].shape[0]
    pts = [np.ascontiguousarray((d @ one_hot(i, c)).T) for d, i in zip(ds, ids)]

    y = Tensor3.from_slices([one_hot(i, c) for i in ids])
    state = SolverState(labels=[], j_tensor=y, q_tensor=Tensor3.zeros((n, c, n_views)),
                        alpha=np.full(n_views, 1.0 / n_views), mu=config.mu0)
    rows = np.arange(n)
    start = time.perf_counter()

    for it in range(1, config.max_iter + 1):
        s = state.j_tensor.values - state.q_tensor.values / state.mu
        coefs = 2.0 * state.alpha ** config.r

        def sweep(v: int) -> int:
            s_v = np.ascontiguousarray(s[:, :, v])
            return sum(_sweep_rows(ds[v], pts[v], ids[v], coefs[v], state.mu, s_v)
                       for _ in range(config.sweeps))

        changes = _map(sweep, range(n_views), config.workers)
        y = Tensor3.from_slices([one_hot(i, c) for i in ids])
        state.j_tensor = update_j(y, state.q_tensor, config.lam, state.mu, config.p, config.imag_tol)
        state.q_tensor = update_q(state.q_tensor, state.mu, y, state.j_tensor)
        traces = np.maximum([pt[i, rows].sum() for pt, i in zip(pts, ids)], 0.0)
        state.alpha = update_alpha(traces, config.r)
        state.mu = update_mu(state.mu, config.rho, config.mu_max)

        residual = float(np.sum((state.j_tensor.values - y.values) ** 2))
        state.iteration = it
        state.residual_trace.append(residual)
        state.mu_trace.append(state.mu)
        state.alpha_trace.append(state.alpha.tolist())
        state.changes_trace.append([int(ch) for ch in changes])
        logger.debug('Iteration %d: residual %.3e, mu %.3e, alpha %s, changes %s',
                     it, residual, state.mu, np.round(state.alpha, 4).tolist(), changes)
        if residual < config.tol:
            state.converged = True
            break

    state.labels = [one_hot(i, c) for i in ids]
    state.solver_seconds = time.perf_counter() - start
    logger.info('Solver stopped after %d iteration(s) (converged: %s), residual %.3e, alpha %s',
                state.iteration, state.converged,
                state.residual_trace[-1] if state.residual_trace else float('nan'),
                np.round(state.alpha, 4).tolist())
    return state


def _check_inputs(views: ty.Sequence[npt.ArrayLike], c: int) -> list[FeatureMatrix]:
    if not views:
        raise DomainError('At least one view is required')
    xs = []
    for v, x in enumerate(views):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or not np.isfinite(x).all():
            raise DomainError(f'View {v} must be a finite 2-D feature matrix')
        xs.append(x)
    sizes = {x.shape[0] for x in xs}
    if len(sizes) != 1:
        raise DomainError(f'Views disagree on the number of samples: {sorted(sizes)}')
    n = sizes.pop()
    if not 2 <= c <= n:
        raise ConfigError(f'Number of clusters C = {c} must lie in [2, N = {n}]')
    return xs


def solve(views: ty.Sequence[npt.ArrayLike], c: int, config: SolverConfig | None = None
          ) -> tuple[LabelMatrix, SolverState]:
    """Cluster the samples of a multi-view dataset into c clusters.

    Args:
        views: Feature matrices of the views, sharing the number of rows N.
        c: Number of clusters, 2 <= c <= N.
        config: Hyperparameters; defaults when None.

    Returns:
        The fused one-hot assignment and the final solver state.

    Raises:
        ConfigError: If c or the anchor settings do not fit the data.
        DomainError: If the views are not consistent finite matrices.
    """
    config = config or SolverConfig()
    xs = _check_inputs(views, c)

    start = time.perf_counter()
    graphs = _map(lambda x: view_distances(x, config, c), xs, config.workers)
    graph_seconds = time.perf_counter() - start

    start = time.perf_counter()
    init = initial_labels(xs, c, config, [g.anchor_graph for g in graphs])
    init_seconds = time.perf_counter() - start

    state = iterate([g.distances for g in graphs], init, c, config)
    state.graph_seconds = graph_seconds
    state.init_seconds = init_seconds
    return fuse_labels(state.labels, state.alpha, config.r), state
