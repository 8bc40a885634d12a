"""Synthetic multi-view datasets: two moons, three concentric rings and Gaussian blobs.

The toy datasets have a second view derived from the first by a DFT of every sample's
coordinate vector, stored as the real parts followed by the imaginary parts.  All
generators are deterministic given the seed.
"""
import numpy as np
import numpy.typing as npt
from scipy import fft
from scipy.stats import special_ortho_group
from sklearn.datasets import make_moons

from .data import MultiViewDataset
from .exceptions import DomainError
from .util import FeatureMatrix

RING_RADII = (1.0, 2.0, 3.0)


def fft_view(x: npt.ArrayLike) -> FeatureMatrix:
    """``[Re(F x_i), Im(F x_i)]`` for every row x_i, F the unnormalised DFT."""
    f = fft.fft(np.asarray(x, dtype=np.float64), axis=1)
    return np.hstack([f.real, f.imag])


def gen_two_moon(n: int = 200, noise: float = 0.05, seed: int = 0) -> MultiViewDataset:
    """Two interleaved half circles of n/2 samples each, with Gaussian noise.

    Raises:
        DomainError: If n is odd or below 2, or noise is negative.
    """
    if n < 2 or n % 2:
        raise DomainError(f'two-moon needs an even n >= 2, got {n}')
    if noise < 0:
        raise DomainError(f'noise must be nonnegative, got {noise}')
    x, y = make_moons(n_samples=n, shuffle=True, noise=noise or None, random_state=seed)
    return MultiViewDataset(views=[x, fft_view(x)], c=2, truth=y, names=['xy', 'fft'])


def _split(n: int, c: int) -> list[int]:
    return [n // c + (i < n % c) for i in range(c)]


def gen_three_ring(n: int = 200, noise: float = 0.05, seed: int = 0) -> MultiViewDataset:
    """Three concentric rings of radii 1, 2 and 3 with evenly spaced angles, sizes
    differing by at most one, and Gaussian noise.

    Raises:
        DomainError: If n < 3 or noise is negative.
    """
    if n < 3:
        raise DomainError(f'three-ring needs n >= 3, got {n}')
    if noise < 0:
        raise DomainError(f'noise must be nonnegative, got {noise}')
    rng = np.random.default_rng(seed)
    points, labels = [], []
    for ring, (size, radius) in enumerate(zip(_split(n, 3), RING_RADII)):
        angles = np.linspace(0.0, 2 * np.pi, size, endpoint=False)
        xy = radius * np.column_stack([np.cos(angles), np.sin(angles)])
        points.append(xy + rng.normal(0.0, noise, xy.shape) if noise else xy)
        labels.append(np.full(size, ring))
    order = rng.permutation(n)
    x = np.vstack(points)[order]
    return MultiViewDataset(views=[x, fft_view(x)], c=3, truth=np.concatenate(labels)[order],
                            names=['xy', 'fft'])


def blob_sizes(n: int, c: int, imbalance: float = 1.0) -> list[int]:
    """Cluster sizes in geometric progression with largest/smallest ratio ``imbalance``,
    rounded to sum to n by largest remainder (ties to the lower index)."""
    weights = imbalance ** (-np.arange(c) / max(c - 1, 1))
    raw = n * weights / weights.sum()
    sizes = np.floor(raw).astype(int)
    remainder = n - sizes.sum()
    order = np.argsort(-(raw - sizes), kind='stable')
    sizes[order[:remainder]] += 1
    return sizes.tolist()


def gen_blobs(n: int, c: int, dims: int = 2, separation: float = 10.0, imbalance: float = 1.0,
              views: int = 1, seed: int = 0, view_noise: float = 0.1) -> MultiViewDataset:
    """Isotropic unit-variance Gaussian blobs.

    Centres lie on a circle of radius ``separation`` in the first two coordinates (on a
    line with spacing ``separation`` when dims = 1).  Every extra view is a seeded random
    rotation of the first view plus Gaussian noise of scale ``view_noise``.

    Raises:
        DomainError: On c < 2, n < c, dims < 1, views < 1, imbalance < 1, or an
            imbalance so large that some cluster would be empty.
    """
    if c < 2 or n < c or dims < 1 or views < 1:
        raise DomainError(f'Invalid blob counts: n={n}, c={c}, dims={dims}, views={views}')
    if imbalance < 1 or view_noise < 0:
        raise DomainError(f'imbalance must be >= 1 and view_noise >= 0, got {imbalance}, {view_noise}')
    sizes = blob_sizes(n, c, imbalance)
    if min(sizes) < 1:
        raise DomainError(f'imbalance {imbalance} leaves an empty cluster for n = {n}')

    rng = np.random.default_rng(seed)
    centres = np.zeros((c, dims))
    if dims == 1:
        centres[:, 0] = separation * np.arange(c)
    else:
        angles = 2 * np.pi * np.arange(c) / c
        centres[:, 0] = separation * np.cos(angles)
        centres[:, 1] = separation * np.sin(angles)
    truth = np.repeat(np.arange(c), sizes)
    x = centres[truth] + rng.normal(size=(n, dims))
    order = rng.permutation(n)
    x, truth = x[order], truth[order]

    xs = [x]
    for _ in range(views - 1):
        rot = special_ortho_group.rvs(dims, random_state=rng) if dims > 1 else np.eye(1)
        xs.append(x @ rot.T + rng.normal(0.0, view_noise, x.shape))
    return MultiViewDataset(views=xs, c=c, truth=truth)
