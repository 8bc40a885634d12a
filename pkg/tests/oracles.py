"""Reference implementations used as test oracles, written independently of the package."""
import itertools

import numpy as np


def naive_dft3(values):
    """Mode-3 DFT by direct summation."""
    n3 = values.shape[2]
    k = np.arange(n3)
    twiddle = np.exp(-2j * np.pi * np.outer(k, k) / n3)
    return np.einsum('abt,ft->abf', values, twiddle)


def naive_idft3(values):
    """Inverse mode-3 DFT by direct summation."""
    n3 = values.shape[2]
    k = np.arange(n3)
    twiddle = np.exp(2j * np.pi * np.outer(k, k) / n3)
    return np.einsum('abf,tf->abt', values, twiddle) / n3


def one_hot(ids, c):
    y = np.zeros((len(ids), c), dtype=np.int64)
    y[np.arange(len(ids)), ids] = 1
    return y


def slice_prox_oracle(values, tau):
    """Soft-threshold the singular values of every DFT slice (full spectrum, no symmetry
    shortcut) and transform back."""
    spectrum = naive_dft3(values)
    out = np.empty_like(spectrum)
    for i in range(spectrum.shape[2]):
        u, s, vh = np.linalg.svd(spectrum[:, :, i], full_matrices=False)
        out[:, :, i] = (u * np.maximum(s - tau, 0.0)) @ vh
    return naive_idft3(out).real


def schatten_sum(values, p):
    """Sum over DFT slices of sigma**p, with one dense SVD per slice."""
    spectrum = naive_dft3(values)
    return sum(np.sum(np.linalg.svd(spectrum[:, :, i], compute_uv=False) ** p)
               for i in range(spectrum.shape[2]))


def gst_grid(a, tau, p, step=1e-6):
    """Minimiser of tau x**p + (x - a)**2 / 2 over a grid on [0, a]."""
    x = np.arange(0.0, a + step, step)
    f = tau * x ** p + 0.5 * (x - a) ** 2
    best = int(np.argmin(f))
    return x[best], f[best]


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-based active set)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, v.size + 1) > css - 1)[0][-1]
    eta = (css[rho] - 1) / (rho + 1)
    return np.maximum(v - eta, 0.0)


def brute_force_accuracy(pred, truth):
    """Best matched fraction over all relabellings of the predicted ids."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    c = max(pred.max(), truth.max()) + 1
    return max(np.mean(np.asarray(perm)[pred] == truth)
               for perm in itertools.permutations(range(c)))


def partitions(n, c):
    """All label vectors of n samples over c clusters with no empty cluster."""
    for ids in itertools.product(range(c), repeat=n):
        if len(set(ids)) == c:
            yield np.array(ids)
