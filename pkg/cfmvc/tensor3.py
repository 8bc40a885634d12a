"""Third-order tensors, their mode-3 DFT, the tensor Schatten p-norm and its proximal
operator.

A tensor of dims (n1, n2, n3) is stored as a numpy array of that shape; frontal slice
``i`` is ``values[:, :, i]``.  The flat (serialised) element order is slice-major: all of
slice 0 in row-major order, then slice 1, and so on.

The proximal operator never materialises the t-SVD factors: each frequency-domain slice
is decomposed, its singular values are thresholded and the slice is rebuilt before the
inverse transform.  Only frequencies 0..n3//2 are decomposed; the remaining slices are
complex conjugates of those.
"""
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import fft

from .exceptions import DomainError, ImaginaryResidueError
from .util import GST_MAX_ITER, GST_TOL, IMAG_TOL

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Dense real third-order tensor of dims (n1, n2, n3).

    Attributes:
        values: Read-only float64 array of shape (n1, n2, n3); every element finite.
    """
    values: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 3 or min(values.shape) < 1:
            raise DomainError(f'Tensor3 needs three dims >= 1, got shape {values.shape}')
        if not np.isfinite(values).all():
            raise DomainError('Tensor3 values must be finite')
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @property
    def dims(self) -> tuple[int, int, int]:
        """The dims (n1, n2, n3)."""
        return self.values.shape

    def frontal(self, i: int) -> npt.NDArray[np.float64]:
        """Frontal slice ``i`` (an n1 x n2 matrix)."""
        return self.values[:, :, i]

    def to_flat(self) -> npt.NDArray[np.float64]:
        """Values in slice-major order."""
        return np.moveaxis(self.values, 2, 0).ravel()

    @staticmethod
    def from_flat(flat: npt.ArrayLike, dims: tuple[int, int, int]) -> 'Tensor3':
        """Inverse of :meth:`to_flat`."""
        n1, n2, n3 = dims
        return Tensor3(np.moveaxis(np.asarray(flat, dtype=np.float64).reshape(n3, n1, n2), 0, 2))

    @staticmethod
    def from_slices(slices: list[npt.ArrayLike]) -> 'Tensor3':
        """Stack equally-sized matrices as the frontal slices of a tensor."""
        return Tensor3(np.stack([np.asarray(s, dtype=np.float64) for s in slices], axis=2))

    @staticmethod
    def zeros(dims: tuple[int, int, int]) -> 'Tensor3':
        """The all-zeros tensor."""
        return Tensor3(np.zeros(dims))


@dataclass(frozen=True, eq=False)
class SpectrumStack:
    """Mode-3 DFT of a Tensor3: one complex n1 x n2 slice per frequency.

    Attributes:
        values: complex128 array of shape (n1, n2, n3); frequency ``i`` is ``values[:, :, i]``.
    """
    values: npt.NDArray[np.complex128]

    @property
    def dims(self) -> tuple[int, int, int]:
        """The dims (n1, n2, n3)."""
        return self.values.shape

    def frontal(self, i: int) -> npt.NDArray[np.complex128]:
        """Frequency slice ``i``."""
        return self.values[:, :, i]


def dft_mode3(t: Tensor3) -> SpectrumStack:
    """Unnormalised DFT of every mode-3 fiber, i.e. ``fft(t, [], 3)``."""
    return SpectrumStack(fft.fft(t.values, axis=2))


def idft_mode3(s: SpectrumStack, tol: float = IMAG_TOL) -> Tensor3:
    """Inverse mode-3 DFT, i.e. ``ifft(s, [], 3)``, returned as a real tensor.

    Raises:
        ImaginaryResidueError: If the largest imaginary magnitude exceeds ``tol``.
    """
    out = fft.ifft(s.values, axis=2)
    residue = float(np.max(np.abs(out.imag))) if out.size else 0.0
    if residue > tol:
        raise ImaginaryResidueError(
            f'Inverse DFT has imaginary residue {residue:.3e} > {tol:.1e}; '
            'the spectrum is not conjugate symmetric')
    if residue > IMAG_TOL:
        logger.warning('Inverse DFT imaginary residue %.3e accepted (tolerance %.1e)', residue, tol)
    return Tensor3(out.real)


def _check_p(p: float) -> None:
    if not 0 < p <= 1:
        raise DomainError(f'p must lie in (0, 1], got {p}')


def _half_spectrum_svd(
    values: npt.NDArray[np.float64]
) -> tuple[npt.NDArray, npt.NDArray, npt.NDArray, npt.NDArray[np.float64]]:
    """SVDs of the frequency slices 0..n3//2, plus the multiplicity of each slice in the
    full spectrum (2 for slices whose conjugate partner is skipped)."""
    n3 = values.shape[2]
    half = n3 // 2 + 1
    spectrum = fft.fft(values, axis=2)[:, :, :half]
    u, s, vh = np.linalg.svd(np.moveaxis(spectrum, 2, 0), full_matrices=False)
    mult = np.full(half, 2.0)
    mult[0] = 1.0
    if n3 % 2 == 0:
        mult[-1] = 1.0
    return u, s, vh, mult


def slice_singular_values(t: Tensor3) -> npt.NDArray[np.float64]:
    """Singular values of every frequency-domain frontal slice, shape (n3, min(n1, n2)),
    each row sorted in descending order."""
    u, s, vh, _ = _half_spectrum_svd(t.values)
    del u, vh
    n3 = t.dims[2]
    mirror = [n3 - i for i in range(n3 // 2 + 1, n3)]
    return np.concatenate([s, s[mirror]], axis=0) if mirror else s


def schatten_p_norm(t: Tensor3, p: float) -> float:
    """Tensor Schatten p-norm: (sum over frequency slices and singular values of
    sigma**p)**(1/p).  At p = 1 this is the tensor nuclear norm.

    Raises:
        DomainError: If p is outside (0, 1].
    """
    _check_p(p)
    _, s, _, mult = _half_spectrum_svd(t.values)
    total = float(np.sum(mult[:, None] * s ** p))
    return total ** (1.0 / p)


def _gst(a: npt.NDArray[np.float64], tau: float, p: float) -> npt.NDArray[np.float64]:
    """Vectorised generalised soft-thresholding of nonnegative values."""
    if tau == 0:
        return a.copy()
    if p == 1:
        return np.maximum(a - tau, 0.0)
    base = 2.0 * tau * (1.0 - p)
    threshold = base ** (1.0 / (2.0 - p)) + tau * p * base ** ((p - 1.0) / (2.0 - p))
    out = np.zeros_like(a)
    active = a > threshold
    if not active.any():
        return out
    a_act = a[active]
    x = a_act.copy()
    for _ in range(GST_MAX_ITER):
        x_new = a_act - tau * p * x ** (p - 1.0)
        step = np.max(np.abs(x_new - x))
        x = x_new
        if step < GST_TOL:
            break
    out[active] = x
    return out


def gst_scalar(a: float, tau: float, p: float) -> float:
    """Minimiser over x >= 0 of ``tau * x**p + (x - a)**2 / 2``.

    For p = 1 this is the soft threshold ``max(a - tau, 0)``.  For p < 1 the result is
    0 at or below the GST threshold
    ``(2 tau (1-p))**(1/(2-p)) + tau p (2 tau (1-p))**((p-1)/(2-p))`` and otherwise the
    larger fixed point of ``x = a - tau p x**(p-1)``, found by iterating from x = a.

    Raises:
        DomainError: On negative ``a`` or ``tau``, or p outside (0, 1].
    """
    _check_p(p)
    if a < 0 or tau < 0:
        raise DomainError(f'gst_scalar needs a >= 0 and tau >= 0, got a={a}, tau={tau}')
    return float(_gst(np.array([a], dtype=np.float64), tau, p)[0])


def prox_schatten_p(a: Tensor3, tau: float, p: float, imag_tol: float = IMAG_TOL) -> Tensor3:
    """Proximal step of the tensor Schatten p-norm.

    Every frequency slice ``U diag(sigma) V^H`` of ``dft_mode3(a)`` is replaced by
    ``U diag(gst(sigma, tau, p)) V^H`` and the result is transformed back.  With the
    unnormalised DFT this is the exact minimiser of
    ``(tau / n3) * ||X||_Sp**p + ||X - a||_F**2 / 2``.

    Raises:
        DomainError: If tau < 0 or p is outside (0, 1].
        ImaginaryResidueError: If the rebuilt spectrum does not transform back to a real
            tensor within ``imag_tol``.
    """
    _check_p(p)
    if tau < 0:
        raise DomainError(f'tau must be nonnegative, got {tau}')
    if tau == 0:
        return a

    n1, n2, n3 = a.dims
    u, s, vh, _ = _half_spectrum_svd(a.values)
    s_new = _gst(s.ravel(), tau, p).reshape(s.shape)
    half_slices = (u * s_new[:, None, :]) @ vh  # (half, n1, n2)

    spectrum = np.empty((n1, n2, n3), dtype=np.complex128)
    spectrum[:, :, :half_slices.shape[0]] = np.moveaxis(half_slices, 0, 2)
    for i in range(half_slices.shape[0], n3):
        spectrum[:, :, i] = np.conj(spectrum[:, :, n3 - i])
    return idft_mode3(SpectrumStack(spectrum), tol=imag_tol)
