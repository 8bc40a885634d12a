"""Solver configuration module: hyperparameters of the alternating minimisation."""
import typing as ty

import pydantic as pyd
from annotated_types import Gt, Le
from pydantic_settings import BaseSettings, SettingsConfigDict

Ratio = ty.Annotated[float, Gt(0), Le(1)]
"""A fraction in (0, 1]."""

ExponentP = ty.Annotated[float, Gt(0), Le(1)]
"""Schatten exponent, in (0, 1]."""


class SolverConfig(pyd.BaseModel):
    """Hyperparameters of the multi-view solver.

    The penalty schedule starts at mu = 1e-4 and grows by rho = 1.1 up to 1e10."""

    model_config = pyd.ConfigDict(extra='forbid')

    lam: pyd.PositiveFloat = pyd.Field(1.0, title='lambda')
    """Trade-off between the weighted trace term and the tensor Schatten p-norm."""

    r: ty.Annotated[float, Gt(1)] = 3.0
    """Exponent of the adaptive view weights alpha_v**r."""

    p: ExponentP = 0.5
    """Exponent of the tensor Schatten p-norm."""

    omega: pyd.PositiveFloat = 0.01
    """Cut-off of the Butterworth similarity-to-distance filter, shared by all views."""

    anchors: pyd.PositiveInt | Ratio = 0.5
    """Number of anchors per view: an absolute count, or a ratio of N when fractional."""

    k_nn: pyd.PositiveInt = 5
    """Number of nearest anchors each sample connects to."""

    rho: ty.Annotated[float, Gt(1)] = 1.1
    """Growth factor of the penalty parameter."""

    mu0: pyd.PositiveFloat = 1e-4
    """Initial penalty parameter."""

    mu_max: pyd.PositiveFloat = 1e10
    """Cap of the penalty parameter."""

    max_iter: pyd.PositiveInt = 300
    """Maximum number of outer iterations."""

    tol: pyd.NonNegativeFloat = 1e-6
    """Stopping threshold on the residual sum_v ||J_v - Y_v||_F^2."""

    seed: int = 0
    """Seed of every random choice (anchor selection, label initialisation)."""

    sweeps: pyd.PositiveInt = 1
    """Row sweeps per view per outer iteration."""

    distance: ty.Literal['butterworth', 'euclidean'] = 'butterworth'
    """How the per-view distance matrices are built."""

    init: ty.Literal['kmeans', 'spectral'] = 'kmeans'
    """Label initialisation, the same in both distance modes: lite-k-means on the raw
    features ('kmeans') or on the spectral embedding of the anchor graph ('spectral')."""

    imag_tol: pyd.PositiveFloat = 1e-8
    """Largest imaginary residue accepted from an inverse mode-3 DFT."""

    workers: pyd.PositiveInt = 1
    """Threads used for per-view work (graph construction and label sweeps)."""

    @pyd.model_validator(mode='after')
    def _check_penalty(self) -> ty.Self:
        """Ensure that the penalty cap is not below its starting value."""
        assert self.mu_max >= self.mu0, 'Failed requirement: mu_max >= mu0'
        return self


class SolverSettings(BaseSettings, SolverConfig):
    """SolverConfig whose fields may be overridden by ``CFMVC_``-prefixed environment
    variables (e.g. ``CFMVC_OMEGA=0.005``).  Keyword arguments take precedence over the
    environment.  Only the command-line front end uses this class."""

    model_config = SettingsConfigDict(env_prefix='CFMVC_', extra='ignore')

    def to_config(self) -> SolverConfig:
        """Drop the settings behaviour, returning a plain SolverConfig."""
        return SolverConfig.model_validate(self.model_dump())
