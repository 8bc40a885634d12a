"""Hyperparameter sweep configuration module."""
import itertools
import typing as ty

import pydantic as pyd

SWEPT_FIELDS = ('lam', 'r', 'p', 'omega')
"""SolverConfig fields that a sweep may vary, in summary-table order."""


class SweepGrid(pyd.BaseModel):
    """Value lists of the swept hyperparameters.  Parameters left as None keep the value
    of the base configuration; the grid is the Cartesian product of the given lists."""

    lam: list[pyd.PositiveFloat] | None = None
    r: list[float] | None = None
    p: list[float] | None = None
    omega: list[pyd.PositiveFloat] | None = None

    @pyd.model_validator(mode='after')
    def _not_empty(self) -> ty.Self:
        """Ensure that at least one parameter is swept over at least one value."""
        assert any(getattr(self, f) for f in SWEPT_FIELDS), 'Failed requirement: non-empty grid'
        return self

    @property
    def swept(self) -> list[str]:
        """Names of the parameters being swept."""
        return [f for f in SWEPT_FIELDS if getattr(self, f)]

    def points(self) -> list[dict[str, float]]:
        """All grid points as SolverConfig overrides, sorted by the swept values."""
        names = self.swept
        combos = itertools.product(*(sorted(getattr(self, f)) for f in names))
        return [dict(zip(names, combo)) for combo in combos]
