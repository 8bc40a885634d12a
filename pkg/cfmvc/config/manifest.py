"""Dataset manifest module: the description of a multi-view dataset directory."""
import typing as ty

import pydantic as pyd

MANIFEST_NAME = 'manifest.json'
"""File name of the manifest inside a dataset directory."""

MANIFEST_VERSION = 1
"""Version of the manifest format written by this package."""


class ViewFileInfo(pyd.BaseModel):
    """One view of a dataset: a CSV file of N rows and ``cols`` comma-separated reals."""

    model_config = pyd.ConfigDict(extra='forbid')

    path: str
    """Path of the view file, relative to the dataset directory."""

    name: str
    """Human-readable identifier of the view, e.g. "HOG"."""

    rows: pyd.PositiveInt
    """Declared number of samples."""

    cols: pyd.PositiveInt
    """Declared feature dimension d_v."""


class DatasetManifest(pyd.BaseModel):
    """Contents of ``manifest.json``.

    Example::

        {"version": 1, "n": 200, "c": 2,
         "views": [{"path": "view_1.csv", "name": "xy", "rows": 200, "cols": 2}],
         "labels": "labels.csv"}
    """

    model_config = pyd.ConfigDict(extra='forbid')

    version: ty.Literal[1] = MANIFEST_VERSION
    """Format version."""

    n: pyd.PositiveInt
    """Number of samples N, shared by all views."""

    c: pyd.PositiveInt
    """Number of clusters C (label ids lie in [0, C))."""

    views: ty.Annotated[list[ViewFileInfo], pyd.Field(min_length=1)]
    """The view files, in view order."""

    labels: str | None = None
    """Path of the single-column ground-truth label file, if any."""

    @pyd.model_validator(mode='after')
    def _rows_match_n(self) -> ty.Self:
        """Ensure that every view declares N rows."""
        for view in self.views:
            assert view.rows == self.n, \
                f'Failed requirement: view {view.path!r} declares {view.rows} rows, n = {self.n}'
        return self
