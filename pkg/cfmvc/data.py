"""Multi-view datasets on disk.

A dataset directory holds ``manifest.json``, one ``view_<k>.csv`` per view (k from 1) and
optionally ``labels.csv``.  View files have one sample per line and comma-separated reals
written with 17 significant digits, so values survive a save/load round trip exactly.
The label file is a single column of integer cluster ids in [0, C).
"""
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import natsort
import numpy as np
import numpy.typing as npt
import pandas as pd
import pydantic as pyd
from scipy import io as sio
from scipy import sparse
from scipy.io.matlab import MatReadError

from .config.manifest import MANIFEST_NAME, DatasetManifest, ViewFileInfo
from .exceptions import DomainError, ManifestError, ParseError, ShapeError
from .util import FeatureMatrix, LabelVector

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
"""Format of view values; 17 significant digits round-trip every float64."""

LABELS_NAME = 'labels.csv'

MAT_LABEL_KEYS = ('Y', 'y', 'gt', 'truth', 'label', 'labels')
"""Variable names searched for ground-truth labels in imported .mat files."""


@dataclass(kw_only=True, eq=False)
class MultiViewDataset:
    """Views of the same N samples, with optional ground truth.

    Attributes:
        views: One N x d_v feature matrix per view.
        c: Number of clusters.
        truth: Ground-truth cluster ids, or None.
        names: Identifier of every view.
    """
    views: list[FeatureMatrix]
    c: int
    truth: LabelVector | None = None
    names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.views = [np.asarray(x, dtype=np.float64).reshape(len(x), -1) for x in self.views]
        if not self.views:
            raise DomainError('A dataset needs at least one view')
        sizes = {x.shape[0] for x in self.views}
        if len(sizes) != 1:
            raise ShapeError(f'Views disagree on the number of samples: {sorted(sizes)}')
        if self.c < 1:
            raise DomainError(f'Number of clusters must be positive, got {self.c}')
        if self.truth is not None:
            self.truth = np.asarray(self.truth, dtype=np.int64)
            if self.truth.shape != (self.n,):
                raise ShapeError(f'{self.truth.size} labels for {self.n} samples')
            if self.truth.size and (self.truth.min() < 0 or self.truth.max() >= self.c):
                raise DomainError(f'Label ids must lie in [0, {self.c})')
        if not self.names:
            self.names = [f'view_{k}' for k in range(1, len(self.views) + 1)]
        if len(self.names) != len(self.views):
            raise DomainError(f'{len(self.names)} names for {len(self.views)} views')

    @property
    def n(self) -> int:
        """Number of samples."""
        return self.views[0].shape[0]

    def manifest(self) -> DatasetManifest:
        """The manifest describing this dataset in the standard file layout."""
        return DatasetManifest(
            n=self.n, c=self.c,
            views=[ViewFileInfo(path=f'view_{k}.csv', name=name, rows=x.shape[0], cols=x.shape[1])
                   for k, (name, x) in enumerate(zip(self.names, self.views), start=1)],
            labels=LABELS_NAME if self.truth is not None else None)


def _read_matrix(path: Path) -> FeatureMatrix:
    """Read a headerless CSV of reals, reporting the first bad cell by file and line."""
    try:
        df = pd.read_csv(path, header=None, float_precision='round_trip')
    except pd.errors.EmptyDataError:
        return np.empty((0, 0))
    except pd.errors.ParserError as e:
        raise ParseError(f'{path}: {e}') from e
    for col in df.columns:
        values = pd.to_numeric(df[col], errors='coerce')
        bad = np.flatnonzero(~np.isfinite(values.to_numpy(dtype=np.float64)))
        if bad.size:
            row = int(bad[0])
            raise ParseError(
                f'{path}, line {row + 1}, column {col + 1}: '
                f'{df[col].iloc[row]!r} is not a finite number')
    return df.to_numpy(dtype=np.float64)


def _write_matrix(x: FeatureMatrix, path: Path) -> None:
    pd.DataFrame(x).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT,
                           lineterminator='\n')


def read_labels(path: str | os.PathLike, c: int | None = None) -> LabelVector:
    """Read a single-column file of integer cluster ids.

    Raises:
        ParseError: If a line is not an integer or, when c is given, lies outside [0, c).
            The message names the file and line.
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise ManifestError(f'Label file {path} not found') from e
    except pd.errors.EmptyDataError:
        return np.empty(0, dtype=np.int64)
    except pd.errors.ParserError as e:
        raise ParseError(f'{path}: {e}') from e
    if df.shape[1] != 1:
        raise ParseError(f'{path}: expected a single column, found {df.shape[1]}')
    cells = df[0].str.strip()
    values = pd.to_numeric(cells, errors='coerce')
    for row, (cell, value) in enumerate(zip(cells, values), start=1):
        if pd.isna(value) or value != int(value):
            raise ParseError(f'{path}, line {row}: {cell!r} is not an integer label')
        if c is not None and not 0 <= value < c:
            raise ParseError(f'{path}, line {row}: label {int(value)} outside [0, {c})')
    return values.to_numpy().astype(np.int64)


def write_labels(ids: npt.ArrayLike, path: str | os.PathLike) -> None:
    """Write cluster ids as a single column, one per line."""
    ids = np.asarray(ids, dtype=np.int64).ravel()
    Path(path).write_text(''.join(f'{i}\n' for i in ids))


def read_manifest(directory: str | os.PathLike) -> DatasetManifest:
    """Parse and validate the manifest of a dataset directory.

    Raises:
        ManifestError: If the file is missing, malformed or inconsistent.
    """
    path = Path(directory) / MANIFEST_NAME
    try:
        text = path.read_text()
    except (FileNotFoundError, NotADirectoryError) as e:
        raise ManifestError(f'No {MANIFEST_NAME} in {directory}') from e
    try:
        return DatasetManifest.model_validate_json(text)
    except pyd.ValidationError as e:
        raise ManifestError(f'Invalid manifest {path}: {e}') from e


def load_dataset(directory: str | os.PathLike) -> MultiViewDataset:
    """Load and validate a dataset directory.

    Raises:
        ManifestError: Missing or inconsistent manifest, or a referenced file is missing.
        ShapeError: A view file does not have the declared dimensions.
        ParseError: A cell is not a finite number, or a label is not an id in [0, C).
    """
    directory = Path(directory)
    manifest = read_manifest(directory)
    views = []
    for info in manifest.views:
        path = directory / info.path
        if not path.is_file():
            raise ManifestError(f'View file {path} listed in the manifest does not exist')
        x = _read_matrix(path)
        if x.shape != (info.rows, info.cols):
            raise ShapeError(f'{path}: manifest declares {info.rows} x {info.cols}, '
                             f'file holds {x.shape[0]} x {x.shape[1]}')
        views.append(x)

    truth = None
    if manifest.labels is not None:
        truth = read_labels(directory / manifest.labels, manifest.c)
        if truth.size != manifest.n:
            raise ShapeError(f'{directory / manifest.labels}: {truth.size} labels, '
                             f'manifest declares n = {manifest.n}')
    logger.debug('Loaded %s: N = %d, %d view(s)', directory, manifest.n, len(views))
    return MultiViewDataset(views=views, c=manifest.c, truth=truth,
                            names=[info.name for info in manifest.views])


def save_dataset(ds: MultiViewDataset, directory: str | os.PathLike) -> None:
    """Write a dataset directory (created if needed; existing files are overwritten)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = ds.manifest()
    for info, x in zip(manifest.views, ds.views):
        _write_matrix(x, directory / info.path)
    if ds.truth is not None:
        write_labels(ds.truth, directory / LABELS_NAME)
    (directory / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2) + '\n')


def _compact_ids(raw: npt.ArrayLike) -> tuple[LabelVector, int]:
    """Map arbitrary label values (e.g. 1-based ids) onto 0..C-1 in sorted order."""
    values, ids = np.unique(np.asarray(raw).ravel(), return_inverse=True)
    return ids.astype(np.int64), values.size


def import_mat(path: str | os.PathLike, out_dir: str | os.PathLike) -> MultiViewDataset:
    """Convert a MATLAB multi-view file to a dataset directory.

    The file must hold a cell array ``X`` of view matrices and a label vector under one
    of :data:`MAT_LABEL_KEYS`.  Views stored as d x N are transposed; label values are
    mapped to 0-based ids.

    Raises:
        ManifestError: If the views or labels cannot be found.
        ShapeError: If a view does not have N samples along either axis.
    """
    path = Path(path)
    try:
        mat = sio.loadmat(path)
    except (FileNotFoundError, MatReadError, ValueError) as e:
        raise ManifestError(f'Cannot read {path}: {e}') from e
    if 'X' not in mat:
        raise ManifestError(f'{path} has no cell array X of views')
    key = next((k for k in MAT_LABEL_KEYS if k in mat), None)
    if key is None:
        raise ManifestError(f'{path} has no label vector (looked for {", ".join(MAT_LABEL_KEYS)})')
    truth, c = _compact_ids(mat[key])
    n = truth.size

    views = []
    for v, x in enumerate(np.asarray(mat['X'], dtype=object).ravel()):
        x = x.toarray() if sparse.issparse(x) else np.asarray(x, dtype=np.float64)
        if x.shape[0] != n and x.ndim == 2 and x.shape[1] == n:
            x = x.T
        if x.shape[0] != n:
            raise ShapeError(f'{path}: view {v + 1} has shape {x.shape}, expected {n} samples')
        views.append(x)
    ds = MultiViewDataset(views=views, c=c, truth=truth)
    save_dataset(ds, out_dir)
    return ds


def import_csv_views(src_dir: str | os.PathLike, out_dir: str | os.PathLike,
                     labels: str | os.PathLike | None = None, c: int | None = None
                     ) -> MultiViewDataset:
    """Collect the ``*.csv`` view files of a directory, in natural order, into a dataset.

    Args:
        src_dir: Directory of headerless view files.
        out_dir: Dataset directory to write.
        labels: Optional label file; its values are mapped to 0-based ids.
        c: Number of clusters; taken from the labels when omitted.
    """
    src_dir = Path(src_dir)
    label_path = Path(labels).resolve() if labels is not None else None
    files = [p for p in natsort.natsorted(src_dir.glob('*.csv'), key=str)
             if p.resolve() != label_path]
    if not files:
        raise ManifestError(f'No CSV view files in {src_dir}')

    truth = None
    if label_path is not None:
        truth, found = _compact_ids(read_labels(label_path))
        c = c or found
    if c is None:
        raise DomainError('The number of clusters is required when no labels are given')
    ds = MultiViewDataset(views=[_read_matrix(p) for p in files], c=c, truth=truth,
                          names=[p.stem for p in files])
    save_dataset(ds, out_dir)
    return ds
