"""Module containing configuration dataclasses for the clustering toolkit."""

from .manifest import DatasetManifest, ViewFileInfo
from .solver import SolverConfig, SolverSettings
from .sweep import SweepGrid
