"""Exceptions and warning categories raised by the clustering toolkit."""


class ClusteringError(Exception):
    """Base class of all errors raised by this package."""


class DomainError(ClusteringError, ValueError):
    """An argument lies outside the domain of the operation (e.g. ``p`` outside (0, 1])."""


class ImaginaryResidueError(ClusteringError):
    """An inverse mode-3 DFT produced a non-negligible imaginary part, i.e. the spectrum
    was not conjugate symmetric."""


class ConfigError(ClusteringError):
    """Hyperparameters are inconsistent with the data they are applied to."""


class EmptyClusterError(ClusteringError):
    """A normalised objective was requested for a partition with an empty cluster."""


class LengthMismatchError(ClusteringError, ValueError):
    """Two label vectors that must be compared have different lengths."""


class ManifestError(ClusteringError):
    """A dataset manifest is missing, unreadable or inconsistent."""


class ShapeError(ClusteringError):
    """A data file does not have the dimensions declared in its manifest."""


class ParseError(ClusteringError):
    """A data file contains a cell that cannot be parsed or is out of range."""


class ClusteringWarning(UserWarning):
    """Base class of warnings for conditions that are resolved automatically."""


class DegenerateAnchorWarning(ClusteringWarning):
    """A sample's k+1 nearest anchors are equidistant; uniform 1/k weights were used."""


class DeadAnchorWarning(ClusteringWarning):
    """An anchor received no weight from any sample and was dropped."""


class ZeroTraceWarning(ClusteringWarning):
    """A view has a zero within-cluster trace; all weight went to the zero-trace views."""
