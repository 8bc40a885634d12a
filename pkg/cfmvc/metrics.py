"""External clustering quality metrics: accuracy under the best cluster-to-class matching,
normalised mutual information and purity.

All three are invariant to renaming the predicted cluster ids and lie in [0, 1].
"""
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from .exceptions import DomainError, LengthMismatchError
from .util import LabelVector


def _check_pair(pred: npt.ArrayLike, truth: npt.ArrayLike) -> tuple[LabelVector, LabelVector]:
    pred = np.asarray(pred, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if pred.size != truth.size:
        raise LengthMismatchError(f'{pred.size} predicted labels against {truth.size} true labels')
    if pred.size == 0:
        raise DomainError('Cannot score an empty labelling')
    return pred, truth


def accuracy(pred: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """Fraction of samples matched under the best one-to-one mapping of predicted clusters
    onto true classes (optimal assignment on the contingency table)."""
    pred, truth = _check_pair(pred, truth)
    table = contingency_matrix(truth, pred)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / pred.size)


def nmi(pred: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """Mutual information over the geometric mean of the two entropies (natural log).

    A labelling with a single cluster has zero entropy; the score is then 0.
    """
    pred, truth = _check_pair(pred, truth)
    if np.unique(pred).size < 2 or np.unique(truth).size < 2:
        return 0.0
    score = normalized_mutual_info_score(truth, pred, average_method='geometric')
    return float(np.clip(score, 0.0, 1.0))


def purity(pred: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """Share of samples belonging to the majority true class of their predicted cluster."""
    pred, truth = _check_pair(pred, truth)
    table = contingency_matrix(truth, pred)
    return float(table.max(axis=0).sum() / pred.size)


@dataclass(frozen=True)
class Scores:
    """The three metrics of one labelling."""
    acc: float
    nmi: float
    purity: float


def evaluate(pred: npt.ArrayLike, truth: npt.ArrayLike) -> Scores:
    """All metrics of ``pred`` against ``truth``."""
    return Scores(acc=accuracy(pred, truth), nmi=nmi(pred, truth), purity=purity(pred, truth))
