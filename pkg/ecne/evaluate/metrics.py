from abc import ABC, abstractmethod, abstractstaticmethod
from enum import Enum

import numpy as np

__all__ = ["Comparative", "StatusKey", "Metric", "MicroF1", "MacroF1", "NMI", "AUC"]


class Comparative(Enum):
    DIFF = 'diff'  # ref - value
    NONE = 'none'


def compare_status_values(comp, x, y):
    if comp == Comparative.DIFF:
        return x - y
    if comp == Comparative.NONE:
        return None
    raise ValueError("Unknown Comparative '{}'".format(comp))


class StatusKey(ABC):
    """
    Fundamental building block of the :class:`Evaluator`'s mechanics. Every :class:`TaskFunction` is tied
    to one or more :class:`~StatusKey`. The bare bone class only expects an attribute `value` and a
    class attribute `NAME`, the `str` key by which to fetch this `StatusKey`.

    NOTE: `NAME` must be unique among the keys registered on one `Evaluator`. This is not checked at runtime.
    """
    NAME = NotImplemented

    def __init__(self):
        self.value = None


class Metric(StatusKey):
    """
    A :class:`~Metric` holds the values of one score over independent runs (one per seed). Its `value` is
    either None (not computed) or a sequence of per-run floats. Displayed values are the mean over runs
    together with the standard deviation, the way results are reported across the evaluation harness.
    """

    @abstractstaticmethod
    def description():
        """
        String description of what this metric is supposed to have computed
        """

    @abstractstaticmethod
    def friendly_name():
        """
        String friendly human recognizable name for this metric
        """

    def get_comparative(self):
        """
        How does a value of this metric compare with another value of the same metric. Refer to
        :method:`~compare_status_values` function. Every score in this package is higher-is-better.
        """
        return Comparative.DIFF

    def get_runs(self):
        if self.value is None:
            return np.empty(0)
        return np.atleast_1d(np.asarray(self.value, dtype=np.float64))

    def get_value(self):
        runs = self.get_runs()
        return float(runs.mean()) if runs.size else float('nan')

    def get_std(self):
        runs = self.get_runs()
        return float(runs.std()) if runs.size else float('nan')


class MicroF1(Metric):
    NAME = 'micro_f1'

    @staticmethod
    def description():
        return "F1 pooled over every test edge (equals accuracy for single-label classification)"

    @staticmethod
    def friendly_name():
        return 'micro-F1'


class MacroF1(Metric):
    NAME = 'macro_f1'

    @staticmethod
    def description():
        return "Unweighted mean of the per-community F1 scores on the test edges"

    @staticmethod
    def friendly_name():
        return 'macro-F1'


class NMI(Metric):
    NAME = 'nmi'

    @staticmethod
    def description():
        return "Normalized mutual information between k-means clusters and community labels of the edges"

    @staticmethod
    def friendly_name():
        return 'NMI'


class AUC(Metric):
    NAME = 'auc'

    @staticmethod
    def description():
        return "Area under the ROC curve of the link plausibility scores on held-out node pairs"

    @staticmethod
    def friendly_name():
        return 'AUC'
