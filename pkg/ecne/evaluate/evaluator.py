from abc import ABC, abstractmethod
from collections import namedtuple
from copy import copy, deepcopy
from inspect import signature, Parameter

from .communities import EdgeLabeling
from .metrics import MicroF1, MacroF1, NMI, Metric
from .report import MetricReport
from .tasks import classify_edges, cluster_edges, nmi
from ..formatter import getLogger, make_one_method_summary_str, make_two_methods_summary_str, \
    default_display_filter_function
from ..utils import cast_tuple

logger = getLogger(__name__)

_TaskFunctionRegister = namedtuple("_TaskFunctionRegister", ('function', 'overriding', 'status'),
                                   module=__name__)

DEFAULT_SEEDS = (1, 2, 3, 4, 5)


class Evaluator:
    """
    Holds task functions for one embedding method. The user registers :class:`~TaskFunction` through
    :method:`~register_task_function` and then queries the `Evaluator` for some :class:`StatusKey`; the
    `Evaluator` calls the `TaskFunction` that can compute it with its embeddings and data.

    NOTE: Status keys are held in a dictionary like fashion. The user should never write directly on this
    dictionary and should go through the status methods defined on this class.

    :param embeddings: Edge embeddings of the method, row i for edge i
    :type embeddings: :class:`~ecne.embed.skipgram.EmbeddingMatrix`
    :param data: What the task functions evaluate against (ex.: {'labeling': EdgeLabeling})
    :type data: `dict`
    :param name: Method name, defaults to "<UnNamedMethod>"
    :type name: `str`, optional
    :param dataset: Dataset name, defaults to "<UnNamedDataset>"
    :type dataset: `str`, optional
    :param display_status_filter_func: Orders and filters the metrics when displaying them
    :type display_status_filter_func: `callable`, optional
    """

    def __init__(self, embeddings, data, name="<UnNamedMethod>", dataset="<UnNamedDataset>",
                 display_status_filter_func=default_display_filter_function):
        self._task_functions_register = {}
        self.embeddings = embeddings
        self.data = data
        self.name = name
        self.dataset = dataset
        self.display_status_filter_func = display_status_filter_func

    def register_task_function(self, task_func, override=False):
        """
        Register a :class:`~TaskFunction`. Two functions may compete for the same `StatusKey`, in which case
        :param:`override` decides which one wins.

        :raises TypeError: Cannot pipe the provided `TaskFunction`
        :raises RuntimeError: Two `TaskFunction`'s with the same `StatusKey` and both with `override=True`

        :return: `task_func` itself
        """
        if not task_func.can_pipe():
            raise TypeError("Piping keywords check failed. Evaluator cannot register task function '{}'. "
                            "It usually means *args or **kwargs appear in the signature of its __call__."
                            .format(task_func))
        status_keys = cast_tuple(task_func.get_bounded_status_keys())

        for sk in status_keys:
            sk_name = sk.NAME
            if sk_name in self._task_functions_register:
                tf = self._task_functions_register[sk_name]
                if tf.overriding and override:
                    raise RuntimeError(
                        "Two task functions, '{}' and '{}', both with 'override=True' ".format(
                            task_func, tf.function) + "are competing over status key '{}'".format(sk_name))
                if tf.overriding is False and override is False:
                    logger.warning(
                        "Registered task function '{}' for status key '{}' is being overridden by '{}'".format(
                            tf.function, sk_name, task_func))
                elif tf.overriding is True and override is False:
                    continue
            self._task_functions_register[sk_name] = _TaskFunctionRegister(task_func, override, sk)
        return task_func

    def compute_status(self, status, recompute=False, **kwargs):
        """
        Compute one :class:`StatusKey` by calling its `TaskFunction` with the embeddings, the data and
        whichever of `kwargs` it accepts.

        :raises ValueError: If an unrecognized status key is found
        :raises TypeError: If the task function returns a dict without its status key
        """
        if not self.status_contains(status):
            raise ValueError("Requested status '{}' not recognized (valid := {})".format(
                status, tuple(self.status_keys())))

        if not recompute and self.status_get(status) is not None:
            return self.status_get(status)

        tf = self._task_functions_register[status].function
        rval = tf.pipe_kwargs_to_call(self.embeddings, self.data, kwargs)

        if isinstance(rval, dict):
            if status not in rval:
                raise TypeError(
                    "Task function '{}' returns a dict but not with a key of its associating status '{}'".format(
                        tf, status))
            # a dict means several status keys are computed at once, set all of them
            for k, v in rval.items():
                if k in self._task_functions_register:
                    self._task_functions_register[k].status.value = v
            rval = rval[status]
        else:
            self._task_functions_register[status].status.value = rval

        return rval

    def compute_all(self, print_mode=None, recompute=False, short_print=True, **kwargs):
        """
        Calls all registered :class:`~TaskFunction` and populates the whole status dictionary.

        :param print_mode: Logger level to display the result with, defaults to None (no logging)
        :type print_mode: `str`, optional
        :return: Status key name to value
        :rtype: `dict`
        """
        if print_mode:
            getattr(logger, print_mode.lower())("Evaluating {} on {}...".format(self.name, self.dataset))

        if recompute:
            self.reset_status()

        for sk in list(self.status_keys()):
            if self.status_get(sk) is not None:
                continue
            self.compute_status(sk, recompute=recompute, **kwargs)

        if print_mode:
            self.display_status(print_mode=print_mode, short_print=short_print)

        return dict(self.status_items())

    def compare(self, other, print_mode='info', recompute=False, short_print=True, **kwargs):
        """
        Side by side display of two evaluators over the same status keys, with the difference of the means.

        :raises ValueError: `other` is not an `Evaluator` or does not hold the same status keys
        """
        if not isinstance(other, Evaluator):
            raise ValueError("Can only compare with another evaluator instance")
        if set(self.status_keys()) != set(other.status_keys()):
            raise ValueError("Given other evaluator does not have the same set of status keys as this evaluator")

        getattr(logger, print_mode.lower())("Comparing {} with {}...".format(self.name, other.name))

        self.compute_all(print_mode=None, recompute=recompute, **kwargs)
        other.compute_all(print_mode=None, recompute=recompute, **kwargs)

        self.display_status(other=other, print_mode=print_mode, short_print=short_print)

    def _display_dict(self):
        status_dict = self.display_status_filter_func(self.status_to_dict(to_value=False))
        status_dict['name'] = self.name
        status_dict['dataset'] = self.dataset
        return status_dict

    def display_status(self, other=None, print_mode='debug', short_print=True):
        """
        Boxed table of the metrics of this evaluator, or of both when `other` is given.
        """
        assert isinstance(print_mode, str) and hasattr(logger, print_mode.lower()), \
            "'print_mode' needs to be a logger level"

        if other is not None:
            summary_str = make_two_methods_summary_str(self._display_dict(), other._display_dict(),
                                                       short_print=short_print)
        else:
            summary_str = make_one_method_summary_str(self._display_dict(), short_print=short_print)
        getattr(logger, print_mode.lower())(summary_str)

    def to_reports(self, task):
        """ One :class:`~ecne.evaluate.report.MetricReport` per computed metric """
        rows = []
        for status in self.display_status_filter_func(self.status_to_dict(to_value=False)).values():
            if isinstance(status, Metric) and status.value is not None:
                rows.append(MetricReport.from_runs(task, self.dataset, self.name, status.friendly_name(),
                                                   status.get_runs()))
        return rows

    def clone(self, embeddings=None, name=None, retain_status=False):
        embeddings = self.embeddings if embeddings is None else embeddings
        new = type(self)(embeddings, self.data, name=name or self.name, dataset=self.dataset,
                         display_status_filter_func=self.display_status_filter_func)
        new._task_functions_register = deepcopy(self._task_functions_register)
        if not retain_status and new.embeddings is not self.embeddings:
            new.reset_status()
        return new

    # dict-like access to the internal status storage, everything returned as new iterables so nothing
    # external corrupts the stored values
    def status_get(self, sk):
        return self._task_functions_register[sk].status.value

    def status_contains(self, sk):
        return sk in self._task_functions_register

    def status_keys(self):
        return iter(self._task_functions_register.keys())

    def status_values(self, to_value=True):
        return map(self.__map_status(to_value), (sv for sv in self._task_functions_register.values()))

    def status_items(self, to_value=True):
        return zip(self.status_keys(), self.status_values(to_value))

    def status_to_dict(self, to_value=True):
        mapfunc = self.__map_status(to_value)
        return {k: mapfunc(tfr) for k, tfr in self._task_functions_register.items()}

    def reset_status(self):
        for tfr in set(self._task_functions_register.values()):
            tfr.status.value = None

    @staticmethod
    def __map_status(to_value=True):
        def map_status(tfr):
            status = copy(tfr.status)
            if to_value:
                return status.value
            return status

        return map_status


class TaskFunction(ABC):
    """
    Abstract callable computing a set of :class:`StatusKey` from embeddings and data.

    IMPORTANT: `Evaluator` does not know in advance what arguments its functions accept and pipes the
    user's `kwargs` to them through their signature, so the __call__ signature cannot contain *args or
    **kwargs.
    """

    def __init__(self):
        self._call_sign = signature(self)

    def can_pipe(self):
        return not any(p.kind is Parameter.VAR_KEYWORD or p.kind is Parameter.VAR_POSITIONAL
                       for p in self._call_sign.parameters.values())

    def pipe_kwargs_to_call(self, embeddings, data, kwargs):
        kwargs = {k: v for k, v in kwargs.items() if k in self._call_sign.parameters.keys()}
        bounded_args = self._call_sign.bind(embeddings, data, **kwargs)
        return self(**bounded_args.arguments)

    @abstractmethod
    def get_bounded_status_keys(self):
        """
        Returns a single or a tuple of :class:`StatusKey` that this `TaskFunction` computes.
        """

    @abstractmethod
    def __call__(self, embeddings, data, **kwargs):
        """
        Computes values for its :class:`StatusKey`. Several values are returned in a `dict` keyed by
        status key name.
        """


class ExternalTaskFunction(TaskFunction):
    """
    :class:`~TaskFunction` whose computation is an external callable `func(embeddings, data, <keywords>)`,
    bound to the given status keys. Same limitation as `TaskFunction.__call__`: no **kwargs.
    """

    def __init__(self, func, status_keys):
        self._call_sign = None
        self._func_sign = signature(func)
        self._func = func
        self._status_keys = cast_tuple(status_keys)

    def can_pipe(self):
        return not any(p.kind is Parameter.VAR_KEYWORD or p.kind is Parameter.VAR_POSITIONAL
                       for p in self._func_sign.parameters.values())

    def pipe_kwargs_to_call(self, embeddings, data, kwargs):
        kwargs = {k: v for k, v in kwargs.items() if k in self._func_sign.parameters.keys()}
        bounded_args = self._func_sign.bind(embeddings, data, **kwargs)
        return self(**bounded_args.arguments)

    def get_bounded_status_keys(self):
        return tuple(type(sk)() for sk in self._status_keys)

    def __call__(self, *args, **kwargs):
        return self._func(*args, **kwargs)


def _labeling(data):
    labeling = data['labeling']
    if not isinstance(labeling, EdgeLabeling):
        raise TypeError("data['labeling'] must be an EdgeLabeling, got {}".format(type(labeling)))
    return labeling


class ClassifyEdges(TaskFunction):
    """ micro and macro F1 of the community classification of the edges, one value per seed """

    def get_bounded_status_keys(self):
        return MicroF1(), MacroF1()

    def __call__(self, embeddings, data, train_fraction=0.5, seeds=DEFAULT_SEEDS):
        labeling = _labeling(data)
        runs = [classify_edges(embeddings, labeling, train_fraction=train_fraction, seed=s) for s in seeds]
        return {key: [r[key] for r in runs] for key in ('micro_f1', 'macro_f1')}


class ClusterEdges(TaskFunction):
    """
    NMI between the k-means clusters of the intra-community edges and their community, one value per seed.
    k defaults to the number of communities.
    """

    def get_bounded_status_keys(self):
        return NMI()

    def __call__(self, embeddings, data, seeds=DEFAULT_SEEDS, k=None):
        labeling = _labeling(data)
        k = labeling.class_count if k is None else k
        return [nmi(cluster_edges(embeddings, k, seed=s, rows=labeling.edge_ids), labeling.labels)
                for s in seeds]
