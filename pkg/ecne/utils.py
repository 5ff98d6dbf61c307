from abc import ABC, abstractmethod
import os, time
from collections.abc import Iterable

import numpy as np

from .exceptions import ConfigError

THREADS_ENV_VAR = 'ECNE_THREADS'


class Aggregator(ABC):
    __slots__ = tuple()

    @abstractmethod
    def update(self, value):
        """ Update the value"""

    @abstractmethod
    def get(self):
        """ Get the value and possibly resetting the state"""


class AverageAggregator(Aggregator):
    __slots__ = ('value', 'i')

    def __init__(self):
        self.value = 0
        self.i = 0

    def update(self, value, weight=1):
        self.value += value * weight
        self.i += weight

    def get(self):
        try:
            v = self.value / self.i
        except ZeroDivisionError:
            return 0
        self.__init__()
        return v


def _cast_iterable(x, iter_type):
    if isinstance(x, str):
        return iter_type([x])
    if isinstance(x, iter_type):
        return x
    if isinstance(x, Iterable):
        return iter_type(x)
    return None


def cast_tuple(x):
    if x is None:
        return tuple()
    y = _cast_iterable(x, tuple)
    if y is None:
        y = (x,)
    return y


class Stopwatch:
    """
    Accumulates named stage timings, used by the command line to fill the timings file.

        >>> sw = Stopwatch()
        >>> with sw('centrality'):
        ...     pass
    """

    def __init__(self):
        self.timings = {}
        self._name = None
        self._start = None

    def __call__(self, name):
        self._name = name
        return self

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        elapsed = time.perf_counter() - self._start
        self.timings[self._name] = self.timings.get(self._name, 0.) + elapsed
        return False


def derive_seed(*keys):
    """
    Derive an independent 32 bits seed from a tuple of non-negative integers (base seed, node id, ...).
    Same keys always give the same seed regardless of the order in which work gets scheduled.
    """
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def resolve_threads(threads=None):
    """
    Thread count from an explicit value, else the ECNE_THREADS environment variable, else 1.

    :raises ConfigError: thread count below 1 or unparsable environment value
    """
    if threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is None or env.strip() == '':
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise ConfigError("{} must be an integer, got '{}'".format(THREADS_ENV_VAR, env))
    if threads < 1:
        raise ConfigError("Thread count must be >= 1, got {}".format(threads))
    return threads
