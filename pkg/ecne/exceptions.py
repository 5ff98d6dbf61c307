"""
Exception types raised by ecne. Most of the code raises builtin exceptions; the classes below exist so
the command line can tell a bad input (exit code 2) from a numerical or internal failure (exit code 1).
"""


class InputError(ValueError):
    """ Something the user handed in (file, config, flag) is unusable """


class EdgeListError(InputError):
    def __init__(self, message, path=None, line_number=None):
        if line_number is not None:
            message = "{}:{}: {}".format(path, line_number, message)
        elif path is not None:
            message = "{}: {}".format(path, message)
        super().__init__(message)
        self.path = path
        self.line_number = line_number


class ConfigError(InputError):
    pass


class NumericalError(RuntimeError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        if residual is not None:
            message = "{} (residual={:.3e})".format(message, residual)
        super().__init__(message)
        self.residual = residual


class DivergedTrainingError(NumericalError):
    pass


class MissingEmbeddingError(KeyError):
    """ A path references an edge that has no row in the embedding matrix """

    def __str__(self):
        # KeyError.__str__ quotes its argument, keep the message readable
        return str(self.args[0]) if self.args else ''
