from collections import OrderedDict
import logging

from .evaluate.metrics import Comparative, compare_status_values, Metric


class _LoggerHolder:
    """
    Holds the logger for the ecne package and redirect any calls made to its held logger. If none is held
    then defaults to logging.getLogger('ecne'). This allows customization of the logging being used by
    ecne from an external library by importing setLogger.
    """
    __singleton = False

    def __new__(cls, *args, **kwargs):
        if cls.__singleton:
            raise TypeError("This class is a singleton!")
        cls.__singleton = True
        return super().__new__(cls)

    def __init__(self):
        self._logger = None

    @property
    def logger(self):
        if self._logger is None:
            self._logger = logging.getLogger('ecne')
            self._logger.debug("Defaulting to logging.getLogger('ecne')'s logger")
        return self._logger

    @logger.setter
    def logger(self, new_logger):
        self._logger = new_logger
        self._logger.debug("ecne's logger set to {}".format(new_logger))

    def __getattribute__(self, item):
        if item in ('logger', '_logger'):
            return object.__getattribute__(self, item)
        return getattr(self.logger, item)
_logger_holder = _LoggerHolder()


# silence the name for now
def getLogger(name=None):
    """
    Returns an instance of _LoggerHolder. Even though the name is misleading, any code using this return value
    should use it as if it was a logger. This enables to dynamically change the logger of the library after
    the modules were loaded and their logger declared in their headers.
    """
    return _logger_holder


def setLogger(logger):
    _logger_holder.logger = logger


class NotComputedValue:
    def __format__(self, format_spec):
        s = '<NotComputed>'
        if '>' in format_spec:
            format_spec = format_spec.split('>')[-1]
            if '.' in format_spec:
                format_spec = format_spec.split('.')[0]
            if format_spec.isdigit():
                s = ' ' * max(int(format_spec) - len(s), 0) + s
        return s

    def __repr__(self):
        return '<NotComputed>'

    def __str__(self):
        return '<NotComputed>'


def parse_metric(metric):
    text = metric.friendly_name()
    if metric.value is None:
        value = NotComputedValue()
        std = NotComputedValue()
        comparative = Comparative.NONE
    else:
        value = metric.get_value()
        std = metric.get_std()
        comparative = metric.get_comparative()
    description = metric.description()
    return text, value, std, comparative, description


def _rule(*widths):
    return "+" + "+".join("-" * (w + 1) for w in widths) + "+" + "\n"


def make_one_method_summary_str(status_dict, short_print=True, description_str='', summary_str='\n'):
    line_length, col1_length, col2_length, col3_length = 72, 40, 14, 14
    summary_str += "+" + "-" * line_length + "+" + "\n"
    summary_str += "|{:^{line_length}}|".format("ECNE Evaluation", line_length=line_length) + "\n"
    summary_str += _rule(col1_length, col2_length, col3_length)
    summary_str += "|{:>{c1}} | {:>{c2}}| {:>{c3}}|".format(
        "Metric (" + status_dict['name'] + ")", "Value", "Std. dev.",
        c1=col1_length, c2=col2_length - 1, c3=col3_length - 1) + "\n"
    summary_str += "|{:>{c1}} | {:>{c2}}| {:>{c3}}|".format(
        "Dataset: " + status_dict['dataset'], "", "",
        c1=col1_length, c2=col2_length - 1, c3=col3_length - 1) + "\n"
    summary_str += _rule(col1_length, col2_length, col3_length)

    for status in status_dict.values():
        if not isinstance(status, Metric):
            continue
        text, value, std, _, desc = parse_metric(status)
        summary_str += "|{0:>{c1}} | {1:>{c2}.4f}| {2:>{c3}.4f}|".format(
            text, value, std, c1=col1_length, c2=col2_length - 1, c3=col3_length - 1) + "\n"
        description_str += '* ' + text + ': ' + desc + "\n"
    summary_str += _rule(col1_length, col2_length, col3_length)

    if not short_print:
        summary_str += "Note: " + "\n"
        summary_str += description_str
        summary_str += "+" + "-" * line_length + "+"

    return summary_str


def make_two_methods_summary_str(status_dict, status_dict_2, short_print=True, description_str='',
                                 summary_str='\n'):
    line_length, col0_length, col1_length, col2_length, col3_length = 122, 40, 25, 25, 25
    summary_str += "+" + "-" * line_length + "+" + "\n"
    summary_str += "|{:^{line_length}}|".format("ECNE Evaluation", line_length=line_length) + "\n"
    summary_str += _rule(col0_length, col1_length, col2_length, col3_length)
    row = "|{:>{col0_length}} | {:>{col1_length}}| {:>{col2_length}}| {:>{col3_length}}|"
    summary_str += row.format(
        "Metric", "Enhancement", "Value (" + status_dict['name'] + ")", "Value (" + status_dict_2['name'] + ")",
        col0_length=col0_length, col1_length=col1_length, col2_length=col2_length,
        col3_length=col3_length) + "\n"
    summary_str += row.format(
        "", "", "Dataset: " + status_dict['dataset'], "Dataset: " + status_dict_2['dataset'],
        col0_length=col0_length, col1_length=col1_length, col2_length=col2_length,
        col3_length=col3_length) + "\n"
    summary_str += _rule(col0_length, col1_length, col2_length, col3_length)

    for sk, sv in status_dict.items():
        if sk in status_dict_2 and isinstance(sv, Metric):
            sv2 = status_dict_2[sk]
            text, value_1, _, comp, desc = parse_metric(sv)
            _, value_2, _, _, _ = parse_metric(sv2)

            if comp is None:
                comp = Comparative.NONE
            try:
                if isinstance(comp, str):
                    comp = Comparative(comp)
                rval = compare_status_values(comp, value_1, value_2)
            except (ValueError, TypeError):
                val = "<Error Comparing>"
            else:
                if rval is None:
                    val = '---'
                else:
                    val = "{:>+.4f}".format(rval)

            summary_str += "|{:>{col0_length}} | {:>{col1_length}}| {:>{col2_length}.4f}| {:>{col3_length}.4f}|".format(
                text, val, value_1, value_2,
                col0_length=col0_length, col1_length=col1_length, col2_length=col2_length,
                col3_length=col3_length) + "\n"
            description_str += '* ' + text + ': ' + desc + "\n"
    summary_str += _rule(col0_length, col1_length, col2_length, col3_length)

    if not short_print:
        summary_str += "Note: " + "\n"
        summary_str += description_str
        summary_str += "+" + "-" * line_length + "+"

    return summary_str


def default_display_filter_function(status_dict):
    """
    The default order is like:
        - Micro-F1
        - Macro-F1
        - NMI
        - AUC
        - Any other custom Metric
    """
    order = ('micro_f1', 'macro_f1', 'nmi', 'auc')
    leftovers = tuple(sorted(set(status_dict.keys()) - set(order)))
    order = order + leftovers

    new_status_dict = OrderedDict()
    for k in order:
        if k in status_dict:
            new_status_dict[k] = status_dict[k]

    return new_status_dict
