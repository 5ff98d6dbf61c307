import math
from dataclasses import dataclass

import numpy as np

REPORT_HEADER = ('task', 'dataset', 'method', 'metric', 'value', 'stddev', 'runs')


@dataclass(frozen=True)
class MetricReport:
    """ One row of a metric report: mean and standard deviation of a metric over `runs` runs """
    task: str
    dataset: str
    method: str
    metric: str
    value: float
    stddev: float
    runs: int

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.stddev)):
            raise ValueError("Metric {} of {} is not finite".format(self.metric, self.method))
        if self.runs < 1:
            raise ValueError("A metric report needs at least one run")

    @classmethod
    def from_runs(cls, task, dataset, method, metric, values):
        values = np.asarray(values, dtype=np.float64)
        return cls(task=task, dataset=dataset, method=method, metric=metric, value=float(values.mean()),
                   stddev=float(values.std()), runs=len(values))

    def to_row(self):
        return "\t".join([self.task, self.dataset, self.method, self.metric, "{:.6f}".format(self.value),
                          "{:.6f}".format(self.stddev), str(self.runs)])


def write_metric_report(rows, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write("\t".join(REPORT_HEADER) + "\n")
        for row in rows:
            f.write(row.to_row() + "\n")


def read_metric_report(path):
    with open(path, encoding='utf-8') as f:
        header = f.readline().rstrip('\n').split('\t')
        if tuple(header) != REPORT_HEADER:
            raise ValueError("{}: not a metric report".format(path))
        rows = []
        for line in f:
            task, dataset, method, metric, value, stddev, runs = line.rstrip('\n').split('\t')
            rows.append(MetricReport(task, dataset, method, metric, float(value), float(stddev), int(runs)))
    return rows
