# grown-up modules
import csv
import math

import texttable

# local modules
from . import context
from . import engine

def format_float(value, digits=6):
    """Return `value` with a fixed number of decimals; non-finite values print as inf/nan."""
    if value is None:
        return ''

    if math.isnan(value):
        return 'nan'

    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'

    return '{:.{}f}'.format(value, digits)


def format_value(value):
    """Return a sweep axis value as written in the result files."""
    if value is None:
        return ''

    if isinstance(value, float) and math.isinf(value):
        return 'inf'

    return str(value)


def trace_header():
    return ['schema_version', 'point', 'method', 'trial', 'round', 'start_s', 'end_s', 'selected',
            'manifest_items', 'server_total', 'server_per_class', 'accuracy', 'cv']


def trace_rows(point, result):
    """Return one trace row per round of an engine.experiment_result."""
    return [[context.schema_version(),
             point,
             result.method,
             result.trial,
             rec.index,
             format_float(rec.start),
             format_float(rec.end),
             len(rec.selected),
             rec.manifest_items(),
             sum(rec.server_per_class),
             ';'.join(str(n) for n in rec.server_per_class),
             format_float(rec.accuracy),
             format_float(rec.cv)]
            for rec in result.records]


def trials_header(axis):
    return ['schema_version', 'point', axis or 'value', 'method', 'trial', 'window_accuracy',
            'final_accuracy', 'rounds', 'final_clock_min', 'uploaded_items']


def trials_row(point, value, result):
    """Return the per-trial summary row of an engine.experiment_result."""
    final_clock = result.records[-1].end / 60.0 if result.records else 0.0

    return [context.schema_version(),
            point,
            format_value(value),
            result.method,
            result.trial,
            format_float(result.summary_accuracy),
            format_float(result.final_accuracy()),
            len(result.records),
            format_float(final_clock, 3),
            result.uploaded_total()]


class summary_row(object):
    """Mean and deviation of the window accuracy of one method at one sweep point."""
    def __init__(self, point, value, method, accuracies):
        self.point = point
        self.value = value
        self.method = method
        self.trials = len(accuracies)
        self.mean_acc, self.std_acc = engine.mean_and_std(accuracies)


    def as_list(self):
        return [context.schema_version(), format_value(self.value), self.method,
                format_float(self.mean_acc), format_float(self.std_acc), self.trials]


    def as_dict(self, axis):
        return {axis or 'value': self.value, 'method': self.method, 'mean_acc': self.mean_acc,
                'std_acc': self.std_acc, 'trials': self.trials}


def summary_header(axis):
    return ['schema_version', axis or 'value', 'method', 'mean_acc', 'std_acc', 'trials']


def summarize(results, points, methods):
    """Return a summary_row per (point, method) in sweep order.

    Arguments:
    results -- {(point, method, trial): engine.experiment_result}
    points -- list of (axis value, experiment_config) in sweep order
    methods -- method names in comparison order
    """
    rows = list()
    for point, (value, _) in enumerate(points):
        for method in methods:
            accuracies = [r.summary_accuracy for (p, m, _), r in results.items()
                          if p == point and m == method]
            rows.append(summary_row(point, value, method, accuracies))

    return rows


def write_csv(path, header, rows):
    """Write a comma-separated table with a header row to `path`."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def summary_table(rows, axis):
    """Return the summary as a printable text table."""
    table = texttable.Texttable()
    table.set_deco(texttable.Texttable.HEADER)
    table.set_cols_dtype(['t', 't', 't', 't'])
    table.set_cols_align(['r', 'l', 'r', 'r'])
    table.header([axis or 'value', 'method', 'accuracy (mean +/- std)', 'trials'])

    for row in rows:
        table.add_row([format_value(row.value),
                       row.method,
                       '{} +/- {}'.format(format_float(row.mean_acc, 4), format_float(row.std_acc, 4)),
                       str(row.trials)])

    return table.draw()
