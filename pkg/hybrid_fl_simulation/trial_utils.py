# grown-up modules
import errno
import logging
import os

import yaml

# local modules
from . import checkpoint
from . import context
from . import engine
from . import json_utils
from . import results
from . import trial_manager
from . import trial_runner

def make_output_directory(directory):
    """Create the directory for run output if needed and return its full path.

    Arguments:
    directory -- path of the output directory
    """
    directory = os.path.abspath(directory)

    try:
        os.makedirs(directory)
    except OSError as e:
        if e.errno != errno.EEXIST or not os.path.isdir(directory):
            raise

    return directory


def build_tasks(points, methods, trials):
    """Return the trial_tasks of every (point, method, trial) in deterministic order.

    Arguments:
    points -- list of (axis value, experiment_config)
    methods -- method names to compare
    trials -- number of trials per (point, method)
    """
    tasks = list()
    for point, (value, cfg) in enumerate(points):
        for method in methods:
            method_cfg = cfg.with_method(method)
            for trial in range(trials):
                tasks.append(trial_runner.trial_task(point, value, method, trial, method_cfg))

    return tasks


def plan_string(points, methods, trials, axis=None, workers=1):
    """Return a human-readable description of what a run would execute."""
    r = '==== run plan ====\n'
    r = r + 'axis: [{}]\n'.format(axis or 'none')
    r = r + 'points: [{}]\n'.format(', '.join(results.format_value(v) for v, _ in points))
    r = r + 'methods: [{}]\n'.format(', '.join(methods))
    r = r + 'trials per method: [{}]\n'.format(trials)
    r = r + 'workers: [{}]\n'.format(workers)

    cfg = points[0][1]
    r = r + 'K [{}] C [{}] r_UL [{}] T_round [{}] s T_final [{}] min seeds [{}]\n'.format(
        cfg.K, cfg.C, cfg.r_UL, cfg.T_round, cfg.T_final, cfg.seeds)

    r = r + 'total trials: [{}]\n'.format(len(points) * len(methods) * trials)
    r = r + '==== end of run plan ====\n'

    return r


def write_outputs(output_directory, merged, points, methods, axis, document, failed):
    """Write every result artifact of a run into `output_directory`.

    Arguments:
    output_directory -- existing output directory
    merged -- {(point, method, trial): engine.experiment_result} in key order
    points -- list of (axis value, experiment_config)
    methods -- method names in comparison order
    axis -- sweep axis name, or None for a single configuration
    document -- resolved configuration or sweep document
    failed -- trial_tasks which failed
    """
    trace = list()
    trials = list()
    for (point, _, _), result in merged.items():
        trace.extend(results.trace_rows(point, result))
        trials.append(results.trials_row(point, points[point][0], result))

    results.write_csv(os.path.join(output_directory, context.trace_file()),
                      results.trace_header(), trace)

    results.write_csv(os.path.join(output_directory, context.trials_file()),
                      results.trials_header(axis), trials)

    rows = results.summarize(merged, points, methods)

    results.write_csv(os.path.join(output_directory, context.summary_file()),
                      results.summary_header(axis), [row.as_list() for row in rows])

    base = points[0][1]
    json_utils.put_json_to_file(os.path.join(output_directory, context.summary_document()), {
        'schema_version': context.schema_version(),
        'complete': not failed,
        'failed_trials': [{'point': t.point, 'method': t.method, 'trial': t.trial} for t in failed],
        'axis': axis,
        'values': [v for v, _ in points],
        'methods': methods,
        'trials': base.trials,
        'seeds': base.seeds,
        'summary_window_minutes': base.summary_window_minutes,
        'rows': [row.as_dict(axis) for row in rows],
        'config': document,
    })

    with open(os.path.join(output_directory, context.resolved_config_file()), 'w') as f:
        yaml.safe_dump(dict(document, schema_version=context.schema_version()),
                       f, sort_keys=True, default_flow_style=False)

    for (point, _, _), result in merged.items():
        if result.checkpoints or points[point][1].checkpoint_every:
            checkpoint.write_checkpoints(os.path.join(output_directory, 'checkpoints'), result, point)

    logging.error(results.summary_table(rows, axis))

    return rows


def run_points(points, methods, output_directory, axis=None, document=None, workers=1,
               fail_fast=False):
    """Run every trial of every (point, method), write the artifacts and return the exit code.

    Arguments:
    points -- list of (axis value, experiment_config)
    methods -- method names to compare
    output_directory -- existing output directory
    axis -- sweep axis name, or None for a single configuration
    document -- resolved configuration or sweep document written for replay
    workers -- number of concurrent trial runners
    fail_fast -- if True, stop after the first failed trial
    """
    trials = points[0][1].trials

    tasks = build_tasks(points, methods, trials)

    # The dataset does not depend on any sweep axis, so every trial shares one copy.
    data = engine.prepare_data(points[0][1])

    tm = trial_manager.trial_manager(tasks, workers, data)

    try:
        tm.run(fail_fast)

    finally:
        logging.error(tm.result_string())

        failed = tm.failed_trials()
        merged = tm.results()

        if merged:
            write_outputs(output_directory, merged, points, methods, axis, document or dict(), failed)

    return tm.return_code()


def run_config(cfg, output_directory, workers=1, fail_fast=False):
    """Compare `cfg.methods` on a single configuration."""
    return run_points([(None, cfg)], list(cfg.methods), output_directory,
                      document=cfg.as_dict(), workers=workers, fail_fast=fail_fast)


def run_sweep(sweep, output_directory, workers=1, fail_fast=False):
    """Compare `sweep.methods` at every value of the sweep axis."""
    return run_points(list(zip(sweep.values, sweep.points)), sweep.methods, output_directory,
                      axis=sweep.axis, document=sweep.as_dict(), workers=workers,
                      fail_fast=fail_fast)
