# grown-up modules
import logging
import os
import sys

import yaml

# local modules
from hybrid_fl_simulation import context
from hybrid_fl_simulation import experiment_config
from hybrid_fl_simulation import trial_utils

def load_target(path, overrides):
    '''Return (config, sweep) read from `path`; exactly one of them is not None.

    Arguments:
    path -- path to a configuration or sweep document
    overrides -- configuration overrides from the command line
    '''
    if experiment_config.is_sweep_document(experiment_config.read_yaml(path)):
        return None, experiment_config.load_sweep(path).with_overrides(overrides)

    return experiment_config.load_config(path).with_overrides(overrides), None


def points_of(cfg, sweep):
    '''Return (points, methods, axis) for a configuration or a sweep.'''
    if sweep is not None:
        return list(zip(sweep.values, sweep.points)), sweep.methods, sweep.axis

    return [(None, cfg)], list(cfg.methods), None


def main(argv=None):
    '''Parse `argv` (default: sys.argv[1:]), carry out the subcommand and return the exit code.'''
    import argparse

    import cli
    from hybrid_fl_simulation import logs

    parser = argparse.ArgumentParser(description='Simulate FedCS, Hybrid-FL and centralized '
                                                 'training over a cellular network.')

    subparsers = parser.add_subparsers(dest='command', required=True)

    run_parser = subparsers.add_parser('run', help='Run a configuration or a sweep.')
    sweep_parser = subparsers.add_parser('sweep', help='Run a sweep document.')
    validate_parser = subparsers.add_parser('validate',
                                            help='Validate a configuration or sweep and report '
                                                 'the throughput calibration.')

    for p in [run_parser, sweep_parser, validate_parser]:
        cli.add_common_args(p)
        cli.add_config_args(p)
        cli.add_execution_args(p)

    for p in [run_parser, sweep_parser]:
        cli.add_output_args(p)

    args = parser.parse_args(argv)

    try:
        overrides = experiment_config.command_line_overrides(args.trials, args.seed)
        cfg, sweep = load_target(args.config, overrides)
        workers = cli.resolve_workers(args.workers)

    except (OSError, ValueError, yaml.YAMLError) as e:
        print(e)
        return 1

    if args.command == 'sweep' and sweep is None:
        print('[{}] is not a sweep document (it has no axis)'.format(args.config))
        return 1

    points, methods, axis = points_of(cfg, sweep)
    document = sweep.as_dict() if sweep is not None else cfg.as_dict()

    if args.command == 'validate':
        logs.configure(args.verbosity)

        yaml.safe_dump(dict(document, schema_version=context.schema_version()),
                       sys.stdout, sort_keys=True, default_flow_style=False)

        cli.log_throughput_calibration(points[0][1])

        return 0

    if args.dry_run:
        logs.configure(args.verbosity)
        print(trial_utils.plan_string(points, methods, points[0][1].trials, axis, workers))
        return 0

    if args.output_directory:
        dirname = args.output_directory
    else:
        import tempfile
        dirname = tempfile.mkdtemp(prefix='hybrid_fl_')

    output_directory = trial_utils.make_output_directory(dirname)

    logs.configure(args.verbosity, os.path.join(output_directory, context.log_file()))

    logging.error('output directory [{}]'.format(output_directory))

    try:
        return trial_utils.run_points(points, methods, output_directory, axis=axis,
                                      document=document, workers=workers, fail_fast=args.fail_fast)

    except Exception as e:
        logging.critical(e)

        raise


if __name__ == "__main__":
    exit(main())
