# grown-up modules
import textwrap

# local modules
from hybrid_fl_simulation import context

def add_common_args(parser):
    '''Add argparse options common to hybrid_fl_simulation scripts.

    Arguments:
    parser -- argparse.ArgumentParser to augment
    '''
    parser.add_argument('--verbose', '-v',
                        dest='verbosity', action='count', default=1,
                        help=textwrap.dedent('''\
                            Increase the level of output to stdout. \
                            CRITICAL and ERROR messages will always be printed. \
                            Add more to see more log messages (e.g. -vvv displays DEBUG).'''))


def add_config_args(parser):
    '''Add argparse options related to the experiment configuration.

    Arguments:
    parser -- argparse.ArgumentParser to augment
    '''
    parser.add_argument('--config',
                        metavar='PATH_TO_CONFIG_OR_SWEEP',
                        dest='config', required=True,
                        help=textwrap.dedent('''\
                            Path to a YAML experiment configuration or sweep document. \
                            Keys left out take the documented defaults.'''))


def add_output_args(parser):
    '''Add argparse options related to run output.

    Arguments:
    parser -- argparse.ArgumentParser to augment
    '''
    parser.add_argument('--out', '-o',
                        metavar='PATH_TO_OUTPUT_DIRECTORY',
                        dest='output_directory',
                        help=textwrap.dedent('''\
                            Directory receiving the trace, summaries, resolved configuration \
                            and log. Defaults to a temporary directory.'''))

    parser.add_argument('--dry-run',
                        dest='dry_run', action='store_true',
                        help='Print the resolved plan and exit without running or writing anything.')


def add_execution_args(parser):
    '''Add argparse options related to how trials are executed.

    Arguments:
    parser -- argparse.ArgumentParser to augment
    '''
    parser.add_argument('--trials',
                        metavar='N', type=int, dest='trials',
                        help='Number of independently seeded trials (overrides the configuration).')

    parser.add_argument('--seed',
                        metavar='N', type=int, dest='seed',
                        help='Master seed applied to every random stream (overrides the configuration).')

    parser.add_argument('--workers',
                        metavar='N', type=int, dest='workers',
                        help=textwrap.dedent('''\
                            Number of trials run at the same time. The environment variable \
                            {} takes precedence; it may also be set in a .env file.'''
                            .format(context.workers_environment_variable())))

    parser.add_argument('--fail-fast',
                        dest='fail_fast', action='store_true',
                        help='If indicated, stops after the first trial which fails.')


def resolve_workers(workers):
    '''Return the worker count, letting the environment override the command line.

    Arguments:
    workers -- value of --workers, or None
    '''
    import logging
    import os

    import dotenv

    dotenv.load_dotenv(dotenv.find_dotenv(usecwd=True))

    name = context.workers_environment_variable()
    value = os.environ.get(name)

    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ValueError('{} must be an integer [{}]'.format(name, value))

        logging.info('worker count [{}] taken from [{}]'.format(workers, name))

    workers = 1 if workers is None else workers

    if workers < 1:
        raise ValueError('worker count must be at least 1 [{}]'.format(workers))

    return workers


def log_throughput_calibration(cfg, clients=1000):
    '''Log the mean and maximum average throughput of uniformly placed clients.

    Arguments:
    cfg -- experiment_config supplying the cell and the resource seed
    clients -- number of clients to place
    '''
    import logging
    from hybrid_fl_simulation import netcomp
    from hybrid_fl_simulation import seeding

    cell = cfg.cell_config()
    distances = netcomp.place_clients(clients, cell, seeding.derive_rng(cfg.seeds['resources'], 'placement', 0))
    mean, peak = netcomp.population_throughput_stats(distances, cell)

    logging.error('throughput calibration over [{}] clients: mean [{:.3f}] Mbit/s max [{:.3f}] Mbit/s'
                  .format(clients, mean / 1e6, peak / 1e6))
    logging.error('cell-edge throughput [{:.3f}] Mbit/s'
                  .format(netcomp.mean_throughput(cell.cell_radius, cell) / 1e6))

    return mean, peak
