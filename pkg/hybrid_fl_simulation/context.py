def schema_version():
    """Return the version of the trace/summary schema written by this package."""
    return 1


def fedcs():
    """Return the name of the FedCS protocol (no data uploading)."""
    return 'FedCS'


def hybrid_fl():
    """Return the name of the Hybrid-FL protocol."""
    return 'HybridFL'


def centralized():
    """Return the name of the centralized baseline protocol."""
    return 'Centralized'


def protocols():
    """Return the list of supported protocol names."""
    return [fedcs(), hybrid_fl(), centralized()]


def client_policies():
    """Return the list of model-client selection policies."""
    return ['maxClient', 'minCV']


def data_policies():
    """Return the list of data-upload selection policies."""
    return ['maxThroughput', 'IID', 'none']


def method_name(protocol, data_policy=None, client_policy=None):
    """Return the display name of a compared method.

    Hybrid-FL variants are named `data_policy`/`client_policy`, e.g. IID/minCV.

    Arguments:
    protocol -- one of `protocols()`
    data_policy -- data-upload policy (Hybrid-FL only)
    client_policy -- model-client policy (Hybrid-FL only)
    """
    if protocol == hybrid_fl():
        return '/'.join([data_policy, client_policy])

    return protocol


def hybrid_fl_methods():
    """Return the four Hybrid-FL variants compared in the experiments."""
    return [method_name(hybrid_fl(), d, c)
            for c in ['minCV', 'maxClient']
            for d in ['maxThroughput', 'IID']]


def all_methods():
    """Return every compared method name in reporting order."""
    return [fedcs()] + hybrid_fl_methods() + [centralized()]


def parse_method(name):
    """Return (protocol, data_policy, client_policy) for a method display name.

    Arguments:
    name -- a method name as returned by `method_name`
    """
    if name == fedcs():
        return fedcs(), 'none', 'maxClient'

    if name == centralized():
        return centralized(), 'IID', 'maxClient'

    if name not in hybrid_fl_methods():
        raise ValueError('unknown method [{}]; expected one of {}'.format(name, all_methods()))

    data_policy, client_policy = name.split('/')
    return hybrid_fl(), data_policy, client_policy


def sweep_axes():
    """Return the config keys which a sweep may vary."""
    return ['mu', 'sigma', 'r_UL', 'r_var']


def trace_file():
    """Return the file name of the per-round trace."""
    return 'trace.csv'


def trials_file():
    """Return the file name of the per-trial summaries."""
    return 'trials.csv'


def summary_file():
    """Return the file name of the sweep summary table."""
    return 'summary.csv'


def summary_document():
    """Return the file name of the machine-readable summary."""
    return 'summary.json'


def resolved_config_file():
    """Return the file name of the fully resolved configuration."""
    return 'resolved_config.yaml'


def log_file():
    """Return the file name of the script output log."""
    return 'script_output.log'


def builtin_dataset():
    """Return the dataset reference which selects the generated Gaussian-cluster set."""
    return 'builtin:gaussian'


def workers_environment_variable():
    """Return the environment variable which may override --workers."""
    return 'HYBRID_FL_WORKERS'
