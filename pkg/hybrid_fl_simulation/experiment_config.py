# grown-up modules
import copy
import logging
import math
import os

import jsonschema
import yaml

# local modules
from . import context
from . import netcomp
from . import partitioner
from . import scheduler
from .learner import training

def default_config():
    """Return the default configuration document; every key is documented in configs/default.yaml."""
    return {
        'dataset': context.builtin_dataset(),
        'dataset_seed': 0,
        'K': 1000,
        'C': 0.1,
        'r_UL': 0.01,
        'T_round': 180.0,
        'T_final': 400.0,
        'summary_window_minutes': 100.0,
        'data_distribution': {
            'mu': 2.0,
            'sigma': 0.7,
            'a': 0.5,
            'b': None,
            'num_classes': 10,
        },
        'client_size_range': [100, 1000],
        'capability_range': [10.0, 100.0],
        'cell': {
            'cell_radius': 2000.0,
            'carrier_freq': 2.5,
            'bs_antenna_height': 11.0,
            'client_antenna_height': 1.0,
            'tx_power': 20.0,
            'antenna_gain': 0.0,
            'rb_bandwidth': 1.8e6,
            'capacity_loss': 1.6,
            'spectral_cap': 4.8,
            'noise_density': -174.0,
            'noise_figure': 7.0,
            'effective_noise': -125.4,
        },
        'model': {
            'name': 'softmax_regression',
            'hidden_units': 32,
            'model_bytes': 1000000,
        },
        'item_bytes': 3072,
        'hp': {
            'batch_size': 50,
            'epochs_per_round': 5,
            'initial_lr': 0.25,
            'lr_decay': 0.99,
            'server_epochs': None,
        },
        'protocol': context.hybrid_fl(),
        'policy': {
            'client_policy': 'minCV',
            'data_policy': 'IID',
        },
        'methods': context.all_methods(),
        'r_var': 0.0,
        'seeds': {
            'partition': 0,
            'resources': 0,
            'training': 0,
            'fluctuation': 0,
        },
        'trials': 1,
        'cv_definition': 'printed',
        'upload_candidates': 'permitted',
        'checkpoint_every': 0,
    }


def _number(minimum=None, exclusive_minimum=None, maximum=None, exclusive_maximum=None):
    schema = {'type': 'number'}
    for key, value in [('minimum', minimum), ('exclusiveMinimum', exclusive_minimum),
                       ('maximum', maximum), ('exclusiveMaximum', exclusive_maximum)]:
        if value is not None:
            schema[key] = value
    return schema


def _object(properties):
    return {'type': 'object', 'additionalProperties': False, 'properties': properties}


_seed = {'type': 'integer', 'minimum': 0}

_range = {'type': 'array', 'items': {'type': 'number'}, 'minItems': 2, 'maxItems': 2}

_sigma = {'anyOf': [_number(minimum=0), {'type': 'string', 'enum': ['inf', 'Infinity', '.inf']}]}

config_schema = _object({
    'schema_version': {'type': 'integer', 'enum': [context.schema_version()]},
    'dataset': {'type': 'string', 'minLength': 1},
    'dataset_seed': _seed,
    'K': {'type': 'integer'},
    'C': _number(),
    'r_UL': _number(),
    'T_round': _number(),
    'T_final': _number(),
    'summary_window_minutes': _number(),
    'data_distribution': _object({
        'mu': _number(),
        'sigma': _sigma,
        'a': _number(),
        'b': {'type': ['number', 'null']},
        'num_classes': {'type': 'integer'},
    }),
    'client_size_range': dict(_range, items={'type': 'integer'}),
    'capability_range': _range,
    'cell': _object({k: {'type': ['number', 'null']} if k == 'effective_noise' else _number()
                     for k in default_config()['cell']}),
    'model': _object({
        'name': {'type': 'string', 'enum': ['softmax_regression', 'mlp']},
        'hidden_units': {'type': 'integer', 'minimum': 1},
        'model_bytes': {'type': 'integer', 'minimum': 1},
    }),
    'item_bytes': {'type': 'integer', 'minimum': 1},
    'hp': _object({
        'batch_size': {'type': 'integer'},
        'epochs_per_round': {'type': 'integer'},
        'initial_lr': _number(),
        'lr_decay': _number(),
        'server_epochs': {'type': ['integer', 'null']},
    }),
    'protocol': {'type': 'string', 'enum': context.protocols()},
    'policy': _object({
        'client_policy': {'type': 'string', 'enum': context.client_policies()},
        'data_policy': {'type': 'string', 'enum': context.data_policies()},
    }),
    'methods': {'type': 'array', 'minItems': 1, 'uniqueItems': True,
                'items': {'type': 'string', 'enum': context.all_methods()}},
    'r_var': _number(),
    'seeds': _object({k: _seed for k in ['partition', 'resources', 'training', 'fluctuation']}),
    'trials': {'type': 'integer'},
    'cv_definition': {'type': 'string', 'enum': ['printed', 'standard']},
    'upload_candidates': {'type': 'string', 'enum': ['permitted', 'requested']},
    'checkpoint_every': {'type': 'integer', 'minimum': 0},
})

sweep_schema = _object({
    'schema_version': {'type': 'integer', 'enum': [context.schema_version()]},
    'base': {'anyOf': [{'type': 'string'}, {'type': 'object'}]},
    'axis': {'type': 'string', 'enum': context.sweep_axes()},
    'values': {'type': 'array', 'minItems': 1},
    'methods': {'type': 'array', 'minItems': 1, 'uniqueItems': True,
                'items': {'type': 'string', 'enum': context.all_methods()}},
})


def merge(defaults, overrides):
    """Return `defaults` deep-merged with `overrides` (neither argument is modified)."""
    merged = copy.deepcopy(defaults)

    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)

    return merged


def check_schema(document, schema, source):
    """Raise ValueError naming the offending key if `document` violates `schema`."""
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))

    if errors:
        e = errors[0]
        key = '.'.join(str(p) for p in e.absolute_path) or '<document>'
        raise ValueError('[{}]: invalid value for [{}]: {}'.format(source, key, e.message))


def parse_sigma(value):
    """Return sigma as a float, mapping the literal 'inf' to math.inf."""
    if isinstance(value, str):
        if value in ['inf', 'Infinity', '.inf']:
            return math.inf
        raise ValueError('sigma must be a non-negative number or "inf" [{}]'.format(value))

    return float(value)


def check_invariants(d):
    """Raise ValueError with a distinct message for the first violated invariant of `d`."""
    if d['K'] < 1:
        raise ValueError('K must be a positive number of clients [{}]'.format(d['K']))

    if not 0 < d['C'] <= 1:
        raise ValueError('C must satisfy 0 < C <= 1 [{}]'.format(d['C']))

    if not 0 <= d['r_UL'] <= 1:
        raise ValueError('r_UL must satisfy 0 <= r_UL <= 1 [{}]'.format(d['r_UL']))

    if d['T_round'] <= 0:
        raise ValueError('T_round must be positive [{}]'.format(d['T_round']))

    if d['T_final'] <= 0:
        raise ValueError('T_final must be positive [{}]'.format(d['T_final']))

    if d['summary_window_minutes'] <= 0:
        raise ValueError('summary_window_minutes must be positive [{}]'
                         .format(d['summary_window_minutes']))

    if not 0 <= d['r_var'] < 1:
        raise ValueError('r_var must satisfy 0 <= r_var < 1 [{}]'.format(d['r_var']))

    if d['trials'] < 1:
        raise ValueError('trials must be at least 1 [{}]'.format(d['trials']))

    low, high = d['client_size_range']
    if not 1 <= low <= high:
        raise ValueError('client_size_range must satisfy 1 <= min <= max [{}]'
                         .format(d['client_size_range']))

    low, high = d['capability_range']
    if not 0 < low <= high:
        raise ValueError('capability_range must satisfy 0 < min <= max [{}]'
                         .format(d['capability_range']))

    dist = d['data_distribution']
    if d['client_size_range'][0] < dist['num_classes']:
        raise ValueError('client_size_range minimum [{}] cannot cover [{}] classes'
                         .format(d['client_size_range'][0], dist['num_classes']))

    if d['protocol'] == context.fedcs() and d['policy']['data_policy'] != 'none':
        raise ValueError('FedCS does not upload data; policy.data_policy must be none [{}]'
                         .format(d['policy']['data_policy']))

    if d['protocol'] != context.fedcs() and d['policy']['data_policy'] == 'none':
        raise ValueError('policy.data_policy none is only valid for FedCS [{}]'
                         .format(d['protocol']))

    hp = d['hp']
    if hp['batch_size'] < 1:
        raise ValueError('hp.batch_size must be at least 1 [{}]'.format(hp['batch_size']))

    if hp['epochs_per_round'] < 1:
        raise ValueError('hp.epochs_per_round must be at least 1 [{}]'.format(hp['epochs_per_round']))

    if not 0 < hp['lr_decay'] <= 1:
        raise ValueError('hp.lr_decay must satisfy 0 < lr_decay <= 1 [{}]'.format(hp['lr_decay']))

    # The typed constructors carry the remaining per-module invariants.
    partitioner.class_dist_params(dist['mu'], parse_sigma(dist['sigma']), dist['a'], dist['b'],
                                  dist['num_classes'])
    if parse_sigma(dist['sigma']) == 0 and (dist['mu'] != int(dist['mu'])
                                            or not 1 <= dist['mu'] <= dist['num_classes']):
        raise ValueError('sigma = 0 requires an integer mu in [1, {}] [{}]'
                         .format(dist['num_classes'], dist['mu']))

    netcomp.cell_config(**d['cell'])


class experiment_config(object):
    """Validated experiment configuration.

    Attribute names mirror the configuration document; sub-documents are exposed through
    typed accessors (`dist_params`, `cell_config`, `hyper_params`, `selection_policy`).
    """
    def __init__(self, document, base_directory=None, source='<config>'):
        """Construct an experiment_config object from a (partial) configuration document.

        Arguments:
        document -- mapping with any subset of the keys of `default_config()`
        base_directory -- directory against which a relative dataset path is resolved
        source -- name of the document's origin used in error messages
        """
        merged = merge(default_config(), document or {})

        check_schema(merged, config_schema, source)
        merged.pop('schema_version', None)

        sigma = parse_sigma(merged['data_distribution']['sigma'])
        merged['data_distribution']['sigma'] = 'inf' if math.isinf(sigma) else sigma

        check_invariants(merged)

        self.document = merged
        self.base_directory = base_directory
        self.source = source


    def __getattr__(self, name):
        document = self.__dict__.get('document')
        if document is not None and name in document:
            return document[name]

        raise AttributeError(name)


    def as_dict(self):
        """Return a deep copy of the resolved configuration document."""
        return copy.deepcopy(self.document)


    def with_overrides(self, overrides):
        """Return a new experiment_config with `overrides` deep-merged into this one."""
        return experiment_config(merge(self.document, overrides), self.base_directory, self.source)


    def with_method(self, method):
        """Return a new experiment_config simulating the compared method `method`."""
        protocol, data_policy, client_policy = context.parse_method(method)
        return self.with_overrides({'protocol': protocol,
                                    'policy': {'client_policy': client_policy,
                                               'data_policy': data_policy}})


    def method(self):
        """Return the display name of the method this configuration simulates."""
        if self.protocol == context.hybrid_fl():
            return context.method_name(self.protocol,
                                       self.policy['data_policy'],
                                       self.policy['client_policy'])
        return self.protocol


    def dist_params(self):
        d = self.data_distribution
        return partitioner.class_dist_params(d['mu'], parse_sigma(d['sigma']), d['a'], d['b'],
                                             d['num_classes'])


    def cell_config(self):
        return netcomp.cell_config(**self.cell)


    def hyper_params(self):
        return training.train_hyper_params(**self.hp)


    def selection_policy(self):
        return scheduler.selection_policy(self.policy['client_policy'], self.policy['data_policy'])


    def T_round_seconds(self):
        return float(self.T_round)


    def T_final_seconds(self):
        return 60.0 * float(self.T_final)


    def summary_window_seconds(self):
        return 60.0 * float(self.summary_window_minutes)


def read_yaml(path):
    """Return the YAML document in `path`; an empty file yields an empty mapping."""
    with open(path) as f:
        document = yaml.safe_load(f)

    if document is None:
        return dict()

    if not isinstance(document, dict):
        raise ValueError('[{}]: top level must be a mapping'.format(path))

    return document


def load_config(path):
    """Return the validated experiment_config read from the YAML file at `path`.

    Arguments:
    path -- path to a YAML document mirroring `default_config()`
    """
    path = os.path.abspath(path)

    logging.info('loading configuration [{}]'.format(path))

    return experiment_config(read_yaml(path), os.path.dirname(path), path)


class sweep_spec(object):
    """A parameter sweep: one config axis, its values, and the methods to compare."""
    def __init__(self, base, axis, values, methods=None):
        """Construct a sweep_spec object.

        Arguments:
        base -- experiment_config every sweep point starts from
        axis -- one of 'mu', 'sigma', 'r_UL', 'r_var'
        values -- non-empty list of values of `axis`
        methods -- method names to compare (default: the base config's methods)
        """
        if axis not in context.sweep_axes():
            raise ValueError('unknown sweep axis [{}]; expected one of {}'
                             .format(axis, context.sweep_axes()))

        if not values:
            raise ValueError('sweep values must be non-empty')

        self.base = base
        self.axis = axis
        self.values = list(values)
        self.methods = list(methods or base.methods)

        # Building every point validates every value against its axis.
        self.points = [self.point(v) for v in self.values]


    def overrides(self, value):
        """Return the configuration overrides which set the sweep axis to `value`."""
        if self.axis in ['mu', 'sigma']:
            return {'data_distribution': {self.axis: value}}

        return {self.axis: value}


    def point(self, value):
        """Return the experiment_config of the sweep point `value`."""
        try:
            return self.base.with_overrides(self.overrides(value))

        except ValueError as e:
            raise ValueError('sweep value [{}] is invalid for axis [{}]: {}'
                             .format(value, self.axis, e))


    def with_overrides(self, overrides):
        """Return a new sweep_spec whose base has `overrides` deep-merged into it."""
        return sweep_spec(self.base.with_overrides(overrides), self.axis, self.values, self.methods)


    def as_dict(self):
        return {'base': self.base.as_dict(), 'axis': self.axis,
                'values': self.values, 'methods': self.methods}


def is_sweep_document(document):
    """Return True when the YAML document describes a sweep rather than a single config."""
    return 'axis' in document


def load_sweep(path):
    """Return the sweep_spec read from the YAML file at `path`.

    `base` is either an inline configuration mapping or a path to a configuration file,
    resolved relative to the sweep file.

    Arguments:
    path -- path to a YAML sweep document
    """
    path = os.path.abspath(path)
    directory = os.path.dirname(path)

    document = read_yaml(path)
    check_schema(document, sweep_schema, path)

    for key in ['axis', 'values']:
        if key not in document:
            raise ValueError('[{}]: sweep is missing [{}]'.format(path, key))

    base = document.get('base', dict())
    if isinstance(base, str):
        base_path = base if os.path.isabs(base) else os.path.join(directory, base)
        base_config = load_config(base_path)
    else:
        base_config = experiment_config(base, directory, path)

    return sweep_spec(base_config, document['axis'], document['values'], document.get('methods'))


def command_line_overrides(trials=None, seed=None):
    """Return the configuration overrides for the --trials and --seed options.

    Arguments:
    trials -- number of trials, or None to keep the configured value
    seed -- master seed applied to every random stream, or None to keep the configured seeds
    """
    overrides = dict()

    if trials is not None:
        overrides['trials'] = trials

    if seed is not None:
        overrides['seeds'] = {k: seed for k in default_config()['seeds']}

    return overrides
