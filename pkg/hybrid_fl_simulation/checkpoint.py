# grown-up modules
import logging
import os

import numpy

# local modules
from . import context
from . import json_utils

def checkpoint_basename(method, trial, point=0):
    """Return the file stem of a checkpoint, e.g. `p0_IID-minCV_trial3`."""
    return 'p{}_{}_trial{}'.format(point, method.replace('/', '-'), trial)


def write_checkpoints(directory, result, point=0):
    """Dump the periodic global models of an experiment_result and return the written paths.

    The weights go to a `.npy` matrix (one row per checkpoint, the final model last) and the
    round indices to a JSON document next to it.

    Arguments:
    directory -- checkpoint directory, created if missing
    result -- engine.experiment_result
    point -- sweep point index
    """
    os.makedirs(directory, exist_ok=True)

    stem = os.path.join(directory, checkpoint_basename(result.method, result.trial, point))

    rounds = [r for r, _ in result.checkpoints] + [len(result.records)]
    weights = numpy.stack([w for _, w in result.checkpoints] + [result.final_model.weights])

    numpy.save(stem + '.npy', weights)
    json_utils.put_json_to_file(stem + '.json', {
        'schema_version': context.schema_version(),
        'method': result.method,
        'trial': result.trial,
        'point': point,
        'rounds': rounds,
        'parameters': int(weights.shape[1]),
    })

    logging.info('wrote [{}] checkpoints [{}]'.format(len(rounds), stem))

    return [stem + '.npy', stem + '.json']


def read_checkpoints(stem):
    """Return (rounds, weights) written by `write_checkpoints` for the path stem `stem`."""
    metadata = json_utils.get_json_from_file(stem + '.json')
    weights = numpy.load(stem + '.npy')

    if len(metadata['rounds']) != weights.shape[0]:
        raise RuntimeError('[{}]: checkpoint metadata and weights disagree'.format(stem))

    return metadata['rounds'], weights
