# grown-up modules
import numpy

# Stream tags keep the purpose of each generator apart. Changing a tag changes every draw
# made from that stream, so these values are part of the replay contract.
_purposes = {
    'partition': 1,
    'placement': 2,
    'capability': 3,
    'permissions': 4,
    'candidates': 5,
    'fluctuation': 6,
    'init': 7,
    'local_update': 8,
    'server_update': 9,
    'dataset': 10,
}

def derive_rng(seed, purpose, *keys):
    """Return a numpy Generator derived from `seed`, a named purpose, and integer keys.

    Two calls with the same arguments return generators producing identical streams, and
    the stream does not depend on how many draws any other generator has made.

    Arguments:
    seed -- non-negative integer master seed
    purpose -- name of the random stream (see `_purposes`)
    keys -- further non-negative integers (trial index, round index, client id, ...)
    """
    if purpose not in _purposes:
        raise ValueError('unknown random stream purpose [{}]'.format(purpose))

    spawn_key = tuple([_purposes[purpose]] + [int(k) for k in keys])

    return numpy.random.default_rng(numpy.random.SeedSequence(int(seed), spawn_key=spawn_key))
