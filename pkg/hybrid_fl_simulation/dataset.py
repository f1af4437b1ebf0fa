# grown-up modules
import csv
import logging
import os

import numpy

# local modules
from . import context
from . import seeding

class labeled_pool(object):
    """Class holding a pool of labeled feature vectors."""
    def __init__(self, features, labels, num_classes):
        """Construct a labeled_pool object.

        Arguments:
        features -- array of shape (N, D) of real features
        labels -- array of N integer labels in [0, num_classes)
        num_classes -- number of classes L
        """
        self.features = numpy.asarray(features, dtype=numpy.float64)
        self.labels = numpy.asarray(labels, dtype=numpy.int64)
        self.num_classes = int(num_classes)

        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError('features and labels disagree in shape [{}] [{}]'
                             .format(self.features.shape, self.labels.shape))

        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValueError('labels must lie in [0, {})'.format(self.num_classes))


    def __len__(self):
        return len(self.labels)


    def dim(self):
        """Return the feature dimension D."""
        return self.features.shape[1]


    def class_indices(self, label):
        """Return the pool indices of every sample with `label`, in pool order."""
        return numpy.flatnonzero(self.labels == label)


    def class_counts(self):
        """Return the number of samples per class as an array of length L."""
        return numpy.bincount(self.labels, minlength=self.num_classes)


    def standardized(self, mean, std):
        """Return a copy with features shifted by `mean` and scaled by `std`."""
        return labeled_pool((self.features - mean) / std, self.labels, self.num_classes)


def standardization(pool):
    """Return (mean, std) per feature of `pool`, with zero deviations replaced by 1."""
    mean = pool.features.mean(axis=0)
    std = pool.features.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def make_gaussian_clusters(seed=0,
                           num_classes=10,
                           dim=20,
                           train_per_class=300,
                           test_per_class=100,
                           separation=0.6):
    """Generate the desk-scale Gaussian-cluster dataset and return (train, test).

    Each class is an isotropic unit-variance Gaussian around a mean whose coordinates are
    drawn from N(0, `separation`^2). Samples are shuffled within each split.

    Arguments:
    seed -- seed of the generator
    num_classes -- number of classes L
    dim -- feature dimension D
    train_per_class -- training samples per class (at least 200 for the bundled set)
    test_per_class -- held-out test samples per class
    separation -- spread of the class means; smaller values make classes overlap more
    """
    rng = seeding.derive_rng(seed, 'dataset')

    means = rng.normal(0.0, separation, size=(num_classes, dim))

    def draw(per_class):
        labels = numpy.repeat(numpy.arange(num_classes), per_class)
        features = means[labels] + rng.normal(0.0, 1.0, size=(len(labels), dim))
        order = rng.permutation(len(labels))
        return labeled_pool(features[order], labels[order], num_classes)

    train = draw(train_per_class)
    test = draw(test_per_class)

    return train, test


def header_line(dim, num_classes, n_train, n_test):
    """Return the one-line header of the dataset text format."""
    return '# hybrid-fl-dataset v1 dim={} classes={} train={} test={}'.format(
        dim, num_classes, n_train, n_test)


def parse_header(line):
    """Return a dict with dim, classes, train and test parsed from a header line."""
    fields = line.strip().split()

    if len(fields) < 3 or fields[0] != '#' or fields[1] != 'hybrid-fl-dataset' or fields[2] != 'v1':
        raise ValueError('not a hybrid-fl-dataset v1 file [{}]'.format(line.strip()))

    header = dict()
    for f in fields[3:]:
        key, _, value = f.partition('=')
        header[key] = int(value)

    for key in ['dim', 'classes', 'train', 'test']:
        if key not in header:
            raise ValueError('dataset header is missing [{}]'.format(key))

    return header


def write_dataset(path, train, test):
    """Write `train` and `test` pools to `path` in the documented text format.

    Layout: a header line `# hybrid-fl-dataset v1 dim=D classes=L train=N test=M` followed by
    one comma-separated row per sample: `split,label,f_1,...,f_D` where split is `train` or
    `test`. Features are written with 17 significant digits so reading is exact.

    Arguments:
    path -- destination file
    train -- labeled_pool of training samples
    test -- labeled_pool of held-out test samples
    """
    if train.dim() != test.dim() or train.num_classes != test.num_classes:
        raise ValueError('train and test splits disagree in dimension or classes')

    with open(path, 'w', newline='') as f:
        f.write(header_line(train.dim(), train.num_classes, len(train), len(test)) + '\n')

        writer = csv.writer(f, lineterminator='\n')
        for split, pool in [('train', train), ('test', test)]:
            for x, y in zip(pool.features, pool.labels):
                writer.writerow([split, int(y)] + ['{:.17g}'.format(v) for v in x])

    logging.info('wrote dataset [{}] train [{}] test [{}]'.format(path, len(train), len(test)))


def read_dataset(path):
    """Read a dataset file and return (train, test) labeled_pools.

    Arguments:
    path -- file written by `write_dataset`
    """
    with open(path, newline='') as f:
        header = parse_header(f.readline())

        rows = {'train': ([], []), 'test': ([], [])}
        for row in csv.reader(f):
            if not row:
                continue

            split = row[0]
            if split not in rows:
                raise ValueError('unknown split [{}] in [{}]'.format(split, path))

            if len(row) != header['dim'] + 2:
                raise ValueError('row has [{}] fields, expected [{}] in [{}]'
                                 .format(len(row), header['dim'] + 2, path))

            rows[split][0].append([float(v) for v in row[2:]])
            rows[split][1].append(int(row[1]))

    pools = list()
    for split in ['train', 'test']:
        features, labels = rows[split]
        if len(labels) != header[split]:
            raise ValueError('[{}] declares [{}] {} samples but holds [{}]'
                             .format(path, header[split], split, len(labels)))

        pools.append(labeled_pool(numpy.array(features).reshape(len(labels), header['dim']),
                                  labels,
                                  header['classes']))

    return pools[0], pools[1]


def load_dataset(reference, base_directory=None, seed=0):
    """Return (train, test) for a dataset reference from the configuration.

    Arguments:
    reference -- `builtin:gaussian` or a path to a dataset file
    base_directory -- directory against which relative paths are resolved
    seed -- seed for the built-in generator
    """
    if reference == context.builtin_dataset():
        return make_gaussian_clusters(seed=seed)

    path = reference
    if base_directory and not os.path.isabs(path):
        path = os.path.join(base_directory, path)

    if not os.path.exists(path):
        raise ValueError('dataset file does not exist [{}]'.format(path))

    return read_dataset(path)
