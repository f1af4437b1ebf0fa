# grown-up modules
import logging
import math

import numpy
from scipy import special

class class_dist_params(object):
    """Class holding the truncated-normal parameters of the number-of-classes distribution."""
    def __init__(self, mu, sigma, a=0.5, b=None, num_classes=10):
        """Construct a class_dist_params object.

        Arguments:
        mu -- location of the class-count distribution
        sigma -- spread; 0 selects a point mass at `mu`, math.inf selects the uniform case
        a -- lower truncation (default: 0.5)
        b -- upper truncation (default: num_classes + 0.5, i.e. 10.5 for ten classes)
        num_classes -- number of classes L
        """
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.a = float(a)
        self.b = float(b) if b is not None else num_classes + 0.5
        self.num_classes = int(num_classes)

        if self.num_classes < 2:
            raise ValueError('num_classes must be at least 2 [{}]'.format(self.num_classes))

        if math.isnan(self.sigma) or self.sigma < 0:
            raise ValueError('sigma must be non-negative or inf [{}]'.format(sigma))

        if self.a >= self.b:
            raise ValueError('truncation bounds must satisfy a < b [{}] [{}]'.format(self.a, self.b))

        if self.is_truncated_normal() and not self.a <= self.mu <= self.b:
            raise ValueError('mu must lie within [a, b] [{}] [{}, {}]'.format(self.mu, self.a, self.b))


    def is_uniform(self):
        """Return True for the sigma = inf special case."""
        return math.isinf(self.sigma)


    def is_point_mass(self):
        """Return True for the sigma = 0 special case."""
        return self.sigma == 0


    def is_truncated_normal(self):
        """Return True when sigma is finite and positive."""
        return not self.is_uniform() and not self.is_point_mass()


    def __repr__(self):
        return 'class_dist_params(mu={}, sigma={}, a={}, b={}, num_classes={})'.format(
            self.mu, self.sigma, self.a, self.b, self.num_classes)


class class_histogram(object):
    """Per-class sample counts n_1..n_L."""
    def __init__(self, counts):
        self.counts = numpy.asarray(counts, dtype=numpy.int64).copy()

        if self.counts.ndim != 1 or (self.counts < 0).any():
            raise ValueError('histogram counts must be a vector of non-negative integers [{}]'
                             .format(counts))


    @classmethod
    def zeros(cls, num_classes):
        return cls(numpy.zeros(num_classes, dtype=numpy.int64))


    def __add__(self, other):
        return class_histogram(self.counts + other.counts)


    def __eq__(self, other):
        return isinstance(other, class_histogram) and numpy.array_equal(self.counts, other.counts)


    def __repr__(self):
        return 'class_histogram({})'.format(self.counts.tolist())


    def num_classes(self):
        return len(self.counts)


    def total(self):
        return int(self.counts.sum())


class client_shard(object):
    """The data held by one client.

    Samples are stored as indices into the training pool. The order of `indices` is the
    client's stable item order; `per_class_items[l]` lists, in that order, the positions of
    the items of class `l`.
    """
    def __init__(self, client_id, class_set, indices, labels):
        """Construct a client_shard object.

        Arguments:
        client_id -- integer identifier of the client
        class_set -- collection of class labels held by the client
        indices -- pool indices of the client's samples, in stable item order
        labels -- label of each sample
        """
        self.client_id = int(client_id)
        self.class_set = tuple(sorted(int(c) for c in class_set))
        self.indices = numpy.asarray(indices, dtype=numpy.int64)
        self.labels = numpy.asarray(labels, dtype=numpy.int64)

        if len(self.indices) != len(self.labels):
            raise ValueError('[client {}]: indices and labels differ in length'.format(client_id))

        if not set(numpy.unique(self.labels).tolist()) <= set(self.class_set):
            raise ValueError('[client {}]: sample label outside the class set'.format(client_id))

        self.per_class_items = {c: numpy.flatnonzero(self.labels == c) for c in self.class_set}


    def size(self):
        return len(self.indices)


    def histogram(self, num_classes):
        """Return the class_histogram reported by this client in the Resource Request step."""
        return class_histogram(numpy.bincount(self.labels, minlength=num_classes))


def standard_normal_cdf(x):
    """Return Phi(x) = (1 + erf(x / sqrt(2))) / 2."""
    return 0.5 * (1.0 + special.erf(x / math.sqrt(2.0)))


def truncated_normal_cdf(x, p):
    """Return F(x; mu, sigma, a, b), the CDF of the truncated normal distribution.

    Arguments:
    x -- point in [p.a, p.b]
    p -- class_dist_params with finite, positive sigma
    """
    if not p.is_truncated_normal():
        raise ValueError('truncated normal CDF requires finite sigma > 0 [{}]'.format(p.sigma))

    if not p.a <= x <= p.b:
        raise ValueError('x outside the truncation interval [{}] [{}, {}]'.format(x, p.a, p.b))

    lower = standard_normal_cdf((p.a - p.mu) / p.sigma)
    upper = standard_normal_cdf((p.b - p.mu) / p.sigma)

    if x == p.a:
        return 0.0

    if x == p.b:
        return 1.0

    value = (standard_normal_cdf((x - p.mu) / p.sigma) - lower) / (upper - lower)

    return min(1.0, max(0.0, float(value)))


def class_count_pmf(p):
    """Return the vector r where r_l is the fraction of clients holding data of l classes.

    r_l = F(l + 0.5) - F(l - 0.5) for l = 1..L. sigma = inf yields 1/L everywhere and
    sigma = 0 yields a point mass at l = mu.

    Arguments:
    p -- class_dist_params
    """
    L = p.num_classes

    if p.is_uniform():
        return numpy.full(L, 1.0 / L)

    if p.is_point_mass():
        if p.mu != int(p.mu) or not 1 <= int(p.mu) <= L:
            raise ValueError('sigma = 0 requires an integer mu in [1, {}] [{}]'.format(L, p.mu))

        r = numpy.zeros(L)
        r[int(p.mu) - 1] = 1.0
        return r

    # Edges outside [a, b] carry no mass.
    edges = [min(p.b, max(p.a, l + 0.5)) for l in range(0, L + 1)]
    cdf = numpy.array([truncated_normal_cdf(e, p) for e in edges])
    r = numpy.diff(cdf)

    total = r.sum()
    if total <= 0:
        raise ValueError('class-count distribution has no mass on 1..{} [{}]'.format(L, p))

    return r / total


def largest_remainder_counts(K, r):
    """Return integer counts summing to K that round K * r_l by the largest-remainder method.

    Ties between equal remainders go to the smaller l.

    Arguments:
    K -- total number of clients
    r -- probability vector
    """
    quotas = K * numpy.asarray(r, dtype=numpy.float64)
    counts = numpy.floor(quotas).astype(numpy.int64)
    remainders = quotas - counts

    leftover = int(K - counts.sum())
    order = sorted(range(len(r)), key=lambda l: (-remainders[l], l))
    for l in order[:leftover]:
        counts[l] += 1

    return counts


def partition(dataset, K, p, size_range, rng):
    """Split `dataset` into K non-IID client shards and return them in client-id order.

    Exactly largest_remainder(K * r_l) clients hold l distinct classes; which client gets
    which l is a seeded shuffle. Class sets are uniform draws without replacement, each
    client's total is uniform in `size_range`, the total is split across the client's classes
    (at least one sample each), and samples within a class are drawn with replacement from the
    class pool.

    Arguments:
    dataset -- labeled_pool of training samples
    K -- number of clients
    p -- class_dist_params
    size_range -- (min, max) samples per client, inclusive
    rng -- numpy Generator
    """
    L = p.num_classes
    low, high = size_range

    if dataset.num_classes != L:
        raise ValueError('dataset has [{}] classes but the distribution expects [{}]'
                         .format(dataset.num_classes, L))

    if K < 1:
        raise ValueError('K must be positive [{}]'.format(K))

    if not 1 <= low <= high:
        raise ValueError('invalid size range [{}, {}]'.format(low, high))

    class_pools = [dataset.class_indices(c) for c in range(L)]

    counts = largest_remainder_counts(K, class_count_pmf(p))
    class_counts = numpy.repeat(numpy.arange(1, L + 1), counts)
    class_counts = class_counts[rng.permutation(K)]

    logging.debug('clients per class count [{}]'.format(counts.tolist()))

    shards = list()
    for k in range(K):
        l = int(class_counts[k])

        classes = numpy.sort(rng.choice(L, size=l, replace=False))
        total = int(rng.integers(low, high + 1))

        if total < l:
            raise ValueError('[client {}]: [{}] samples cannot cover [{}] classes'.format(k, total, l))

        per_class = rng.multinomial(total - l, numpy.full(l, 1.0 / l)) + 1

        indices = list()
        labels = list()
        for c, n in zip(classes, per_class):
            if len(class_pools[c]) == 0:
                raise ValueError('[client {}]: class [{}] has an empty pool'.format(k, c))

            indices.append(rng.choice(class_pools[c], size=int(n), replace=True))
            labels.append(numpy.full(int(n), c, dtype=numpy.int64))

        indices = numpy.concatenate(indices)
        labels = numpy.concatenate(labels)

        order = rng.permutation(total)

        shards.append(client_shard(k, classes, indices[order], labels[order]))

    return shards
