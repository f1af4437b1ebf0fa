# grown-up modules
import logging

import numpy

class model_params(object):
    """Flat parameter vector of a model and the number of samples behind its last update."""
    def __init__(self, weights, sample_weight=0):
        """Construct a model_params object.

        Arguments:
        weights -- flat real vector of dimension P
        sample_weight -- non-negative number of samples used for the last update
        """
        self.weights = numpy.array(weights, dtype=numpy.float64)
        self.sample_weight = int(sample_weight)

        if self.weights.ndim != 1:
            raise ValueError('weights must be a flat vector [{}]'.format(self.weights.shape))

        if self.sample_weight < 0:
            raise ValueError('sample_weight must be non-negative [{}]'.format(sample_weight))


    def dimension(self):
        return len(self.weights)


class train_hyper_params(object):
    """SGD hyperparameters shared by clients and server."""
    def __init__(self, batch_size=50, epochs_per_round=5, initial_lr=0.25, lr_decay=0.99,
                 server_epochs=None):
        """Construct a train_hyper_params object.

        Arguments:
        batch_size -- mini-batch size
        epochs_per_round -- local epochs per round
        initial_lr -- learning rate of the first round
        lr_decay -- multiplicative learning-rate decay per round, in (0, 1]
        server_epochs -- epochs of the server update (default: epochs_per_round)
        """
        self.batch_size = int(batch_size)
        self.epochs_per_round = int(epochs_per_round)
        self.initial_lr = float(initial_lr)
        self.lr_decay = float(lr_decay)
        self.server_epochs = self.epochs_per_round if server_epochs is None else int(server_epochs)

        if self.batch_size < 1:
            raise ValueError('batch_size must be at least 1 [{}]'.format(batch_size))

        if self.epochs_per_round < 0 or self.server_epochs < 0:
            raise ValueError('epochs must be non-negative [{}] [{}]'
                             .format(epochs_per_round, server_epochs))

        if not 0 < self.lr_decay <= 1:
            raise ValueError('lr_decay must lie in (0, 1] [{}]'.format(lr_decay))

        if self.initial_lr < 0:
            raise ValueError('initial_lr must be non-negative [{}]'.format(initial_lr))


    def learning_rate(self, round_index):
        """Return the learning rate of global round `round_index` (0-based)."""
        return self.initial_lr * self.lr_decay ** round_index


def init_model(net, rng):
    """Return freshly initialized model_params for the model strategy `net`.

    Arguments:
    net -- model strategy from `model.make_model`
    rng -- numpy Generator
    """
    if net.parameter_count() < 1:
        raise ValueError('model has no parameters')

    return model_params(net.init_weights(rng), 0)


def sgd(net, weights, X, y, lr, epochs, batch_size, rng):
    """Run `epochs` epochs of mini-batch SGD and return the new weights.

    Arguments:
    net -- model strategy
    weights -- starting flat weights (not modified)
    X -- features of the training samples
    y -- labels of the training samples
    lr -- learning rate
    epochs -- number of passes over the samples
    batch_size -- mini-batch size
    rng -- numpy Generator used to shuffle each epoch
    """
    w = numpy.array(weights, dtype=numpy.float64)
    n = len(y)

    for epoch in range(epochs):
        order = rng.permutation(n)

        for begin in range(0, n, batch_size):
            batch = order[begin:begin + batch_size]
            loss, gradient = net.loss_and_gradient(w, X[batch], y[batch])

            if not numpy.isfinite(loss) or not numpy.isfinite(gradient).all():
                raise RuntimeError('non-finite loss [{}] at epoch [{}] batch [{}] lr [{}]'
                                   .format(loss, epoch, begin // batch_size, lr))

            w -= lr * gradient

    if not numpy.isfinite(w).all():
        raise RuntimeError('non-finite weights after SGD with lr [{}]'.format(lr))

    return w


def local_update(net, params, X, y, hp, round_index, rng):
    """Return the model updated by a client on its local data.

    Arguments:
    net -- model strategy
    params -- model_params distributed by the server
    X -- features of the client's samples
    y -- labels of the client's samples
    hp -- train_hyper_params
    round_index -- global round index (0-based) selecting the learning rate
    rng -- numpy Generator for the epoch shuffles
    """
    if len(y) == 0:
        raise ValueError('local update requires a non-empty shard')

    weights = sgd(net, params.weights, X, y, hp.learning_rate(round_index),
                  hp.epochs_per_round, hp.batch_size, rng)

    return model_params(weights, len(y))


def server_update(net, params, X, y, hp, round_index, rng):
    """Return the model updated by the server on the accumulated uploaded data.

    An empty server dataset returns the input weights with sample_weight 0.

    Arguments:
    net -- model strategy
    params -- current global model_params
    X -- features of the server dataset
    y -- labels of the server dataset
    hp -- train_hyper_params
    round_index -- global round index (0-based)
    rng -- numpy Generator for the epoch shuffles
    """
    if len(y) == 0:
        return model_params(params.weights, 0)

    weights = sgd(net, params.weights, X, y, hp.learning_rate(round_index),
                  hp.server_epochs, hp.batch_size, rng)

    return model_params(weights, len(y))


def aggregate(models):
    """Return the sample-weighted average of `models`.

    All-zero weights fall back to the unweighted mean. The result's sample_weight is the sum
    of the inputs' weights.

    Arguments:
    models -- non-empty list of model_params of equal dimension
    """
    if not models:
        raise ValueError('aggregate requires at least one model')

    dimension = models[0].dimension()
    if any(m.dimension() != dimension for m in models):
        raise ValueError('cannot aggregate models of different dimensions [{}]'
                         .format([m.dimension() for m in models]))

    stacked = numpy.stack([m.weights for m in models])
    weights = numpy.array([m.sample_weight for m in models], dtype=numpy.float64)
    total = int(weights.sum())

    if all(numpy.array_equal(stacked[0], row) for row in stacked[1:]):
        return model_params(stacked[0], total)

    if total == 0:
        averaged = stacked.mean(axis=0)
    else:
        averaged = (weights / weights.sum()) @ stacked

    averaged = numpy.clip(averaged, stacked.min(axis=0), stacked.max(axis=0))

    return model_params(averaged, total)


def evaluate(net, params, X, y):
    """Return (accuracy, per-class accuracies) of the model on a test set.

    Classes absent from the test set get a per-class accuracy of nan.

    Arguments:
    net -- model strategy
    params -- model_params to evaluate
    X -- test features
    y -- test labels
    """
    if len(y) == 0:
        raise ValueError('cannot evaluate on an empty test set')

    correct = net.predict(params.weights, X) == y

    counts = numpy.bincount(y, minlength=net.num_classes)
    hits = numpy.bincount(y, weights=correct, minlength=net.num_classes)

    with numpy.errstate(invalid='ignore', divide='ignore'):
        per_class = numpy.where(counts > 0, hits / numpy.maximum(counts, 1), numpy.nan)

    return float(correct.mean()), per_class


def numerical_gradient(net, w, X, y, eps=1e-6):
    """Return the central finite-difference gradient of the mean loss at `w`."""
    w = numpy.array(w, dtype=numpy.float64)
    gradient = numpy.zeros_like(w)

    for i in range(len(w)):
        original = w[i]
        w[i] = original + eps
        plus = net.loss(w, X, y)
        w[i] = original - eps
        minus = net.loss(w, X, y)
        w[i] = original
        gradient[i] = (plus - minus) / (2.0 * eps)

    logging.debug('finite-difference gradient over [{}] parameters'.format(len(w)))

    return gradient
