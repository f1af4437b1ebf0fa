# grown-up modules
import numpy

class model(object):
    """Strategy interface of a trainable classifier over a flat parameter vector."""
    def __init__(self, dim, num_classes):
        """Construct a model strategy.

        Arguments:
        dim -- feature dimension D
        num_classes -- number of classes L
        """
        if dim < 1 or num_classes < 2:
            raise ValueError('model needs dim >= 1 and num_classes >= 2 [{}] [{}]'
                             .format(dim, num_classes))

        self.dim = int(dim)
        self.num_classes = int(num_classes)


    def name(self):
        raise NotImplementedError('method not implemented for model strategy')


    def parameter_count(self):
        raise NotImplementedError('method not implemented for model strategy')


    def init_weights(self, rng):
        raise NotImplementedError('method not implemented for model strategy')


    def logits(self, w, X):
        raise NotImplementedError('method not implemented for model strategy')


    def loss_and_gradient(self, w, X, y):
        raise NotImplementedError('method not implemented for model strategy')


    def predict(self, w, X):
        """Return the argmax class of each row of `X`."""
        return numpy.argmax(self.logits(w, X), axis=1)


    def loss(self, w, X, y):
        """Return the mean cross-entropy of `w` on (`X`, `y`)."""
        return self.loss_and_gradient(w, X, y)[0]


def softmax_cross_entropy(logits, y):
    """Return (mean cross-entropy, d loss / d logits) for integer labels `y`."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = numpy.exp(shifted)
    probabilities = exp / exp.sum(axis=1, keepdims=True)

    n = len(y)
    rows = numpy.arange(n)
    log_likelihood = shifted[rows, y] - numpy.log(exp.sum(axis=1))

    delta = probabilities
    delta[rows, y] -= 1.0

    return float(-log_likelihood.mean()), delta / n


def make_model(name, dim, num_classes, hidden_units=32):
    """Return the model strategy called `name`.

    Arguments:
    name -- 'softmax_regression' or 'mlp'
    dim -- feature dimension D
    num_classes -- number of classes L
    hidden_units -- width of the hidden layer (mlp only)
    """
    from . import mlp
    from . import softmax_regression

    if name == 'softmax_regression':
        return softmax_regression.softmax_regression(dim, num_classes)

    if name == 'mlp':
        return mlp.mlp(dim, num_classes, hidden_units)

    raise ValueError('unknown model [{}]'.format(name))
