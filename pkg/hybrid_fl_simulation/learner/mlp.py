# grown-up modules
import numpy

# local modules
from . import model

class mlp(model.model):
    """One tanh hidden layer followed by a softmax output layer.

    The flat weights are W1 (D x H), b1 (H), W2 (H x L), b2 (L) in that order.
    """
    def __init__(self, dim, num_classes, hidden_units=32):
        super(mlp, self).__init__(dim, num_classes)

        if hidden_units < 1:
            raise ValueError('hidden_units must be positive [{}]'.format(hidden_units))

        self.hidden_units = int(hidden_units)


    def name(self):
        return 'mlp'


    def parameter_count(self):
        D, H, L = self.dim, self.hidden_units, self.num_classes
        return D * H + H + H * L + L


    def init_weights(self, rng):
        D, H, L = self.dim, self.hidden_units, self.num_classes
        return numpy.concatenate([rng.normal(0.0, 1.0 / numpy.sqrt(D), size=D * H),
                                  numpy.zeros(H),
                                  rng.normal(0.0, 1.0 / numpy.sqrt(H), size=H * L),
                                  numpy.zeros(L)])


    def unpack(self, w):
        D, H, L = self.dim, self.hidden_units, self.num_classes
        i = 0
        W1 = w[i:i + D * H].reshape(D, H); i += D * H
        b1 = w[i:i + H]; i += H
        W2 = w[i:i + H * L].reshape(H, L); i += H * L
        b2 = w[i:i + L]
        return W1, b1, W2, b2


    def logits(self, w, X):
        W1, b1, W2, b2 = self.unpack(w)
        return numpy.tanh(X @ W1 + b1) @ W2 + b2


    def loss_and_gradient(self, w, X, y):
        W1, b1, W2, b2 = self.unpack(w)

        hidden = numpy.tanh(X @ W1 + b1)
        loss, delta = model.softmax_cross_entropy(hidden @ W2 + b2, y)

        back = (delta @ W2.T) * (1.0 - hidden ** 2)

        return loss, numpy.concatenate([(X.T @ back).ravel(),
                                        back.sum(axis=0),
                                        (hidden.T @ delta).ravel(),
                                        delta.sum(axis=0)])
