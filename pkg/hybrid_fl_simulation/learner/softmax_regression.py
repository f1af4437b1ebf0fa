# grown-up modules
import numpy

# local modules
from . import model

class softmax_regression(model.model):
    """Multinomial logistic regression; the weights are W (D x L) followed by the bias (L)."""
    def name(self):
        return 'softmax_regression'


    def parameter_count(self):
        return (self.dim + 1) * self.num_classes


    def init_weights(self, rng):
        return rng.normal(0.0, 0.01, size=self.parameter_count())


    def unpack(self, w):
        split = self.dim * self.num_classes
        return w[:split].reshape(self.dim, self.num_classes), w[split:]


    def logits(self, w, X):
        W, b = self.unpack(w)
        return X @ W + b


    def loss_and_gradient(self, w, X, y):
        loss, delta = model.softmax_cross_entropy(self.logits(w, X), y)

        return loss, numpy.concatenate([(X.T @ delta).ravel(), delta.sum(axis=0)])
