import unittest

import numpy

from hybrid_fl_simulation import dataset
from hybrid_fl_simulation.learner import model
from hybrid_fl_simulation.learner import training

def relative_error(a, b):
    return numpy.linalg.norm(a - b) / max(numpy.linalg.norm(a), numpy.linalg.norm(b), 1e-12)


class InitModelTests(unittest.TestCase):

    def setUp(self):
        self.net = model.make_model('softmax_regression', 5, 3)

    def test_same_seed_gives_same_weights(self):
        a = training.init_model(self.net, numpy.random.default_rng(1))
        b = training.init_model(self.net, numpy.random.default_rng(1))
        numpy.testing.assert_array_equal(a.weights, b.weights)
        self.assertEqual(a.dimension(), (5 + 1) * 3)

    def test_different_seeds_give_different_weights(self):
        a = training.init_model(self.net, numpy.random.default_rng(1))
        b = training.init_model(self.net, numpy.random.default_rng(2))
        self.assertFalse(numpy.array_equal(a.weights, b.weights))

    def test_model_without_parameters_is_rejected(self):
        with self.assertRaises(ValueError):
            model.make_model('softmax_regression', 0, 3)

    def test_unknown_model_is_rejected(self):
        with self.assertRaises(ValueError):
            model.make_model('resnet', 5, 3)


class GradientCheckTests(unittest.TestCase):

    def check(self, net, seed):
        rng = numpy.random.default_rng(seed)
        X = rng.normal(size=(7, net.dim))
        y = rng.integers(0, net.num_classes, size=7)
        w = net.init_weights(rng) + rng.normal(0.0, 0.3, size=net.parameter_count())

        _, analytic = net.loss_and_gradient(w, X, y)
        numeric = training.numerical_gradient(net, w, X, y)

        self.assertLess(relative_error(analytic, numeric), 1e-4)

    def test_softmax_regression_gradient(self):
        for seed in range(5):
            self.check(model.make_model('softmax_regression', 3, 4), seed)

    def test_mlp_gradient(self):
        for seed in range(5):
            self.check(model.make_model('mlp', 3, 4, hidden_units=5), seed)

    def test_random_shapes(self):
        rng = numpy.random.default_rng(17)

        for seed in range(100):
            dim, num_classes = int(rng.integers(1, 6)), int(rng.integers(2, 6))
            name = 'mlp' if seed % 2 else 'softmax_regression'
            net = model.make_model(name, dim, num_classes, hidden_units=int(rng.integers(2, 7)))

            self.check(net, 100 + seed)


class LocalUpdateTests(unittest.TestCase):

    def setUp(self):
        self.net = model.make_model('softmax_regression', 3, 4)
        rng = numpy.random.default_rng(0)
        self.params = training.model_params(rng.normal(size=self.net.parameter_count()), 0)
        self.X = rng.normal(size=(20, 3))
        self.y = rng.integers(0, 4, size=20)

    def test_zero_learning_rate_keeps_weights(self):
        hp = training.train_hyper_params(batch_size=5, epochs_per_round=2, initial_lr=0.0)
        out = training.local_update(self.net, self.params, self.X, self.y, hp, 0, numpy.random.default_rng(1))

        numpy.testing.assert_array_equal(out.weights, self.params.weights)
        self.assertEqual(out.sample_weight, 20)

    def test_single_sample_takes_one_hand_computed_step(self):
        x = numpy.array([[0.5, -1.0, 2.0]])
        y = numpy.array([2])
        hp = training.train_hyper_params(batch_size=1, epochs_per_round=1, initial_lr=0.1, lr_decay=1.0)

        out = training.local_update(self.net, self.params, x, y, hp, 0, numpy.random.default_rng(1))

        W = self.params.weights[:12].reshape(3, 4)
        b = self.params.weights[12:]
        z = x[0] @ W + b
        p = numpy.exp(z - z.max())
        p /= p.sum()
        p[2] -= 1.0
        expected = self.params.weights - 0.1 * numpy.concatenate([numpy.outer(x[0], p).ravel(), p])

        numpy.testing.assert_allclose(out.weights, expected, rtol=1e-12, atol=1e-12)

    def test_full_batch_round_never_increases_the_loss(self):
        hp = training.train_hyper_params(batch_size=20, epochs_per_round=5, initial_lr=0.1)

        for seed in range(20):
            rng = numpy.random.default_rng(seed)
            params = training.model_params(rng.normal(size=self.net.parameter_count()), 0)
            out = training.local_update(self.net, params, self.X, self.y, hp, 0, rng)

            self.assertLessEqual(self.net.loss(out.weights, self.X, self.y),
                                 self.net.loss(params.weights, self.X, self.y))

    def test_round_on_clustered_data_lowers_the_loss(self):
        train, _ = dataset.make_gaussian_clusters(seed=2, train_per_class=40, test_per_class=1)
        mean, std = dataset.standardization(train)
        train = train.standardized(mean, std)

        net = model.make_model('softmax_regression', train.dim(), 10)
        params = training.init_model(net, numpy.random.default_rng(0))
        out = training.local_update(net, params, train.features, train.labels, training.train_hyper_params(),
                                    0, numpy.random.default_rng(1))

        self.assertLess(net.loss(out.weights, train.features, train.labels),
                        net.loss(params.weights, train.features, train.labels))

    def test_learning_rate_decays_per_round(self):
        hp = training.train_hyper_params(initial_lr=0.2, lr_decay=0.5)
        self.assertEqual(hp.learning_rate(0), 0.2)
        self.assertEqual(hp.learning_rate(2), 0.05)

    def test_empty_shard_is_rejected(self):
        hp = training.train_hyper_params()
        with self.assertRaises(ValueError):
            training.local_update(self.net, self.params, self.X[:0], self.y[:0], hp, 0,
                                  numpy.random.default_rng(0))

    def test_non_finite_loss_raises(self):
        X = self.X.copy()
        X[3, 1] = numpy.nan
        hp = training.train_hyper_params(batch_size=20, epochs_per_round=1)

        with self.assertRaises(RuntimeError):
            training.local_update(self.net, self.params, X, self.y, hp, 0, numpy.random.default_rng(0))


class ServerUpdateTests(unittest.TestCase):

    def setUp(self):
        self.net = model.make_model('softmax_regression', 3, 4)
        rng = numpy.random.default_rng(3)
        self.params = training.model_params(rng.normal(size=self.net.parameter_count()), 0)
        self.X = rng.normal(size=(30, 3))
        self.y = rng.integers(0, 4, size=30)
        self.hp = training.train_hyper_params(batch_size=10, epochs_per_round=3)

    def test_empty_server_dataset_is_identity(self):
        out = training.server_update(self.net, self.params, self.X[:0], self.y[:0], self.hp, 0,
                                     numpy.random.default_rng(0))
        numpy.testing.assert_array_equal(out.weights, self.params.weights)
        self.assertEqual(out.sample_weight, 0)

    def test_server_follows_the_client_rule(self):
        server = training.server_update(self.net, self.params, self.X, self.y, self.hp, 4,
                                        numpy.random.default_rng(8))
        client = training.local_update(self.net, self.params, self.X, self.y, self.hp, 4,
                                       numpy.random.default_rng(8))

        numpy.testing.assert_array_equal(server.weights, client.weights)
        self.assertEqual(server.sample_weight, 30)

    def test_balanced_data_spreads_accuracy_more_evenly(self):
        train, test = dataset.make_gaussian_clusters(seed=0)
        mean, std = dataset.standardization(train)
        train, test = train.standardized(mean, std), test.standardized(mean, std)

        net = model.make_model('softmax_regression', train.dim(), 10)
        initial = training.init_model(net, numpy.random.default_rng(0))
        hp = training.train_hyper_params(batch_size=50, epochs_per_round=5)

        rng = numpy.random.default_rng(1)
        balanced = numpy.concatenate([rng.choice(train.class_indices(c), 30, replace=False) for c in range(10)])
        single = train.class_indices(0)[:300]

        spreads = list()
        for indices in [balanced, single]:
            out = training.server_update(net, initial, train.features[indices], train.labels[indices], hp, 0,
                                         numpy.random.default_rng(2))
            _, per_class = training.evaluate(net, out, test.features, test.labels)
            spreads.append(numpy.std(per_class))

        self.assertLess(spreads[0], spreads[1])


class AggregateTests(unittest.TestCase):

    def test_single_model_is_returned(self):
        m = training.model_params([1.0, 2.0], 5)
        out = training.aggregate([m])
        numpy.testing.assert_array_equal(out.weights, m.weights)
        self.assertEqual(out.sample_weight, 5)

    def test_identical_models_ignore_weights(self):
        out = training.aggregate([training.model_params([1.0, -2.0], 1), training.model_params([1.0, -2.0], 9)])
        numpy.testing.assert_array_equal(out.weights, [1.0, -2.0])

    def test_weighted_average(self):
        u = numpy.array([1.0, 4.0, -2.0])
        v = numpy.array([3.0, 0.0, 2.0])
        out = training.aggregate([training.model_params(u, 1), training.model_params(v, 3)])

        numpy.testing.assert_allclose(out.weights, (u + 3 * v) / 4)
        self.assertEqual(out.sample_weight, 4)

    def test_order_does_not_matter(self):
        rng = numpy.random.default_rng(0)
        models = [training.model_params(rng.normal(size=6), int(n)) for n in rng.integers(1, 50, size=5)]

        numpy.testing.assert_allclose(training.aggregate(models).weights,
                                      training.aggregate(models[::-1]).weights, rtol=1e-12)

    def test_zero_weights_fall_back_to_plain_mean(self):
        out = training.aggregate([training.model_params([0.0, 2.0], 0), training.model_params([2.0, 4.0], 0)])
        numpy.testing.assert_allclose(out.weights, [1.0, 3.0])

    def test_mismatched_dimensions_are_rejected(self):
        with self.assertRaises(ValueError):
            training.aggregate([training.model_params([1.0], 1), training.model_params([1.0, 2.0], 1)])

        with self.assertRaises(ValueError):
            training.aggregate([])


class EvaluateTests(unittest.TestCase):

    def test_constant_prediction_on_balanced_set(self):
        net = model.make_model('softmax_regression', 2, 10)
        w = numpy.zeros(net.parameter_count())
        w[2 * 10 + 3] = 1.0

        X = numpy.random.default_rng(0).normal(size=(100, 2))
        y = numpy.repeat(numpy.arange(10), 10)

        accuracy, per_class = training.evaluate(net, training.model_params(w), X, y)

        self.assertAlmostEqual(accuracy, 0.1)
        self.assertEqual(per_class[3], 1.0)

    def test_separable_training_set_is_memorized(self):
        net = model.make_model('softmax_regression', 2, 2)
        X = numpy.array([[-2.0, 0.0], [-1.0, 1.0], [2.0, 0.0], [1.0, -1.0]])
        y = numpy.array([0, 0, 1, 1])
        hp = training.train_hyper_params(batch_size=4, epochs_per_round=200, initial_lr=1.0)

        params = training.init_model(net, numpy.random.default_rng(0))
        params = training.local_update(net, params, X, y, hp, 0, numpy.random.default_rng(1))

        accuracy, _ = training.evaluate(net, params, X, y)
        self.assertEqual(accuracy, 1.0)

    def test_per_class_accuracies_average_to_overall(self):
        rng = numpy.random.default_rng(5)
        net = model.make_model('softmax_regression', 4, 3)
        params = training.init_model(net, rng)
        X = rng.normal(size=(60, 4))
        y = rng.integers(0, 3, size=60)

        accuracy, per_class = training.evaluate(net, params, X, y)
        counts = numpy.bincount(y, minlength=3)

        self.assertAlmostEqual(float((per_class * counts).sum() / counts.sum()), accuracy, places=12)

    def test_absent_classes_are_nan(self):
        net = model.make_model('softmax_regression', 2, 3)
        _, per_class = training.evaluate(net, training.model_params(numpy.zeros(9)),
                                         numpy.zeros((2, 2)), numpy.array([0, 0]))
        self.assertTrue(numpy.isnan(per_class[2]))
