import unittest

from hybrid_fl_simulation import engine
from hybrid_fl_simulation import experiment_config

# Scaled-down version of configs/acceptance.yaml: 40 clients for an hour of simulated time.
def scaled_config(**overrides):
    document = {
        'K': 40,
        'C': 0.25,
        'r_UL': 0.5,
        'T_final': 60.0,
        'summary_window_minutes': 20.0,
        'data_distribution': {'mu': 2.0, 'sigma': 0.7},
        'item_bytes': 100000,
        'hp': {'initial_lr': 0.5, 'lr_decay': 1.0},
        'trials': 2,
    }
    return experiment_config.experiment_config(experiment_config.merge(document, overrides))


class ScaledComparisonTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.data = engine.prepare_data(scaled_config())


    def mean_accuracy(self, method, **overrides):
        results = engine.run_trials(scaled_config(**overrides).with_method(method), self.data)
        return engine.mean_and_std([r.summary_accuracy for r in results])[0]


    def test_hybrid_beats_fedcs_on_non_iid_clients(self):
        fedcs = self.mean_accuracy('FedCS')
        iid = self.mean_accuracy('IID/minCV')
        fast = self.mean_accuracy('maxThroughput/minCV')

        self.assertGreater(iid, fedcs + 0.02)
        self.assertGreater(iid, fast)

    def test_hybrid_matches_fedcs_on_iid_clients(self):
        overrides = {'data_distribution': {'mu': 10.0, 'sigma': 0.0}}

        fedcs = self.mean_accuracy('FedCS', **overrides)
        iid = self.mean_accuracy('IID/minCV', **overrides)

        self.assertLess(abs(iid - fedcs), 0.02)

    def test_centralized_improves_with_more_permitted_clients(self):
        accuracies = [self.mean_accuracy('Centralized', r_UL=r_UL) for r_UL in [0.05, 0.25, 1.0]]

        for lower, higher in zip(accuracies, accuracies[1:]):
            self.assertGreaterEqual(higher, lower - 0.02)

        self.assertLess(accuracies[0], self.mean_accuracy('IID/minCV', r_UL=0.05))

    def test_resource_fluctuation_never_helps(self):
        for method in ['FedCS', 'IID/minCV', 'Centralized']:
            steady = self.mean_accuracy(method, r_var=0.0)
            noisy = self.mean_accuracy(method, r_var=0.9)

            self.assertLessEqual(noisy, steady + 0.01, method)
            self.assertGreater(noisy, 0.2, method)
