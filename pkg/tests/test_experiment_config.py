import math
import os
import shutil
import tempfile
import unittest

from hybrid_fl_simulation import context
from hybrid_fl_simulation import experiment_config

configs_directory = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'configs')


class ConfigTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory, ignore_errors=True)

    def write(self, name, text):
        path = os.path.join(self.directory, name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_minimal_file_takes_defaults(self):
        cfg = experiment_config.load_config(self.write('c.yaml', 'dataset: builtin:gaussian\n'))

        self.assertEqual(cfg.K, 1000)
        self.assertEqual(cfg.C, 0.1)
        self.assertEqual(cfg.r_UL, 0.01)
        self.assertEqual(cfg.T_final, 400.0)
        self.assertEqual(cfg.T_final_seconds(), 24000.0)
        self.assertEqual(cfg.methods, context.all_methods())
        self.assertEqual(cfg.base_directory, self.directory)

    def test_empty_file_takes_defaults(self):
        cfg = experiment_config.load_config(self.write('c.yaml', ''))
        self.assertEqual(cfg.as_dict(), experiment_config.default_config())

    def test_shipped_default_file_matches_defaults(self):
        cfg = experiment_config.load_config(os.path.join(configs_directory, 'default.yaml'))
        self.assertEqual(cfg.as_dict(), experiment_config.default_config())

    def test_zero_C_is_rejected(self):
        with self.assertRaisesRegex(ValueError, 'C must satisfy'):
            experiment_config.experiment_config({'C': 0})

    def test_out_of_range_r_UL_is_rejected(self):
        with self.assertRaisesRegex(ValueError, 'r_UL must satisfy'):
            experiment_config.experiment_config({'r_UL': 1.5})

    def test_unknown_key_is_rejected(self):
        with self.assertRaisesRegex(ValueError, 'Additional properties'):
            experiment_config.experiment_config({'rounds': 10})

        with self.assertRaisesRegex(ValueError, 'cell'):
            experiment_config.experiment_config({'cell': {'shadowing': 8}})

    def test_wrong_type_names_the_key(self):
        with self.assertRaisesRegex(ValueError, 'K'):
            experiment_config.experiment_config({'K': 'many'})

    def test_infinite_sigma_literal_is_uniform(self):
        cfg = experiment_config.experiment_config({'data_distribution': {'sigma': 'inf'}})

        self.assertTrue(cfg.dist_params().is_uniform())
        self.assertEqual(cfg.data_distribution['sigma'], 'inf')

    def test_yaml_infinity_is_uniform(self):
        cfg = experiment_config.load_config(self.write('c.yaml', 'data_distribution:\n  sigma: .inf\n'))
        self.assertTrue(math.isinf(cfg.dist_params().sigma))

    def test_point_mass_needs_integer_mu(self):
        with self.assertRaisesRegex(ValueError, 'integer mu'):
            experiment_config.experiment_config({'data_distribution': {'mu': 2.5, 'sigma': 0}})

    def test_fedcs_cannot_upload_data(self):
        with self.assertRaisesRegex(ValueError, 'FedCS'):
            experiment_config.experiment_config({'protocol': 'FedCS'})

    def test_hybrid_needs_a_data_policy(self):
        with self.assertRaisesRegex(ValueError, 'only valid for FedCS'):
            experiment_config.experiment_config({'policy': {'data_policy': 'none'}})

    def test_distinct_messages_per_invariant(self):
        bad = [{'C': 0}, {'r_UL': -0.1}, {'T_round': 0}, {'T_final': -1}, {'r_var': 1.0},
               {'trials': 0}, {'K': 0}, {'capability_range': [0, 10]}]

        messages = set()
        for document in bad:
            with self.assertRaises(ValueError) as e:
                experiment_config.experiment_config(document)
            messages.add(str(e.exception).split(' [')[0])

        self.assertEqual(len(messages), len(bad))

    def test_with_method_sets_protocol_and_policy(self):
        cfg = experiment_config.experiment_config({})

        self.assertEqual(cfg.with_method('maxThroughput/maxClient').method(), 'maxThroughput/maxClient')
        self.assertEqual(cfg.with_method('FedCS').policy['data_policy'], 'none')
        self.assertEqual(cfg.with_method('Centralized').protocol, 'Centralized')

    def test_command_line_overrides(self):
        cfg = experiment_config.experiment_config({})
        cfg = cfg.with_overrides(experiment_config.command_line_overrides(trials=3, seed=7))

        self.assertEqual(cfg.trials, 3)
        self.assertEqual(set(cfg.seeds.values()), {7})
        self.assertEqual(experiment_config.command_line_overrides(), {})


class SweepTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory, ignore_errors=True)

    def write(self, name, text):
        path = os.path.join(self.directory, name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_sweep_with_base_file(self):
        self.write('base.yaml', 'K: 50\n')
        sweep = experiment_config.load_sweep(self.write('s.yaml', 'base: base.yaml\naxis: mu\nvalues: [1, 3]\n'))

        self.assertEqual(sweep.axis, 'mu')
        self.assertEqual([p.data_distribution['mu'] for p in sweep.points], [1, 3])
        self.assertEqual(sweep.points[0].K, 50)
        self.assertEqual(sweep.methods, context.all_methods())

    def test_sweep_with_inline_base(self):
        sweep = experiment_config.load_sweep(self.write(
            's.yaml', 'base:\n  K: 40\naxis: r_UL\nvalues: [0.0, 1.0]\nmethods: [FedCS, IID/minCV]\n'))

        self.assertEqual([p.r_UL for p in sweep.points], [0.0, 1.0])
        self.assertEqual(sweep.methods, ['FedCS', 'IID/minCV'])

    def test_invalid_value_for_axis_is_rejected(self):
        with self.assertRaisesRegex(ValueError, 'invalid for axis'):
            experiment_config.load_sweep(self.write('s.yaml', 'axis: r_var\nvalues: [0.2, 1.2]\n'))

    def test_empty_values_are_rejected(self):
        with self.assertRaises(ValueError):
            experiment_config.load_sweep(self.write('s.yaml', 'axis: sigma\nvalues: []\n'))

    def test_unknown_axis_is_rejected(self):
        with self.assertRaises(ValueError):
            experiment_config.load_sweep(self.write('s.yaml', 'axis: K\nvalues: [10]\n'))

    def test_sweep_overrides_reach_every_point(self):
        sweep = experiment_config.load_sweep(self.write('s.yaml', 'axis: sigma\nvalues: [0, inf]\n'))
        sweep = sweep.with_overrides({'trials': 4})

        self.assertEqual([p.trials for p in sweep.points], [4, 4])
        self.assertTrue(sweep.points[1].dist_params().is_uniform())

    def test_shipped_sweeps_load(self):
        for name in ['mu_sweep.yaml', 'sigma_sweep.yaml', 'r_ul_sweep.yaml', 'r_var_sweep.yaml',
                     'acceptance.yaml']:
            path = os.path.join(configs_directory, name)

            self.assertTrue(experiment_config.is_sweep_document(experiment_config.read_yaml(path)))
            self.assertGreater(len(experiment_config.load_sweep(path).points), 0)

    def test_acceptance_sweep_keeps_unlisted_defaults(self):
        sweep = experiment_config.load_sweep(os.path.join(configs_directory, 'acceptance.yaml'))

        self.assertEqual([p.r_UL for p in sweep.points], [0.05, 0.2])
        for point in sweep.points:
            hp = point.hyper_params()
            self.assertEqual(hp.initial_lr, 0.5)
            self.assertEqual(hp.lr_decay, 1.0)
            self.assertEqual(hp.batch_size, 50)
            self.assertEqual(point.item_bytes, 100000)
            self.assertEqual(point.dist_params().sigma, 0.7)
