import math
import unittest

import numpy

from hybrid_fl_simulation import netcomp

class PathlossTests(unittest.TestCase):

    def setUp(self):
        self.cfg = netcomp.cell_config()

    def test_pathloss_increases_with_distance(self):
        distances = [10, 50, 200, 800, 2000]
        values = [netcomp.pathloss_db(d, self.cfg) for d in distances]
        self.assertTrue(all(v1 < v2 for v1, v2 in zip(values, values[1:])))

    def test_pathloss_at_200_meters(self):
        expected = 36.7 * math.log10(200) + 22.7 + 26 * math.log10(2.5)
        self.assertAlmostEqual(netcomp.pathloss_db(200, self.cfg), expected, places=12)
        self.assertAlmostEqual(netcomp.pathloss_db(200, self.cfg), 117.494241, places=5)

    def test_doubling_distance_adds_fixed_loss(self):
        for d in [20, 150, 900]:
            delta = netcomp.pathloss_db(2 * d, self.cfg) - netcomp.pathloss_db(d, self.cfg)
            self.assertAlmostEqual(delta, 36.7 * math.log10(2), places=9)

    def test_distances_below_floor_are_clamped(self):
        with self.assertLogs(level='WARNING'):
            value = netcomp.pathloss_db(1.0, self.cfg)

        self.assertEqual(value, netcomp.pathloss_db(netcomp.MIN_DISTANCE, self.cfg))


class ThroughputTests(unittest.TestCase):

    def setUp(self):
        self.cfg = netcomp.cell_config()

    def test_cap_is_active_near_the_base_station(self):
        self.assertAlmostEqual(netcomp.mean_throughput(netcomp.MIN_DISTANCE, self.cfg), 8.64e6, places=3)
        self.assertAlmostEqual(self.cfg.max_throughput(), 8.64e6, places=3)

    def test_zero_snr_gives_zero_throughput(self):
        self.assertEqual(netcomp.capped_shannon_throughput(0.0, self.cfg), 0.0)

    def test_population_mean_matches_calibration(self):
        distances = netcomp.place_clients(1000, self.cfg, numpy.random.default_rng(0))
        mean, peak = netcomp.population_throughput_stats(distances, self.cfg)

        self.assertLess(abs(mean - 1.4e6) / 1.4e6, 0.15)
        self.assertLessEqual(peak, self.cfg.max_throughput() + 1e-6)

    def test_placement_stays_inside_the_cell(self):
        distances = netcomp.place_clients(5000, self.cfg, numpy.random.default_rng(1))
        self.assertGreaterEqual(distances.min(), netcomp.MIN_DISTANCE)
        self.assertLessEqual(distances.max(), self.cfg.cell_radius)

    def test_throughput_never_exceeds_cap(self):
        for d in numpy.linspace(netcomp.MIN_DISTANCE, self.cfg.cell_radius, 50):
            self.assertLessEqual(netcomp.mean_throughput(d, self.cfg), self.cfg.max_throughput() + 1e-6)

    def test_noise_from_density_when_no_effective_noise(self):
        cfg = netcomp.cell_config(effective_noise=None)
        self.assertAlmostEqual(cfg.noise_power(), -174 + 10 * math.log10(1.8e6) + 7, places=9)

    def test_generated_resources_use_capability_range(self):
        rng = numpy.random.default_rng(2)
        distances = netcomp.place_clients(200, self.cfg, rng)
        resources = netcomp.generate_resources(distances, self.cfg, (10, 100), 0.0, rng)

        self.assertEqual(len(resources), 200)
        for res in resources:
            self.assertTrue(10 <= res.avg_capability <= 100)
            self.assertGreater(res.avg_throughput, 0)


class RoundValueTests(unittest.TestCase):

    def test_no_fluctuation_returns_average(self):
        self.assertEqual(netcomp.sample_round_value(5.0, 0.0, numpy.random.default_rng(0)), 5.0)

    def test_draws_stay_within_interval(self):
        rng = numpy.random.default_rng(1)
        for _ in range(2000):
            value = netcomp.sample_round_value(4.0, 0.5, rng)
            self.assertTrue(2.0 <= value <= 6.0)

    def test_empirical_mean_is_close_to_average(self):
        rng = numpy.random.default_rng(2)
        values = [netcomp.sample_round_value(4.0, 0.5, rng) for _ in range(20000)]
        self.assertLess(abs(numpy.mean(values) - 4.0) / 4.0, 0.02)

    def test_invalid_arguments_are_rejected(self):
        rng = numpy.random.default_rng(0)

        with self.assertRaises(ValueError):
            netcomp.sample_round_value(0.0, 0.1, rng)

        with self.assertRaises(ValueError):
            netcomp.sample_round_value(1.0, 1.0, rng)


class TimeTests(unittest.TestCase):

    def test_update_time(self):
        self.assertEqual(netcomp.update_time(100, 5, 50), 10.0)
        self.assertEqual(netcomp.update_time(0, 5, 50), 0.0)
        self.assertEqual(netcomp.update_time(100, 5, 100), netcomp.update_time(100, 5, 50) / 2)

    def test_update_time_rejects_non_positive_capability(self):
        with self.assertRaises(ValueError):
            netcomp.update_time(10, 1, 0)

    def test_upload_time(self):
        self.assertEqual(netcomp.upload_time(1e6, 8e6), 1.0)
        self.assertEqual(netcomp.upload_time(0, 8e6), 0.0)
        self.assertAlmostEqual(netcomp.upload_time(3072, 1.4e6), 0.01755, places=4)

    def test_distribution_time_uses_slowest_receiver(self):
        self.assertEqual(netcomp.dist_time(1e6, []), 0.0)
        self.assertEqual(netcomp.dist_time(1e6, [8e6, 2e6, 4e6]), 4.0)


class ClientResourcesTests(unittest.TestCase):

    def test_invalid_resources_are_rejected(self):
        with self.assertRaises(ValueError):
            netcomp.client_resources(0, 10)

        with self.assertRaises(ValueError):
            netcomp.client_resources(1e6, -1)

        with self.assertRaises(ValueError):
            netcomp.client_resources(1e6, 10, r_var=1.0)
