import os
import shutil
import tempfile
import unittest

import numpy

from hybrid_fl_simulation import dataset

class DatasetTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory, ignore_errors=True)

    def test_builtin_shapes(self):
        train, test = dataset.make_gaussian_clusters(seed=0, num_classes=4, dim=5,
                                                     train_per_class=30, test_per_class=10)

        self.assertEqual(train.features.shape, (120, 5))
        self.assertEqual(test.features.shape, (40, 5))
        self.assertEqual(train.class_counts().tolist(), [30] * 4)
        self.assertEqual(test.class_counts().tolist(), [10] * 4)

    def test_builtin_is_deterministic(self):
        a, _ = dataset.make_gaussian_clusters(seed=5, train_per_class=20, test_per_class=5)
        b, _ = dataset.make_gaussian_clusters(seed=5, train_per_class=20, test_per_class=5)
        c, _ = dataset.make_gaussian_clusters(seed=6, train_per_class=20, test_per_class=5)

        numpy.testing.assert_array_equal(a.features, b.features)
        numpy.testing.assert_array_equal(a.labels, b.labels)
        self.assertFalse(numpy.array_equal(a.features, c.features))

    def test_write_then_read_is_exact(self):
        train, test = dataset.make_gaussian_clusters(seed=1, num_classes=3, dim=4,
                                                     train_per_class=10, test_per_class=5)
        path = os.path.join(self.directory, 'd.csv')

        dataset.write_dataset(path, train, test)
        read_train, read_test = dataset.read_dataset(path)

        numpy.testing.assert_array_equal(read_train.features, train.features)
        numpy.testing.assert_array_equal(read_test.labels, test.labels)
        self.assertEqual(read_train.num_classes, 3)

    def test_load_resolves_relative_paths(self):
        train, test = dataset.make_gaussian_clusters(seed=1, num_classes=3, dim=2,
                                                     train_per_class=4, test_per_class=2)
        dataset.write_dataset(os.path.join(self.directory, 'd.csv'), train, test)

        read_train, _ = dataset.load_dataset('d.csv', self.directory)
        self.assertEqual(len(read_train), 12)

        with self.assertRaisesRegex(ValueError, 'does not exist'):
            dataset.load_dataset('missing.csv', self.directory)

    def test_bad_header_is_rejected(self):
        path = os.path.join(self.directory, 'd.csv')
        with open(path, 'w') as f:
            f.write('label,f1\n')

        with self.assertRaisesRegex(ValueError, 'not a hybrid-fl-dataset'):
            dataset.read_dataset(path)

    def test_header_missing_field_is_rejected(self):
        with self.assertRaisesRegex(ValueError, 'missing \\[test\\]'):
            dataset.parse_header('# hybrid-fl-dataset v1 dim=2 classes=2 train=1')

    def test_declared_count_must_match(self):
        path = os.path.join(self.directory, 'd.csv')
        with open(path, 'w') as f:
            f.write(dataset.header_line(1, 2, 2, 0) + '\n')
            f.write('train,0,1.0\n')

        with self.assertRaisesRegex(ValueError, 'declares'):
            dataset.read_dataset(path)

    def test_labels_outside_class_set_are_rejected(self):
        with self.assertRaises(ValueError):
            dataset.labeled_pool(numpy.zeros((2, 1)), [0, 3], 3)

    def test_standardization(self):
        train, _ = dataset.make_gaussian_clusters(seed=2, train_per_class=50, test_per_class=1)
        mean, std = dataset.standardization(train)
        pool = train.standardized(mean, std)

        numpy.testing.assert_allclose(pool.features.mean(axis=0), 0.0, atol=1e-12)
        numpy.testing.assert_allclose(pool.features.std(axis=0), 1.0, atol=1e-12)

    def test_constant_feature_keeps_unit_scale(self):
        pool = dataset.labeled_pool(numpy.array([[1.0, 2.0], [1.0, 4.0]]), [0, 1], 2)
        _, std = dataset.standardization(pool)

        self.assertEqual(std[0], 1.0)
