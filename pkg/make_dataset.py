# grown-up modules
import logging
import os

# local modules
from hybrid_fl_simulation import dataset

if __name__ == "__main__":
    import argparse

    import cli
    from hybrid_fl_simulation import logs

    parser = argparse.ArgumentParser(description='Write the desk-scale Gaussian-cluster dataset '
                                                 'to a file in the hybrid-fl-dataset format.')

    cli.add_common_args(parser)

    parser.add_argument('path',
                        metavar='PATH_TO_DATASET_FILE',
                        help='Destination of the dataset file.')

    parser.add_argument('--seed', type=int, default=0, dest='seed',
                        help='Seed of the generator.')

    parser.add_argument('--classes', type=int, default=10, dest='num_classes',
                        help='Number of classes.')

    parser.add_argument('--dim', type=int, default=20, dest='dim',
                        help='Feature dimension.')

    parser.add_argument('--train-per-class', type=int, default=300, dest='train_per_class',
                        help='Training samples per class.')

    parser.add_argument('--test-per-class', type=int, default=100, dest='test_per_class',
                        help='Held-out test samples per class.')

    parser.add_argument('--separation', type=float, default=0.6, dest='separation',
                        help='Spread of the class means.')

    args = parser.parse_args()

    logs.configure(args.verbosity)

    if min(args.num_classes, args.dim, args.train_per_class, args.test_per_class) < 1:
        print('--classes, --dim, --train-per-class and --test-per-class must be positive')
        exit(1)

    train, test = dataset.make_gaussian_clusters(seed=args.seed,
                                                 num_classes=args.num_classes,
                                                 dim=args.dim,
                                                 train_per_class=args.train_per_class,
                                                 test_per_class=args.test_per_class,
                                                 separation=args.separation)

    dataset.write_dataset(os.path.abspath(args.path), train, test)

    logging.error('wrote [{}]'.format(os.path.abspath(args.path)))
