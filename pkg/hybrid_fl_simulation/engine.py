# grown-up modules
import logging
import math

import numpy

# local modules
from . import context
from . import dataset
from . import netcomp
from . import partitioner
from . import scheduler
from . import seeding
from .learner import model
from .learner import training

def candidate_count(K, C):
    """Return ceil(K * C), the number of clients asked for resources each round."""
    # Guard against products like 30 * 0.1 = 3.0000000000000004.
    return min(K, max(1, int(math.ceil(K * C - 1e-9))))


def permitted_count(K, r_UL):
    """Return round(K * r_UL) with halves rounded up."""
    return min(K, int(math.floor(K * r_UL + 0.5 + 1e-9)))


def mark_upload_permissions(K, r_UL, rng):
    """Return the sorted ids of the clients allowed to upload data, fixed for the experiment.

    Arguments:
    K -- number of clients
    r_UL -- fraction of clients which permit data uploading
    rng -- numpy Generator
    """
    n = permitted_count(K, r_UL)
    return sorted(int(k) for k in rng.choice(K, size=n, replace=False))


class random_streams(object):
    """Named random streams of one trial.

    Each stream is derived from its configured seed, the trial index and the round and
    client it serves, so draws never depend on the order in which they are consumed and
    every method compared within a trial sees the same candidates and fluctuations.
    """
    def __init__(self, seeds, trial):
        self.seeds = dict(seeds)
        self.trial = int(trial)


    def partition(self):
        return seeding.derive_rng(self.seeds['partition'], 'partition', self.trial)


    def placement(self):
        return seeding.derive_rng(self.seeds['resources'], 'placement', self.trial)


    def capability(self):
        return seeding.derive_rng(self.seeds['resources'], 'capability', self.trial)


    def permissions(self):
        return seeding.derive_rng(self.seeds['resources'], 'permissions', self.trial)


    def candidates(self, round_index):
        return seeding.derive_rng(self.seeds['resources'], 'candidates', self.trial, round_index)


    def fluctuation(self, round_index, client):
        return seeding.derive_rng(self.seeds['fluctuation'], 'fluctuation',
                                  self.trial, round_index, client)


    def init(self):
        return seeding.derive_rng(self.seeds['training'], 'init', self.trial)


    def local_update(self, round_index, client):
        return seeding.derive_rng(self.seeds['training'], 'local_update',
                                  self.trial, round_index, client)


    def server_update(self, round_index):
        return seeding.derive_rng(self.seeds['training'], 'server_update', self.trial, round_index)


def prepare_data(cfg):
    """Return the standardized (train, test) pools named by the configuration."""
    train, test = dataset.load_dataset(cfg.dataset, cfg.base_directory, cfg.dataset_seed)

    mean, std = dataset.standardization(train)

    return train.standardized(mean, std), test.standardized(mean, std)


class environment(object):
    """Everything about a trial that does not depend on the simulated method.

    Holds the training and test pools, the client shards and their histograms, the client
    resources, the upload permissions and the model strategy.
    """
    def __init__(self, cfg, rng, train, test):
        """Construct an environment object.

        Arguments:
        cfg -- experiment_config
        rng -- random_streams of the trial
        train -- standardized training labeled_pool
        test -- standardized test labeled_pool
        """
        L = cfg.data_distribution['num_classes']

        if train.num_classes != L or test.num_classes != L:
            raise ValueError('dataset has [{}] classes but data_distribution.num_classes is [{}]'
                             .format(train.num_classes, L))

        self.train = train
        self.test = test
        self.num_classes = L

        self.shards = partitioner.partition(train, cfg.K, cfg.dist_params(),
                                            cfg.client_size_range, rng.partition())
        self.histograms = [s.histogram(L) for s in self.shards]

        cell = cfg.cell_config()
        distances = netcomp.place_clients(cfg.K, cell, rng.placement())
        self.resources = netcomp.generate_resources(distances, cell, cfg.capability_range,
                                                    cfg.r_var, rng.capability())

        self.permitted = mark_upload_permissions(cfg.K, cfg.r_UL, rng.permissions())

        self.net = model.make_model(cfg.model['name'], train.dim(), L, cfg.model['hidden_units'])

        logging.info('trial [{}]: [{}] clients, [{}] permit data uploading'
                     .format(rng.trial, cfg.K, len(self.permitted)))


    def shard_data(self, k):
        """Return (X, y) of client `k`."""
        shard = self.shards[k]
        return self.train.features[shard.indices], shard.labels


class simulation_state(object):
    """Global state carried from round to round."""
    def __init__(self, env, global_model):
        """Construct a simulation_state object.

        Arguments:
        env -- environment of the trial
        global_model -- initial model_params
        """
        self.environment = env
        self.global_model = global_model
        self.clock = 0.0
        self.round_index = 0

        self.server_indices = list()
        self.server_counts = numpy.zeros(env.num_classes, dtype=numpy.int64)

        # Upload ledger: one mask of already uploaded item positions per permitted client.
        self.uploaded = {u: numpy.zeros(env.shards[u].size(), dtype=bool) for u in env.permitted}

        # Cumulative class histogram N of every client selected so far.
        self.history = partitioner.class_histogram.zeros(env.num_classes)


    def holds_data(self, u):
        return not self.uploaded[u].all()


    def remaining_in_order(self, u):
        """Return the not yet uploaded items of `u` as (position, class) in stable order."""
        positions = numpy.flatnonzero(~self.uploaded[u])
        labels = self.environment.shards[u].labels[positions]
        return list(zip(positions.tolist(), labels.tolist()))


    def remaining_by_class(self, u):
        """Return {class: not yet uploaded positions of that class, in stable order} for `u`."""
        shard = self.environment.shards[u]
        mask = self.uploaded[u]
        return {l: [int(p) for p in positions if not mask[p]]
                for l, positions in shard.per_class_items.items()}


    def admit(self, items):
        """Append uploaded items to the server dataset and mark them in the ledger.

        Arguments:
        items -- list of (client id, item position, class label)
        """
        for u, position, label in items:
            if u not in self.uploaded:
                raise RuntimeError('[client {}]: uploaded data without permission'.format(u))

            if self.uploaded[u][position]:
                raise RuntimeError('[client {}]: item [{}] uploaded twice'.format(u, position))

            self.uploaded[u][position] = True
            self.server_indices.append(int(self.environment.shards[u].indices[position]))
            self.server_counts[label] += 1


    def server_data(self):
        """Return (X, y) of the accumulated server dataset."""
        indices = numpy.asarray(self.server_indices, dtype=numpy.int64)
        train = self.environment.train
        return train.features[indices].reshape(len(indices), train.dim()), train.labels[indices]


    def uploaded_total(self):
        return int(self.server_counts.sum())


class round_record(object):
    """Outcome of one round."""
    def __init__(self,
                 index,
                 start,
                 end,
                 candidates,
                 selected,
                 manifest,
                 server_per_class,
                 accuracy,
                 cv,
                 estimated_finish=0.0,
                 upload_window=0.0):
        """Construct a round_record object.

        Arguments:
        index -- round index r (0-based)
        start -- clock at the start of the round in seconds
        end -- clock at the end of the round in seconds
        candidates -- ids of the clients asked for resources
        selected -- ordered ids of the clients which updated the model
        manifest -- uploaded data as a list of (client id, class label, count)
        server_per_class -- server dataset size per class after the round
        accuracy -- test accuracy of the global model after aggregation
        cv -- coefficient of variation of the cumulative N_r after the round
        estimated_finish -- estimated round finish from the plan
        upload_window -- data upload window t^UD of the plan
        """
        self.index = index
        self.start = start
        self.end = end
        self.candidates = list(candidates)
        self.selected = list(selected)
        self.manifest = list(manifest)
        self.server_per_class = [int(n) for n in server_per_class]
        self.accuracy = accuracy
        self.cv = cv
        self.estimated_finish = estimated_finish
        self.upload_window = upload_window


    def duration(self):
        return self.end - self.start


    def manifest_items(self):
        return sum(n for _, _, n in self.manifest)


    def unselected(self):
        chosen = set(self.selected)
        return [k for k in self.candidates if k not in chosen]


def estimated_timings(env, cfg, clients):
    """Return {client: client_timing} computed from the average resources."""
    epochs = cfg.hyper_params().epochs_per_round
    model_bytes = cfg.model['model_bytes']

    timings = dict()
    for k in clients:
        res = env.resources[k]
        timings[k] = scheduler.client_timing(
            netcomp.update_time(env.shards[k].size(), epochs, res.avg_capability),
            netcomp.upload_time(model_bytes, res.avg_throughput),
            res.avg_throughput)

    return timings


def realized_resources(env, cfg, rng, round_index, clients):
    """Return {client: (throughput, capability)} drawn around the averages for this round."""
    realized = dict()
    for k in clients:
        res = env.resources[k]
        g = rng.fluctuation(round_index, k)
        realized[k] = (netcomp.sample_round_value(res.avg_throughput, cfg.r_var, g),
                       netcomp.sample_round_value(res.avg_capability, cfg.r_var, g))

    return realized


def realized_duration(plan, env, cfg, realized):
    """Return the actual duration of a planned round under the realized resources.

    Model clients follow the planned order with realized times and stragglers finish. Data
    items share the channel after the distribution. Without model clients the round lasts
    at least T_round.

    Arguments:
    plan -- round_plan
    env -- environment
    cfg -- experiment_config
    realized -- {client: (throughput, capability)} for every client active this round
    """
    epochs = cfg.hyper_params().epochs_per_round
    model_bytes = cfg.model['model_bytes']

    timings = {k: scheduler.client_timing(
                   netcomp.update_time(env.shards[k].size(), epochs, realized[k][1]),
                   netcomp.upload_time(model_bytes, realized[k][0]),
                   realized[k][0])
               for k in plan.model_clients}

    schedule = scheduler.round_schedule(plan.model_clients, timings, model_bytes)

    data_end = schedule.dist_time + sum(netcomp.upload_time(plan.item_bytes, realized[u][0])
                                        for u, _, _ in plan.data_items)

    if plan.model_clients:
        return max(schedule.round_finish, data_end)

    return max(plan.deadline, data_end)


def upload_clients(state, cfg, candidates):
    """Return U, the permitted clients which may upload data this round."""
    permitted = state.environment.permitted

    if cfg.upload_candidates == 'requested':
        asked = set(candidates)
        permitted = [u for u in permitted if u in asked]

    return [u for u in permitted if state.holds_data(u)]


def run_round(state, cfg, rng):
    """Run one round of the protocol and return (state, round_record).

    Resource request, client selection, data selection, distribution, scheduled update and
    upload, server update and aggregation. The clock advances by the realized duration.

    Arguments:
    state -- simulation_state, updated in place
    cfg -- experiment_config
    rng -- random_streams of the trial
    """
    if state.clock >= cfg.T_final_seconds():
        raise RuntimeError('round [{}] would start at [{}] s, after the final deadline [{}] s'
                           .format(state.round_index, state.clock, cfg.T_final_seconds()))

    env = state.environment
    r = state.round_index
    policy = cfg.selection_policy()
    hp = cfg.hyper_params()
    deadline = cfg.T_round_seconds()
    protocol = cfg.protocol

    candidates = sorted(int(k) for k in rng.candidates(r).choice(
        cfg.K, size=candidate_count(cfg.K, cfg.C), replace=False))

    timings = estimated_timings(env, cfg, candidates)
    histograms = {k: env.histograms[k] for k in candidates}

    U = list()
    remaining_by_class = dict()
    remaining_in_order = dict()

    if policy.data_policy != 'none':
        U = upload_clients(state, cfg, candidates)

        if policy.data_policy == 'IID':
            remaining_by_class = {u: state.remaining_by_class(u) for u in U}
        else:
            remaining_in_order = {u: state.remaining_in_order(u) for u in U}

    plan = scheduler.plan_round(candidates,
                                policy,
                                deadline,
                                state.history,
                                timings,
                                histograms,
                                cfg.model['model_bytes'],
                                U,
                                remaining_by_class,
                                remaining_in_order,
                                {u: env.resources[u].avg_throughput for u in U},
                                cfg.item_bytes,
                                env.num_classes,
                                select_model=protocol != context.centralized(),
                                cv_definition=cfg.cv_definition)

    active = sorted(set(plan.model_clients) | set(u for u, _, _ in plan.data_items))
    duration = realized_duration(plan, env, cfg, realized_resources(env, cfg, rng, r, active))

    if duration <= 0:
        raise RuntimeError('round [{}] has non-positive duration [{}]'.format(r, duration))

    state.admit(plan.data_items)

    # Local updates start from the distributed model and are combined in client-id order.
    models = list()
    for k in sorted(plan.model_clients):
        X, y = env.shard_data(k)
        models.append(training.local_update(env.net, state.global_model, X, y, hp, r,
                                            rng.local_update(r, k)))

    if protocol != context.fedcs():
        X, y = state.server_data()
        server_model = training.server_update(env.net, state.global_model, X, y, hp, r,
                                              rng.server_update(r))
        if server_model.sample_weight > 0:
            models.append(server_model)

    if models:
        state.global_model = training.aggregate(models)

    accuracy, _ = training.evaluate(env.net, state.global_model, env.test.features, env.test.labels)

    for k in plan.model_clients:
        state.history = state.history + env.histograms[k]

    record = round_record(r,
                          state.clock,
                          state.clock + duration,
                          candidates,
                          plan.model_clients,
                          plan.data_manifest(),
                          state.server_counts,
                          accuracy,
                          scheduler.coefficient_of_variation(state.history, cfg.cv_definition),
                          plan.round_finish,
                          plan.upload_window)

    logging.info('round [{}] clock [{:.1f}] s selected [{}] uploaded [{}] accuracy [{:.4f}]'
                 .format(r, record.end, len(record.selected), record.manifest_items(), accuracy))

    state.clock = record.end
    state.round_index += 1

    return state, record


def window_accuracy(records, T_final, window):
    """Return the mean accuracy of the records ending at or after T_final - window.

    Arguments:
    records -- list of round_record
    T_final -- final deadline in seconds
    window -- summary window in seconds
    """
    accuracies = [rec.accuracy for rec in records if rec.end >= T_final - window]

    if not accuracies:
        return math.nan

    return float(numpy.mean(accuracies))


class experiment_result(object):
    """Trace and summary of one simulated method in one trial."""
    def __init__(self, method, trial, records, summary_accuracy, final_model, checkpoints):
        self.method = method
        self.trial = trial
        self.records = records
        self.summary_accuracy = summary_accuracy
        self.final_model = final_model
        self.checkpoints = checkpoints


    def final_accuracy(self):
        return self.records[-1].accuracy if self.records else math.nan


    def uploaded_total(self):
        return sum(rec.manifest_items() for rec in self.records)


def run_experiment(cfg, trial=0, data=None):
    """Simulate one method in one trial until the clock reaches T_final.

    Arguments:
    cfg -- experiment_config (the protocol and policy select the method)
    trial -- trial index, mixed into every random stream
    data -- standardized (train, test) pools; loaded from the configuration when None
    """
    if data is None:
        data = prepare_data(cfg)

    rng = random_streams(cfg.seeds, trial)
    env = environment(cfg, rng, *data)
    state = simulation_state(env, training.init_model(env.net, rng.init()))

    T_final = cfg.T_final_seconds()
    checkpoint_every = cfg.checkpoint_every

    records = list()
    checkpoints = list()

    while state.clock < T_final:
        state, record = run_round(state, cfg, rng)
        records.append(record)

        if checkpoint_every and state.round_index % checkpoint_every == 0:
            checkpoints.append((state.round_index, state.global_model.weights.copy()))

    summary = window_accuracy(records, T_final, cfg.summary_window_seconds())

    logging.warning('[{}] trial [{}]: [{}] rounds, window accuracy [{:.4f}]'
                    .format(cfg.method(), trial, len(records), summary))

    return experiment_result(cfg.method(), trial, records, summary, state.global_model, checkpoints)


def mean_and_std(values):
    """Return (mean, std) of `values`; the sample deviation is used for two or more values."""
    values = numpy.asarray(values, dtype=numpy.float64)

    if len(values) == 0:
        return math.nan, math.nan

    if len(values) == 1:
        return float(values[0]), 0.0

    return float(values.mean()), float(values.std(ddof=1))


def run_trials(cfg, data=None):
    """Run `cfg.trials` independently seeded trials in order and return their results."""
    if data is None:
        data = prepare_data(cfg)

    return [run_experiment(cfg, t, data) for t in range(cfg.trials)]
