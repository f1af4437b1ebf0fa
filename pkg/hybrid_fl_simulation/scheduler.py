# grown-up modules
import collections
import logging
import math

import numpy

# local modules
from . import netcomp

class selection_policy(object):
    """Class holding the client-selection and data-selection policies of a method."""
    def __init__(self, client_policy='maxClient', data_policy='none'):
        """Construct a selection_policy object.

        Arguments:
        client_policy -- 'maxClient' (f = t_inc) or 'minCV' (f = t_inc * CV)
        data_policy -- 'maxThroughput', 'IID', or 'none' (FedCS)
        """
        if client_policy not in ['maxClient', 'minCV']:
            raise ValueError('unknown client policy [{}]'.format(client_policy))

        if data_policy not in ['maxThroughput', 'IID', 'none']:
            raise ValueError('unknown data policy [{}]'.format(data_policy))

        self.client_policy = client_policy
        self.data_policy = data_policy


    def __repr__(self):
        return 'selection_policy(client_policy={}, data_policy={})'.format(
            self.client_policy, self.data_policy)


class client_timing(object):
    """Estimated per-round times of one candidate client."""
    def __init__(self, update, upload, throughput):
        """Construct a client_timing object.

        Arguments:
        update -- local model update time in seconds
        upload -- model upload time in seconds
        throughput -- throughput in bit/s (used for the multicast distribution time)
        """
        self.update = float(update)
        self.upload = float(upload)
        self.throughput = float(throughput)


    def __repr__(self):
        return 'client_timing(update={:.3f}, upload={:.3f}, throughput={:.1f})'.format(
            self.update, self.upload, self.throughput)


class round_schedule(object):
    """Serialized-upload schedule of an ordered list of model clients.

    Local updates run in parallel after the distribution; uploads share the channel in the
    given order:
        finish_0 = dist
        start_i = max(finish_{i-1}, dist + update_i)
        finish_i = start_i + upload_i
    The distribution time is either fixed or derived from the slowest member's throughput.
    """
    def __init__(self, order, timings, model_bytes=0, dist_time=None):
        """Construct a round_schedule object.

        Arguments:
        order -- ordered list of client ids
        timings -- mapping of client id to client_timing
        model_bytes -- model payload in bytes (used when `dist_time` is None)
        dist_time -- fixed distribution time in seconds, or None to derive it from `order`
        """
        self.order = list(order)
        self.timings = timings
        self.model_bytes = model_bytes
        self.fixed_dist_time = dist_time

        self.dist_time = self._dist_time_for(self.order)
        self.starts, self.finishes, self.round_finish = self._recurrence(self.order, self.dist_time)


    def _dist_time_for(self, order):
        if self.fixed_dist_time is not None:
            return float(self.fixed_dist_time)

        return netcomp.dist_time(self.model_bytes, [self.timings[k].throughput for k in order])


    def _recurrence(self, order, dist):
        starts = list()
        finishes = list()
        previous = dist

        for k in order:
            t = self.timings[k]
            start = max(previous, dist + t.update)
            previous = start + t.upload
            starts.append(start)
            finishes.append(previous)

        return starts, finishes, previous


    def finish_if_appended(self, k):
        """Return the round finish time if client `k` were appended to the order."""
        dist = self._dist_time_for(self.order + [k])

        if dist != self.dist_time:
            return self._recurrence(self.order + [k], dist)[2]

        t = self.timings[k]
        return max(self.round_finish, dist + t.update) + t.upload


    def appended(self, k):
        """Return a new round_schedule with client `k` appended."""
        return round_schedule(self.order + [k], self.timings, self.model_bytes, self.fixed_dist_time)


class round_plan(object):
    """Output of the Client and Data Selection step."""
    def __init__(self,
                 model_clients,
                 upload_start,
                 upload_finish,
                 round_finish,
                 dist_time,
                 deadline,
                 upload_window=0.0,
                 data_items=None,
                 data_time=0.0,
                 item_bytes=0):
        """Construct a round_plan object.

        Arguments:
        model_clients -- ordered list S of clients selected to update the model
        upload_start -- mapping of client id to its estimated model upload start time
        upload_finish -- mapping of client id to its estimated model upload finish time
        round_finish -- estimated finish time of the round
        dist_time -- estimated distribution time
        deadline -- T_round used when planning
        upload_window -- data upload window t^UD in seconds
        data_items -- list of (client id, item position, class label) to upload, in order
        data_time -- estimated time to upload `data_items`
        item_bytes -- payload of one data item in bytes
        """
        self.model_clients = list(model_clients)
        self.upload_start = dict(upload_start)
        self.upload_finish = dict(upload_finish)
        self.round_finish = round_finish
        self.dist_time = dist_time
        self.deadline = deadline
        self.upload_window = upload_window
        self.data_items = list(data_items or [])
        self.data_time = data_time
        self.item_bytes = item_bytes


    def data_manifest(self):
        """Return D^UL as a list of (client id, class label, item count)."""
        counts = collections.Counter((c, l) for c, _, l in self.data_items)
        return [(c, l, n) for (c, l), n in sorted(counts.items())]


    def estimated_data_bytes(self):
        return len(self.data_items) * self.item_bytes


def schedule_plan(schedule, deadline):
    """Return a round_plan without data selection from a round_schedule."""
    return round_plan(schedule.order,
                      dict(zip(schedule.order, schedule.starts)),
                      dict(zip(schedule.order, schedule.finishes)),
                      schedule.round_finish,
                      schedule.dist_time,
                      deadline)


def coefficient_of_variation(N, definition='printed'):
    """Return the data-bias score of a class histogram.

    The printed definition is the variance of the counts over their mean,
    (sum_l (n_l - n_mean)^2 / L) / n_mean; the standard definition is std / mean. An all-zero
    histogram scores math.inf so that any candidate adding data is preferred.

    Arguments:
    N -- class_histogram or sequence of per-class counts
    definition -- 'printed' or 'standard'
    """
    counts = numpy.asarray(getattr(N, 'counts', N), dtype=numpy.float64)

    mean = counts.mean()
    if mean <= 0:
        return math.inf

    variance = ((counts - mean) ** 2).sum() / len(counts)

    if definition == 'printed':
        return float(variance / mean)

    if definition == 'standard':
        return float(math.sqrt(variance) / mean)

    raise ValueError('unknown CV definition [{}]'.format(definition))


def estimate_round_schedule(S, timings, model_bytes=0, dist_time=None):
    """Return (per-client {id: (start, finish)}, round_finish) for the ordered clients `S`.

    Arguments:
    S -- ordered list of client ids
    timings -- mapping of client id to client_timing
    model_bytes -- model payload in bytes (used when `dist_time` is None)
    dist_time -- fixed distribution time in seconds, or None to derive it from `S`
    """
    schedule = round_schedule(S, timings, model_bytes, dist_time)

    return ({k: (s, f) for k, s, f in zip(schedule.order, schedule.starts, schedule.finishes)},
            schedule.round_finish)


def t_inc(S, k, timings, model_bytes=0, dist_time=None):
    """Return how much the estimated round extends when `k` is appended to `S`.

    Arguments:
    S -- ordered list of client ids
    k -- candidate client id
    timings -- mapping of client id to client_timing
    model_bytes -- model payload in bytes (used when `dist_time` is None)
    dist_time -- fixed distribution time in seconds, or None to derive it from the clients
    """
    schedule = round_schedule(S, timings, model_bytes, dist_time)
    return schedule.finish_if_appended(k) - schedule.round_finish


def select_model_clients(candidates,
                         policy,
                         deadline,
                         history,
                         timings,
                         histograms=None,
                         model_bytes=0,
                         dist_time=None,
                         cv_definition='printed'):
    """Greedily select the clients which update the model this round and return them in order.

    Repeatedly pick x = argmin f(S, k) over the remaining candidates, remove it, and admit it
    only if t + t_inc(S, x) < deadline. maxClient uses f = t_inc; minCV uses
    f = t_inc * CV(N + histogram of k), where N accumulates the histograms of the clients
    selected so far (including earlier rounds). Ties go to the lowest client id.

    Arguments:
    candidates -- ids of the clients that answered the resource request (K')
    policy -- selection_policy
    deadline -- T_round in seconds
    history -- class_histogram N of the clients selected in earlier rounds (minCV only)
    timings -- mapping of client id to client_timing
    histograms -- mapping of client id to class_histogram (minCV only)
    model_bytes -- model payload in bytes (used when `dist_time` is None)
    dist_time -- fixed distribution time, or None to derive it from the selected clients
    cv_definition -- 'printed' or 'standard'
    """
    use_cv = policy.client_policy == 'minCV'

    if use_cv and histograms is None:
        raise ValueError('minCV selection requires client histograms')

    remaining = sorted(candidates)
    schedule = round_schedule([], timings, model_bytes, dist_time)
    t = schedule.round_finish
    N = history

    if t >= deadline:
        logging.warning('distribution time [{}] does not fit the round deadline [{}]'
                        .format(t, deadline))

    while remaining:
        best, best_f, best_inc = None, None, None

        for k in remaining:
            inc = schedule.finish_if_appended(k) - schedule.round_finish

            if use_cv:
                cv = coefficient_of_variation(N + histograms[k], cv_definition)
                f = math.inf if math.isinf(cv) else inc * cv
            else:
                f = inc

            if best_f is None or f < best_f:
                best, best_f, best_inc = k, f, inc

        remaining.remove(best)

        t_candidate = t + best_inc
        if t_candidate < deadline:
            t = t_candidate
            schedule = schedule.appended(best)
            if use_cv:
                N = N + histograms[best]

            logging.debug('admitted client [{}] f [{}] t [{}]'.format(best, best_f, t))

        else:
            logging.debug('rejected client [{}] f [{}] t [{}]'.format(best, best_f, t_candidate))

    return schedule.order


def compute_upload_window(plan):
    """Return t^UD, the time between the end of distribution and the first model upload.

    With no model clients, data may be uploaded for the whole remainder of the round,
    T_round - dist_time.

    Arguments:
    plan -- round_plan
    """
    if not plan.model_clients:
        return max(0.0, plan.deadline - plan.dist_time)

    return max(0.0, min(plan.upload_start.values()) - plan.dist_time)


def select_upload_data_iid(t_UD, U, remaining, throughputs, item_bytes, num_classes):
    """Select data items class by class so the server receives balanced classes.

    For l = 1..L in turn, the first remaining item of class l is taken from the permitted
    client with the highest average throughput that still holds class l, and admitted if the
    cumulative serialized upload time stays within t^UD. The passes repeat until an item
    does not fit or every permitted client is exhausted; the pass in progress completes.

    Arguments:
    t_UD -- upload window in seconds
    U -- ids of the permitted clients
    remaining -- mapping of client id to {class label: ordered item positions not yet uploaded}
    throughputs -- mapping of client id to average throughput in bit/s
    item_bytes -- payload of one item in bytes
    num_classes -- number of classes L

    Returns (items, elapsed) where items is a list of (client id, item position, class label).
    """
    queues = {u: {l: collections.deque(items) for l, items in remaining.get(u, {}).items()}
              for u in U}
    left = sum(len(q) for u in queues for q in queues[u].values())

    items = list()
    elapsed = 0.0
    flag = left > 0

    while flag:
        for l in range(num_classes):
            owners = [u for u in sorted(queues) if queues[u].get(l)]

            if owners:
                # Highest throughput first; the lowest id wins ties.
                x = max(owners, key=lambda u: (throughputs[u], -u))
                d = queues[x][l][0]
                cost = elapsed + netcomp.upload_time(item_bytes, throughputs[x])

                if cost <= t_UD:
                    items.append((x, int(d), l))
                    queues[x][l].popleft()
                    elapsed = cost
                    left -= 1

                if cost > t_UD:
                    flag = False

            if left == 0:
                flag = False

    return items, elapsed


def select_upload_data_max_throughput(t_UD, U, remaining, throughputs, item_bytes):
    """Select data items from the fastest permitted clients first, ignoring classes.

    Clients are visited by descending average throughput (lowest id on ties) and their
    remaining items taken in stable order until the next item would exceed t^UD.

    Arguments:
    t_UD -- upload window in seconds
    U -- ids of the permitted clients
    remaining -- mapping of client id to ordered list of (item position, class label)
    throughputs -- mapping of client id to average throughput in bit/s
    item_bytes -- payload of one item in bytes

    Returns (items, elapsed) where items is a list of (client id, item position, class label).
    """
    items = list()
    elapsed = 0.0

    for u in sorted(U, key=lambda u: (-throughputs[u], u)):
        duration = netcomp.upload_time(item_bytes, throughputs[u])

        for position, label in remaining.get(u, []):
            if elapsed + duration > t_UD:
                return items, elapsed

            items.append((u, int(position), int(label)))
            elapsed += duration

    return items, elapsed


def plan_round(candidates,
               policy,
               deadline,
               history,
               timings,
               histograms,
               model_bytes,
               permitted,
               remaining_by_class,
               remaining_in_order,
               throughputs,
               item_bytes,
               num_classes,
               select_model=True,
               cv_definition='printed'):
    """Run client selection, compute the upload window, run data selection; return a round_plan.

    Arguments:
    candidates -- ids of the clients that answered the resource request
    policy -- selection_policy
    deadline -- T_round in seconds
    history -- class_histogram of the clients selected in earlier rounds
    timings -- mapping of client id to client_timing for the candidates
    histograms -- mapping of client id to class_histogram for the candidates
    model_bytes -- model payload in bytes
    permitted -- ids of the clients which may upload data and still hold data (U)
    remaining_by_class -- per permitted client, {class: ordered remaining positions}
    remaining_in_order -- per permitted client, ordered list of (position, class)
    throughputs -- mapping of permitted client id to average throughput
    item_bytes -- payload of one data item in bytes
    num_classes -- number of classes L
    select_model -- False plans a round without model clients (centralized training)
    cv_definition -- 'printed' or 'standard'
    """
    if select_model:
        S = select_model_clients(candidates,
                                 policy,
                                 deadline,
                                 history,
                                 timings,
                                 histograms,
                                 model_bytes=model_bytes,
                                 cv_definition=cv_definition)
    else:
        S = []

    plan = schedule_plan(round_schedule(S, timings, model_bytes), deadline)

    if policy.data_policy == 'none':
        return plan

    plan.upload_window = compute_upload_window(plan)
    plan.item_bytes = item_bytes

    if policy.data_policy == 'IID':
        plan.data_items, plan.data_time = select_upload_data_iid(plan.upload_window,
                                                                 permitted,
                                                                 remaining_by_class,
                                                                 throughputs,
                                                                 item_bytes,
                                                                 num_classes)
    else:
        plan.data_items, plan.data_time = select_upload_data_max_throughput(plan.upload_window,
                                                                            permitted,
                                                                            remaining_in_order,
                                                                            throughputs,
                                                                            item_bytes)

    return plan
