# grown-up modules
import logging
import queue
import time

# local modules
from . import engine

# (train, test) pools of a worker process; set once per process by load_shared_data.
shared_data = None

def load_shared_data(data):
    """Keep the (train, test) pools in this worker process for every trial it runs."""
    global shared_data
    shared_data = data


def run_trial(cfg, trial):
    """Run one trial in a worker process on the pools set by `load_shared_data`."""
    return engine.run_experiment(cfg, trial, shared_data)


class trial_task(object):
    """One unit of work: a method simulated in one trial of one sweep point."""
    def __init__(self, point, value, method, trial, cfg):
        """Construct a trial_task object.

        Arguments:
        point -- index of the sweep point (0 for a single configuration)
        value -- value of the sweep axis at this point, or None
        method -- method name
        trial -- trial index
        cfg -- experiment_config already resolved for `method`
        """
        self.point = point
        self.value = value
        self.method = method
        self.trial = trial
        self.cfg = cfg


    def key(self):
        """Return the (point, method, trial) key used to order merged results."""
        return (self.point, self.method, self.trial)


    def __str__(self):
        return 'point [{}] method [{}] trial [{}]'.format(self.point, self.method, self.trial)


class trial_runner(object):
    """A class that drains trials from a shared queue and keeps their results."""

    def __init__(self, name, data=None):
        """Constructor for `trial_runner`.

        Arguments:
        name -- name of the runner used in log messages
        data -- standardized (train, test) pools shared by every trial, or None to load per trial
        """
        self.runner_name = name
        self.data = data
        self.tasks = list()
        self.rc = 0

        # Lists of (task, duration) rather than dicts so the same key can run twice.
        self.passed = list()
        self.failed = list()

        self.results = dict()

        # -1 means nothing has run yet.
        self.duration = -1


    def __str__(self):
        return str({
            'runner': self.name(),
            'return_code': self.rc,
            'tasks': [str(t) for t in self.tasks],
            'passed_trials': [str(t) for t, _ in self.passed],
            'failed_trials': [str(t) for t, _ in self.failed],
            'duration': self.duration
        })


    def name(self):
        return self.runner_name


    def passed_trials(self):
        return self.passed


    def failed_trials(self):
        return self.failed


    def result_string(self):
        """Return a string representing the results of the trials run by this runner."""
        r = '-----\nresults for [{}]\n'.format(self.name())

        r = r + '\tcompleted trials:\n'
        for task, duration in self.passed_trials():
            r = r + '\t\t[[{:>9.4f}]s]\t[{}]\n'.format(duration, task)

        r = r + '\tfailed trials:\n'
        for task, duration in self.failed_trials():
            r = r + '\t\t[[{:>9.4f}]s]\t[{}]\n'.format(duration, task)

        r = r + '\treturn code:[{}]\n'.format(self.rc)

        if self.duration > 0:
            r = r + '\ttime elapsed: [{:9.4f}]seconds\n'.format(self.duration)

        r = r + '-----\n'

        return r


    def run(self, trial_queue, fail_fast=False, processes=None):
        """Execute trials from `trial_queue` until it is empty.

        Arguments:
        trial_queue -- the `Queue` of trial_task shared by the `trial_runner`s
        fail_fast -- if True, the first failed trial ends the run
        processes -- ProcessPoolExecutor running the trials, or None to run them in this thread
        """
        run_start = time.time()

        try:
            while True:
                # Queue.get raises queue.Empty when nothing is left.
                task = trial_queue.get(block=False)
                self.tasks.append(task)

                logging.warning('[{}]: running [{}]'.format(self.name(), task))

                start = time.time()

                try:
                    self.results[task.key()] = self.execute_trial(task, processes)
                    error = None

                except Exception as e:
                    error = e

                duration = time.time() - start

                trial_queue.task_done()

                if error is None:
                    self.passed_trials().append((task, duration))
                    logging.error('[{}]: trial completed [[{:>9.4f}]s] [{}]'
                                  .format(self.name(), duration, task))

                else:
                    self.rc = 1
                    self.failed_trials().append((task, duration))
                    logging.error('[{}]: trial failed [[{:>9.4f}]s] [{}] [{}]'
                                  .format(self.name(), duration, task, error))

                    if fail_fast:
                        raise RuntimeError('[{}]: trial failed [{}]'.format(self.name(), task)) from error

        except queue.Empty:
            logging.info('[{}]: queue is empty'.format(self.name()))

        self.duration = time.time() - run_start

        if self.rc != 0:
            logging.error('[{}]: trials that failed [{}]'
                          .format(self.name(), [str(t) for t, _ in self.failed_trials()]))


    def execute_trial(self, task, processes=None):
        """Run `task` and return its engine.experiment_result."""
        if processes is None:
            return engine.run_experiment(task.cfg, task.trial, self.data)

        return processes.submit(run_trial, task.cfg, task.trial).result()
