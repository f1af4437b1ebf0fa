# grown-up modules
import concurrent.futures
import logging
import multiprocessing
import queue
import time

# local modules
from . import trial_runner

class trial_manager(object):
    """A class that manages a list of trials and the `trial_runner`s executing them."""

    def __init__(self, tasks, workers=1, data=None):
        """Constructor for `trial_manager`.

        Arguments:
        tasks -- list of trial_runner.trial_task
        workers -- number of concurrent trial runners; more than one runs the trials in worker
                   processes
        data -- standardized (train, test) pools shared by every trial
        """
        if workers < 1:
            raise ValueError('workers must be at least 1 [{}]'.format(workers))

        self.tasks = list(tasks)
        self.data = data
        self.trial_runners = [trial_runner.trial_runner('worker-{}'.format(i), data)
                              for i in range(min(workers, max(1, len(self.tasks))))]
        self.duration = -1

        logging.debug('tasks:[{}], runners:[{}]'.format(len(self.tasks), len(self.trial_runners)))


    def __str__(self):
        return str([str(tr) for tr in self.trial_runners])


    def failed_trials(self):
        """Return the failed trial_tasks across the managed runners, ordered by key."""
        return sorted((t for tr in self.trial_runners for t, _ in tr.failed_trials()),
                      key=lambda t: t.key())


    def results(self):
        """Return {(point, method, trial): experiment_result} merged from every runner."""
        merged = dict()
        for tr in self.trial_runners:
            merged.update(tr.results)

        return {key: merged[key] for key in sorted(merged)}


    def return_code(self):
        """Return 0 if every trial_runner finished cleanly, otherwise 1."""
        return 0 if all(tr.rc == 0 for tr in self.trial_runners) else 1


    def result_string(self):
        """Return a string showing the trials that completed and failed on each runner."""
        r = '==== begin trial run results ====\n'
        for tr in self.trial_runners:
            r = r + tr.result_string()

        if self.return_code() != 0:
            r = r + 'List of failed trials:\n\t{}\n'.format(
                '\n\t'.join(str(t) for t in self.failed_trials()))
            r = r + 'Return code:[{}]\n'.format(self.return_code())

        elif len(self.results()) < len(self.tasks):
            r = r + 'Some trials did not run...\n'

        else:
            r = r + 'All trials completed.\n'

        if self.duration > 0:
            hours = int(self.duration / 60 / 60)
            minutes = self.duration / 60 - hours * 60
            r = r + 'time elapsed: [{:>9.4f}]seconds ([{:>4d}]hours [{:>7.4f}]minutes)\n'.format(
                    self.duration, hours, minutes)

        r = r + '==== end of trial run results ====\n'

        return r


    def run(self, fail_fast=False):
        """Run the managed `trial_runner`s in parallel until every task is taken.

        Each runner drains the shared queue from a thread. With more than one runner the trials
        themselves execute in a pool of spawned processes which receive the shared pools once.

        Arguments:
        fail_fast -- if True, the first failed trial ends the run
        """
        trial_queue = queue.Queue()
        for t in self.tasks:
            trial_queue.put(t)

        start_time = time.time()

        processes = None
        if len(self.trial_runners) > 1:
            processes = concurrent.futures.ProcessPoolExecutor(
                max_workers=len(self.trial_runners),
                mp_context=multiprocessing.get_context('spawn'),
                initializer=trial_runner.load_shared_data,
                initargs=(self.data,))

        try:
            self.run_threads(trial_queue, fail_fast, processes)

        finally:
            if processes is not None:
                processes.shutdown()

        self.duration = time.time() - start_time


    def run_threads(self, trial_queue, fail_fast, processes):
        """Run every trial_runner on its own thread and collect their return codes."""
        with concurrent.futures.ThreadPoolExecutor(max_workers=len(self.trial_runners)) as executor:
            futures_to_trial_runners = {
                executor.submit(tr.run, trial_queue, fail_fast, processes): tr
                for tr in self.trial_runners
            }

            for f in concurrent.futures.as_completed(futures_to_trial_runners):
                tr = futures_to_trial_runners[f]

                try:
                    f.result()

                    if tr.rc == 0:
                        logging.info('[{}]: trials completed successfully'.format(tr.name()))
                    else:
                        logging.error('[{}]: some trials failed'.format(tr.name()))

                except Exception as e:
                    logging.error('[{}]: exception raised while running trials'.format(tr.name()))
                    logging.error(e)

                    tr.rc = 1

                    if fail_fast:
                        # Drain the queue so the other runners stop after their current trial.
                        try:
                            while True:
                                trial_queue.get(block=False)
                                trial_queue.task_done()
                        except queue.Empty:
                            pass
