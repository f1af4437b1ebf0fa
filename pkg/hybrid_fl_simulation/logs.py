# grown-up modules
import logging
import os
import sys

def configure(verbosity=1, log_filename=None):
    """Configure the root logger for a simulation script.

    CRITICAL messages will always be printed, but anything after that is a function of the
    number of -v given on the command line.

    Arguments:
    verbosity -- number of -v flags (default: 1, which shows ERROR and CRITICAL)
    log_filename -- optional path to a file which receives the same messages as stdout
    """
    level = logging.CRITICAL - 10 * verbosity

    handlers = [logging.StreamHandler(sys.stdout)]

    if log_filename:
        handlers.append(logging.FileHandler(os.path.abspath(log_filename)))

    logging.basicConfig(
        level = level if level > logging.NOTSET else logging.DEBUG,
        format = '%(asctime)-15s - %(message)s',
        handlers = handlers,
        force = True
    )
