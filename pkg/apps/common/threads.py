"""
BLAS thread limits.

Must run before numpy is first imported; the libraries read these variables
once when they load.
"""
import os

THREAD_VARIABLES = ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS')
SINGLE_LANE_COMMANDS = ('stream',)


def pin_single_thread(environ=os.environ):
    for name in THREAD_VARIABLES:
        environ.setdefault(name, '1')


def pin_for_command(argv, environ=os.environ):
    """Pin BLAS to one thread when ``argv`` runs a timing-sensitive command."""
    if len(argv) > 1 and argv[1] in SINGLE_LANE_COMMANDS:
        pin_single_thread(environ)
        return True
    return False
