import functools
import logging

__all__ = ['timeit']

logger = logging.getLogger(__name__)


def timeit(method):
    """
    Decorator. Logs how long a method took to execute in seconds.

    :param method: Method to measure and log execution time for.
    """
    import time

    @functools.wraps(method)
    def timed(*args, **kw):
        start = time.perf_counter()
        result = method(*args, **kw)
        end = time.perf_counter()
        logger.info("%s took %.3f seconds.", method.__name__, end - start)
        return result

    return timed
