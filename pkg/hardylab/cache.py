import functools
import hashlib
import logging

from django.core.cache import cache as default_cache
from django.core.cache import caches
from django.core.cache.backends.base import InvalidCacheBackendError
from django.utils import encoding

from hardylab import config

# Look for an own cache first before falling back to the default cache
try:
    cache = caches["hardylab"]
except (InvalidCacheBackendError, ValueError):
    cache = default_cache

log = logging.getLogger("hardylab.cache")


def make_key(k):
    """Generate the full key for ``k``, with a prefix."""
    key = encoding.smart_bytes("%s:%s" % (config.CACHE_PREFIX, k))
    return hashlib.md5(key).hexdigest()


def cached(function, key_, timeout=None):
    """Only calls the function if ``key_`` is not already in the cache."""
    if timeout is None:
        timeout = config.CACHE_TIMEOUT
    if timeout == config.NO_CACHE:
        return function()
    key = make_key(key_)
    val = cache.get(key)
    if val is None:
        log.debug("cache miss for %s" % key_)
        val = function()
        cache.set(key, val, timeout)
    else:
        log.debug("cache hit for %s" % key_)
    return val


def numerical_guard(return_type):
    """
    Decorator to catch and log numerical failures.

    return_type (optionally a callable) will be returned if there is an error.
    """

    def decorator(f):
        @functools.wraps(f)
        def wrapper(*args, **kw):
            try:
                return f(*args, **kw)
            except ArithmeticError as e:
                log.error("numerical error in %s: %s" % (f.__name__, e))
                if hasattr(return_type, "__call__"):
                    return return_type()
                else:
                    return return_type

        return wrapper

    return decorator
