"""JIT switch.

Kernels are decorated with :func:`njit` from this module.  Setting the
environment variable ``BJFRONT_NO_JIT=1`` (or running without numba
installed) turns the decorator into the identity, so the same source runs
as plain Python/numpy.
"""
import os

HAS_NUMBA = False
if os.environ.get("BJFRONT_NO_JIT", "0") not in ("1", "true", "yes"):
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover
        HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA


def njit(*args, **kwargs):
    if JIT_ENABLED:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(fn):
        return fn

    return deco
