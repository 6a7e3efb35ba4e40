"""Backend switch for the hot kernels.

Every kernel in ``_kernels`` ships in two builds: an ``@njit`` build and a
pure-numpy build. Selection happens once, at import:

  * ``MCSCREEN_NUMBA=0`` (also ``false``/``no``/``off``) forces the numpy path;
  * otherwise numba is used whenever it can be imported.

``backend()`` reports which path is live so benchmark output and diagnostics
can record it.
"""

import os

_flag = os.environ.get("MCSCREEN_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "no", "off")

NUMBA_ENABLED = False
if NUMBA_REQUESTED:
    try:
        from numba import njit  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
