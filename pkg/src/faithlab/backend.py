"""Kernel backend selection.

Loop-heavy kernels (strided convolutions, segmentation merging, rasterization)
have two implementations: numba ``@njit`` and pure numpy. The active one is
chosen once at import time from the ``LAB_BACKEND`` environment variable:

    LAB_BACKEND=numba   use JIT kernels (default when numba imports cleanly)
    LAB_BACKEND=numpy   force the pure-numpy fallback

Dense contractions (Linear layers, 1x1 convolutions) always go through BLAS
via ``numpy.matmul`` on both backends; a JIT loop cannot beat it there.

``LAB_THREADS`` bounds both the numba thread pool and the CLI worker pool.
JIT kernels parallelize only over independent output rows, so results are
bit-identical for any thread count.
"""

import os

_FORCED = os.environ.get("LAB_BACKEND", "").strip().lower()

if _FORCED not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"LAB_BACKEND={_FORCED!r} not understood; use 'numba' or 'numpy'"
    )

if _FORCED == "numpy":
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _FORCED == "numba":
            raise
        HAVE_NUMBA = False

ACTIVE = "numba" if HAVE_NUMBA else "numpy"


def thread_limit() -> int:
    """Worker count from LAB_THREADS, defaulting to the CPU count."""
    raw = os.environ.get("LAB_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


if HAVE_NUMBA and os.environ.get("LAB_THREADS", "").strip():
    import numba

    numba.set_num_threads(thread_limit())
