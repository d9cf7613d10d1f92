"""Worker-count control.

Kernels split their work into ``chunks()`` independent pieces and reduce the
results in a fixed order, so output never depends on the thread count.
"""

import os

import numba

from imkit.errors import ValidationError

ENV_VAR = "IMKIT_THREADS"

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the default probe warns about old TBB builds; chunks never nest
    numba.config.THREADING_LAYER = "workqueue"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return numba.config.NUMBA_NUM_THREADS
    try:
        count = int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if count < 1:
        raise ValidationError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return count


def chunks() -> int:
    """Number of work chunks; also caps the numba thread pool."""
    count = worker_count()
    numba.set_num_threads(max(1, min(count, numba.config.NUMBA_NUM_THREADS)))
    return count
