"""Backend selection for the scan kernels.

The compiled extension is preferred when present; setting the
environment variable ``BOUNDARYLAB_PURE_PYTHON=1`` forces the numpy
fallback (used by the benchmark and the backend-equality tests).  Both
backends are bit-identical by contract.
"""

import os

from . import _scan_py

if os.environ.get("BOUNDARYLAB_PURE_PYTHON", "") == "1":
    _impl = _scan_py
else:
    try:
        from . import _scan as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _scan_py

BACKEND = _impl.BACKEND

failure_run_stop = _impl.failure_run_stop
cross_times = _impl.cross_times
stop_times = _impl.stop_times

__all__ = ["BACKEND", "failure_run_stop", "cross_times", "stop_times"]
