"""Backend selection for the hot per-sample kernels.

Prefers the compiled extension when it was built; falls back to the NumPy
implementation otherwise.  Set TRIMEDGE_PURE_PYTHON=1 to force the fallback
(used by the benchmark and for debugging).  Both backends implement the same
contract and are cross-checked in the test suite.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TRIMEDGE_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

batch_trimmed_mean = _impl.batch_trimmed_mean
batch_plugin_moments = _impl.batch_plugin_moments
batch_density_counts = _impl.batch_density_counts
step_sup_distance = _impl.step_sup_distance
