"""Hot-path kernels with a compiled core and a pure-Python fallback.

The compiled extension (Cython) is preferred when importable; set
``FINTXN_PURE_PYTHON=1`` to force the fallback. ``IMPLEMENTATION`` reports
which one is active. Both implementations are kept behaviourally identical
and are cross-checked by the test suite; ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("FINTXN_PURE_PYTHON"):
    _impl = _pure
    IMPLEMENTATION = "pure-python (forced)"
else:
    try:
        from . import _hot as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "compiled"
    except ImportError:
        _impl = _pure
        IMPLEMENTATION = "pure-python"

window_bounds = _impl.window_bounds
truncate_topk = _impl.truncate_topk
agg_amount_gt = _impl.agg_amount_gt
select_amount_gt = _impl.select_amount_gt

USING_COMPILED = IMPLEMENTATION == "compiled"

__all__ = [
    "IMPLEMENTATION",
    "USING_COMPILED",
    "window_bounds",
    "truncate_topk",
    "agg_amount_gt",
    "select_amount_gt",
]
