"""Hot numerical kernels with an optional compiled fast path.

The Cython extension is selected at import when it has been built; otherwise
the NumPy fallback is used. Setting the environment variable
``SPLINTERSECT_PURE=1`` forces the fallback (useful for benchmarking the two
backends against each other, see ``benchmarks/backend_bench.py``).
"""

import os

from . import fallback

if os.environ.get("SPLINTERSECT_PURE"):
    _impl = fallback
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = fallback

BACKEND = "numpy" if _impl is fallback else "cython"

support_heights = _impl.support_heights
decasteljau_split = _impl.decasteljau_split
segment_triangle_intersect = _impl.segment_triangle_intersect
