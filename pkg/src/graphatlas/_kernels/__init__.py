"""Hot-kernel backend selection.

The numba backend is used when available; set ``GRAPHATLAS_NUMBA=0`` to
force the pure numpy fallback.  Both backends expose the same functions
with identical semantics.
"""

from __future__ import annotations

import os

from . import numpy_impl

_flag = os.environ.get("GRAPHATLAS_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

if _want_numba:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        _impl = numpy_impl
        BACKEND = "numpy"
else:
    _impl = numpy_impl
    BACKEND = "numpy"

settle_shortest_paths = _impl.settle_shortest_paths
stamp_disk = _impl.stamp_disk
stamp_capsule = _impl.stamp_capsule
find_free_pixel = _impl.find_free_pixel
count_seg_tiles = _impl.count_seg_tiles
count_disk_tiles = _impl.count_disk_tiles
seg_rect_scalar = _impl._seg_rect
