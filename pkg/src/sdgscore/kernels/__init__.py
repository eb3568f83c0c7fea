"""Kernel backend selection.

The compiled extension is preferred when importable; setting the
environment variable ``SDGSCORE_PURE=1`` forces the pure-Python fallback.
Both backends are bit-identical, so the choice never changes results.
"""

import os

from . import pure

if os.environ.get("SDGSCORE_PURE", "") == "1":
    _impl = pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
bfs_bounded = _impl.bfs_bounded
best_split = _impl.best_split

__all__ = ["BACKEND", "bfs_bounded", "best_split", "pure"]
