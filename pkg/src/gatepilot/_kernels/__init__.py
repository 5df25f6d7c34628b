"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; the pure
python module is a drop-in replacement producing bit-identical results.
Set the environment variable GATEPILOT_PURE to a truthy value ("1",
"true", "yes") to force the fallback, e.g. for benchmarking or debugging.

Exposes: BACKEND ("native" or "python"), rgb_to_ycbcr, color_mask,
search_vertical, search_horizontal, patch_centroid, edge_fitness,
column_counts, raycast_gates, SPACE_RGB, SPACE_YCBCR.
"""

import os

from .pyfallback import SPACE_RGB, SPACE_YCBCR

_force_pure = os.environ.get("GATEPILOT_PURE", "").lower() in ("1", "true", "yes")

if not _force_pure:
    try:
        from . import _native as _impl
        BACKEND = "native"
    except ImportError:
        from . import pyfallback as _impl
        BACKEND = "python"
else:
    from . import pyfallback as _impl
    BACKEND = "python"

rgb_to_ycbcr = _impl.rgb_to_ycbcr
color_mask = _impl.color_mask
search_vertical = _impl.search_vertical
search_horizontal = _impl.search_horizontal
patch_centroid = _impl.patch_centroid
edge_fitness = _impl.edge_fitness
column_counts = _impl.column_counts
raycast_gates = _impl.raycast_gates
