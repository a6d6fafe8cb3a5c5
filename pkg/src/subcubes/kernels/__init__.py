"""Hot-kernel backend selection.

Prefers the compiled Cython core; falls back to the numpy implementation
when the extension is not built. Both backends produce bit-identical
trajectories from the same random streams. Set SUBCUBES_FORCE_FALLBACK=1
to force the pure-Python path.
"""

import os

if os.environ.get("SUBCUBES_FORCE_FALLBACK"):
    from . import _fallback as _impl
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _fallback as _impl
        BACKEND = "python"

energy_of = _impl.energy_of
argmin_valley = _impl.argmin_valley
in_any_cluster = _impl.in_any_cluster
metropolis_chunk = _impl.metropolis_chunk
walk_chunk = _impl.walk_chunk

__all__ = ["BACKEND", "energy_of", "argmin_valley", "in_any_cluster",
           "metropolis_chunk", "walk_chunk"]
