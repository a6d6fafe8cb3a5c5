"""Random-subcube solution spaces: phase analytics, explicit instances with
exact counting, decimation and walk dynamics, and an energetic landscape."""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
