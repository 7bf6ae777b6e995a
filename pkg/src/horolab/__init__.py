"""horolab: arithmetic of low-lying horocycle pairs on the modular surface."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
