"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback.  ``ZPC_BACKEND=python`` forces the fallback and
``ZPC_BACKEND=cython`` makes a missing extension an error.
"""
import os

_choice = os.environ.get("ZPC_BACKEND", "").strip().lower()

if _choice == "python":
    from . import _pykernels as kernels
    NAME = "python"
else:
    try:
        from . import _ckernels as kernels
        NAME = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        from . import _pykernels as kernels
        NAME = "python"

__all__ = ["kernels", "NAME"]
