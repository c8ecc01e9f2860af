"""Kernel backend selection.

Imports the compiled Cython kernels when the extension was built, otherwise
the NumPy fallback.  Set ``KMSPLIT_PURE_PYTHON=1`` in the environment to
force the fallback (useful for benchmarking and debugging).
"""

import os

if os.environ.get("KMSPLIT_PURE_PYTHON"):
    from . import _kernels_np as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_np as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND


def backend_name():
    """Name of the kernel implementation in use ('cython' or 'numpy')."""
    return BACKEND
