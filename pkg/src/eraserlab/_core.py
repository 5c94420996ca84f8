"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy twin in ``_kernels_py`` is used. Set ``ERASERLAB_PURE_PYTHON=1`` to
force the fallback.
"""
import os

if os.environ.get("ERASERLAB_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND

enumerate_paths = kernels.enumerate_paths
sample_paths = kernels.sample_paths
spinlabor_counts = kernels.spinlabor_counts
bernoulli_pmf = kernels.bernoulli_pmf
