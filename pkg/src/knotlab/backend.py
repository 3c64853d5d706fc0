"""Kernel backend selection: compiled extension if available, pure Python otherwise.

Set ``KNOTLAB_PURE=1`` to force the pure-Python kernels (useful for debugging
and for the benchmark comparison in ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

if os.environ.get("KNOTLAB_PURE") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

KERNEL_KIND: str = kernels.KERNEL_KIND

eval_terms = kernels.eval_terms
bracket_tally = kernels.bracket_tally
bareiss_det_int64 = kernels.bareiss_det_int64
det_mod = kernels.det_mod
