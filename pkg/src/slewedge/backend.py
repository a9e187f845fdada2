"""Select the compiled kernel backend, falling back to pure numpy.

The environment variable SLEWEDGE_BACKEND forces the choice: "python" picks
the numpy reference implementation even when the extension is available;
"compiled" demands the extension and raises if it is missing. Anything else
(or unset) means: compiled if importable, else python.
"""

from __future__ import annotations

import os

from . import _reference

_forced = os.environ.get("SLEWEDGE_BACKEND", "").strip().lower()

_speedups = None
if _forced != "python":
    try:
        from . import _speedups  # type: ignore[no-redef]
    except ImportError:
        _speedups = None
        if _forced == "compiled":
            raise ImportError(
                "SLEWEDGE_BACKEND=compiled but the slewedge._speedups "
                "extension is not built; reinstall with a C compiler or "
                "unset the variable")

_impl = _speedups if _speedups is not None else _reference

HAVE_COMPILED = _speedups is not None
BACKEND = "compiled" if HAVE_COMPILED else "python"

TERM_TIME = _reference.TERM_TIME
TERM_RADIUS = _reference.TERM_RADIUS
TERM_HIT = _reference.TERM_HIT

MASK_FULL = _reference.MASK_FULL
MASK_HALF = _reference.MASK_HALF
MASK_QUARTER = _reference.MASK_QUARTER
MASK_DIAGONAL = _reference.MASK_DIAGONAL
MASK_OCTANT = _reference.MASK_OCTANT

# the site predicate is cheap bookkeeping; the kernels inline their own
mask_allows = _reference.mask_allows

loewner_trace = _impl.loewner_trace
bessel_driving = _impl.bessel_driving
welded_avoidance = _impl.welded_avoidance
saw_counts = _impl.saw_counts
pivot_run = _impl.pivot_run

# grid construction is cheap bookkeeping; only the reference implements it
pivot_grid = _reference.pivot_grid
