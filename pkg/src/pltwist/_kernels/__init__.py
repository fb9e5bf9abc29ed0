"""Kernel backend selection.

The compiled extension (``core_cy``) is preferred when it was built;
``PLTWIST_PURE=1`` in the environment forces the pure-Python twin.
Both expose the same functions over int-pair rationals and breakpoint
tables.
"""

import os

if os.environ.get("PLTWIST_PURE") == "1":
    from . import core_py as _impl

    BACKEND = "python"
else:
    try:
        from . import core_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import core_py as _impl

        BACKEND = "python"

q = _impl.q
qadd = _impl.qadd
qsub = _impl.qsub
qmul = _impl.qmul
qdiv = _impl.qdiv
qneg = _impl.qneg
qcmp = _impl.qcmp
qfloor = _impl.qfloor
qceil = _impl.qceil
qshift = _impl.qshift
tbl_slope = _impl.tbl_slope
tbl_find_segment = _impl.tbl_find_segment
tbl_eval = _impl.tbl_eval
tbl_collapse = _impl.tbl_collapse
tbl_compose_grid = _impl.tbl_compose_grid
collinear = _impl.collinear
