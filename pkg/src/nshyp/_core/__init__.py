"""Kernel backend selection.

Imports the compiled extension when it is available, otherwise the pure
Python fallback.  NSHYP_BACKEND=python or NSHYP_BACKEND=native forces a
specific backend (the latter raises if the extension was not built).
"""

from __future__ import annotations

import os

from .opcodes import MAX_STACK, TABLE  # noqa: F401  (re-exported)

_requested = os.environ.get("NSHYP_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _fallback as _impl
elif _requested in ("", "native"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "NSHYP_BACKEND=native but the compiled kernel is not built; "
                "reinstall with a C compiler available"
            ) from None
        from . import _fallback as _impl  # type: ignore[no-redef]
else:
    raise ImportError(f"unknown NSHYP_BACKEND value: {_requested!r}")

BACKEND = _impl.NAME


def eval_program(codes, operands, point):
    return _impl.eval_program(codes, operands, point)


def eval_program_many(codes, operands, points):
    return _impl.eval_program_many(codes, operands, points)


def strip_width_many(codes, operands, points, lo_i, hi_i, half_width):
    return _impl.strip_width_many(codes, operands, points, lo_i, hi_i, half_width)


def integrate_strip_width(codes, operands, base_point, free_var, a, b,
                          lo_i, hi_i, half_width, abs_tol, max_depth):
    return _impl.integrate_strip_width(codes, operands, base_point, free_var,
                                       a, b, lo_i, hi_i, half_width,
                                       abs_tol, max_depth)
