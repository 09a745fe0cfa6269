"""Pure-Python twin of the native kernel.

Mirrors _native.pyx operation for operation (same formulas, same evaluation
order) so that both backends produce the same floating-point results, except
that libm and numpy may round pow differently by one ulp.  All arithmetic
runs on IEEE float64 via numpy with error traps suppressed; domain errors
surface as inf/nan exactly like the C code.
"""

from __future__ import annotations

import math

import numpy as np

from .opcodes import (
    OP_ABS,
    OP_ADD,
    OP_CONST,
    OP_DIV,
    OP_MAX,
    OP_MIN,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SQRT,
    OP_SUB,
    OP_VAR,
)

NAME = "python"

def _quiet():
    return np.errstate(divide="ignore", invalid="ignore", over="ignore")


def eval_program(codes, operands, point):
    """Evaluate a compiled expression at one point; returns a float."""
    stack = []
    point = np.asarray(point, dtype=np.float64)
    with _quiet():
        for k in range(len(codes)):
            op = int(codes[k])
            if op == OP_CONST:
                stack.append(np.float64(operands[k]))
            elif op == OP_VAR:
                stack.append(point[int(operands[k])])
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_SQRT:
                stack[-1] = np.sqrt(stack[-1])
            elif op == OP_ABS:
                stack[-1] = np.abs(stack[-1])
            else:
                b = stack.pop()
                a = stack[-1]
                if op == OP_ADD:
                    stack[-1] = a + b
                elif op == OP_SUB:
                    stack[-1] = a - b
                elif op == OP_MUL:
                    stack[-1] = a * b
                elif op == OP_DIV:
                    stack[-1] = a / b
                elif op == OP_POW:
                    stack[-1] = np.power(a, b)
                elif op == OP_MIN:
                    stack[-1] = a if a < b else b
                else:
                    stack[-1] = a if a > b else b
    return float(stack[0])


def eval_program_many(codes, operands, points):
    """Evaluate a compiled expression at each row of `points` (shape (N, dim))."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    stack = []
    with _quiet():
        for k in range(len(codes)):
            op = int(codes[k])
            if op == OP_CONST:
                stack.append(np.full(n, operands[k]))
            elif op == OP_VAR:
                stack.append(points[:, int(operands[k])].copy())
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_SQRT:
                stack[-1] = np.sqrt(stack[-1])
            elif op == OP_ABS:
                stack[-1] = np.abs(stack[-1])
            else:
                b = stack.pop()
                a = stack[-1]
                if op == OP_ADD:
                    stack[-1] = a + b
                elif op == OP_SUB:
                    stack[-1] = a - b
                elif op == OP_MUL:
                    stack[-1] = a * b
                elif op == OP_DIV:
                    stack[-1] = a / b
                elif op == OP_POW:
                    stack[-1] = np.power(a, b)
                elif op == OP_MIN:
                    stack[-1] = np.where(a < b, a, b)
                else:
                    stack[-1] = np.where(a > b, a, b)
    return np.asarray(stack[0], dtype=np.float64)


def _width_from_g(g, lo_i, hi_i, half_width):
    top = g + half_width
    bot = g - half_width
    top = top if top < hi_i else hi_i
    bot = bot if bot > lo_i else lo_i
    w = top - bot
    return w if w > 0.0 else 0.0


def strip_width_many(codes, operands, points, lo_i, hi_i, half_width):
    """Clamped strip width at each row of `points` (protected-slot value unused)."""
    g = eval_program_many(codes, operands, points)
    with _quiet():
        top = g + half_width
        bot = g - half_width
        top = np.where(top < hi_i, top, hi_i)
        bot = np.where(bot > lo_i, bot, lo_i)
        w = top - bot
        return np.where(w > 0.0, w, 0.0)


def integrate_strip_width(codes, operands, base_point, free_var, a, b,
                          lo_i, hi_i, half_width, abs_tol, max_depth):
    """Adaptive-Simpson integral of the strip width over base_point[free_var] in [a, b].

    Returns (value, error_estimate); both are nan if the boundary expression
    produced a non-finite value anywhere.
    """
    point = np.array(base_point, dtype=np.float64)
    if b <= a:
        return 0.0, 0.0

    def width(t):
        point[free_var] = t
        return _width_from_g(eval_program(codes, operands, point),
                             lo_i, hi_i, half_width)

    fa = width(a)
    fm = width(0.5 * (a + b))
    fb = width(b)
    if not (math.isfinite(fa) and math.isfinite(fm) and math.isfinite(fb)):
        return math.nan, math.nan
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    err_box = [0.0]

    def adapt(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = width(lm)
        frm = width(rm)
        if not (math.isfinite(flm) and math.isfinite(frm)):
            err_box[0] = math.nan
            return math.nan
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        s2 = left + right
        d = s2 - whole
        if depth <= 0 or abs(d) <= 15.0 * tol:
            err_box[0] += abs(d) / 15.0
            return s2 + d / 15.0
        vl = adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        vr = adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        return vl + vr

    value = adapt(a, b, fa, fm, fb, whole, abs_tol, max_depth)
    return float(value), float(err_box[0])
