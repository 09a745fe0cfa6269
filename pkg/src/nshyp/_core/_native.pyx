# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: postfix expression VM, strip widths, adaptive Simpson.

Arithmetic is plain IEEE double precision (C semantics); domain errors
surface as inf/nan and are turned into exceptions by the callers.  The
pure-Python twin of this module is nshyp._core._fallback; both must keep
the same evaluation order so results agree across backends.
"""

import numpy as np

from libc.math cimport fabs, isfinite, pow, sqrt, NAN


cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_POW = 6
    OP_NEG = 7
    OP_MIN = 8
    OP_MAX = 9
    OP_SQRT = 10
    OP_ABS = 11

DEF STACK_CAP = 64

NAME = "native"

# mirrors nshyp._core.opcodes.TABLE; asserted equal in the test suite
OPCODE_TABLE = {
    "OP_CONST": OP_CONST,
    "OP_VAR": OP_VAR,
    "OP_ADD": OP_ADD,
    "OP_SUB": OP_SUB,
    "OP_MUL": OP_MUL,
    "OP_DIV": OP_DIV,
    "OP_POW": OP_POW,
    "OP_NEG": OP_NEG,
    "OP_MIN": OP_MIN,
    "OP_MAX": OP_MAX,
    "OP_SQRT": OP_SQRT,
    "OP_ABS": OP_ABS,
}


cdef double _eval(const int* codes, const double* operands, Py_ssize_t n,
                  const double* point, double* stack) noexcept nogil:
    cdef Py_ssize_t k, sp = 0
    cdef int op
    cdef double a, b
    for k in range(n):
        op = codes[k]
        if op == OP_CONST:
            stack[sp] = operands[k]
            sp += 1
        elif op == OP_VAR:
            stack[sp] = point[<Py_ssize_t> operands[k]]
            sp += 1
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_SQRT:
            stack[sp - 1] = sqrt(stack[sp - 1])
        elif op == OP_ABS:
            stack[sp - 1] = fabs(stack[sp - 1])
        else:
            sp -= 1
            b = stack[sp]
            a = stack[sp - 1]
            if op == OP_ADD:
                stack[sp - 1] = a + b
            elif op == OP_SUB:
                stack[sp - 1] = a - b
            elif op == OP_MUL:
                stack[sp - 1] = a * b
            elif op == OP_DIV:
                stack[sp - 1] = a / b
            elif op == OP_POW:
                stack[sp - 1] = pow(a, b)
            elif op == OP_MIN:
                stack[sp - 1] = a if a < b else b
            else:
                stack[sp - 1] = a if a > b else b
    return stack[0]


cdef inline double _width(const int* codes, const double* operands, Py_ssize_t n,
                          const double* point, double* stack,
                          double lo_i, double hi_i, double half_width) noexcept nogil:
    cdef double g = _eval(codes, operands, n, point, stack)
    cdef double top = g + half_width
    cdef double bot = g - half_width
    cdef double w
    top = top if top < hi_i else hi_i
    bot = bot if bot > lo_i else lo_i
    w = top - bot
    return w if w > 0.0 else 0.0


def eval_program(int[::1] codes, double[::1] operands, double[::1] point):
    """Evaluate a compiled expression at one point; returns a float."""
    cdef double stack[STACK_CAP]
    return _eval(&codes[0], &operands[0], codes.shape[0], &point[0], stack)


def eval_program_many(int[::1] codes, double[::1] operands, double[:, ::1] points):
    """Evaluate a compiled expression at each row of `points` (shape (N, dim))."""
    cdef Py_ssize_t n = points.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double stack[STACK_CAP]
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            o[k] = _eval(&codes[0], &operands[0], codes.shape[0], &points[k, 0], stack)
    return out


def strip_width_many(int[::1] codes, double[::1] operands, double[:, ::1] points,
                     double lo_i, double hi_i, double half_width):
    """Clamped strip width at each row of `points` (protected-slot value unused)."""
    cdef Py_ssize_t n = points.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double stack[STACK_CAP]
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            o[k] = _width(&codes[0], &operands[0], codes.shape[0], &points[k, 0],
                          stack, lo_i, hi_i, half_width)
    return out


cdef double _adapt(const int* codes, const double* operands, Py_ssize_t n,
                   double* point, double* stack, Py_ssize_t free_var,
                   double lo_i, double hi_i, double half_width,
                   double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, double* err) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm, frm, left, right, s2, d, vl, vr
    point[free_var] = lm
    flm = _width(codes, operands, n, point, stack, lo_i, hi_i, half_width)
    point[free_var] = rm
    frm = _width(codes, operands, n, point, stack, lo_i, hi_i, half_width)
    if not (isfinite(flm) and isfinite(frm)):
        err[0] = NAN
        return NAN
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    s2 = left + right
    d = s2 - whole
    if depth <= 0 or fabs(d) <= 15.0 * tol:
        err[0] += fabs(d) / 15.0
        return s2 + d / 15.0
    vl = _adapt(codes, operands, n, point, stack, free_var, lo_i, hi_i, half_width,
                a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err)
    vr = _adapt(codes, operands, n, point, stack, free_var, lo_i, hi_i, half_width,
                m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err)
    return vl + vr


def integrate_strip_width(int[::1] codes, double[::1] operands, double[::1] base_point,
                          Py_ssize_t free_var, double a, double b,
                          double lo_i, double hi_i, double half_width,
                          double abs_tol, int max_depth):
    """Adaptive-Simpson integral of the strip width over base_point[free_var] in [a, b].

    Returns (value, error_estimate); both are nan if the boundary expression
    produced a non-finite value anywhere.
    """
    cdef double stack[STACK_CAP]
    cdef double point[STACK_CAP]
    cdef Py_ssize_t dim = base_point.shape[0]
    cdef Py_ssize_t k
    if dim > STACK_CAP:
        raise ValueError("point dimension exceeds kernel capacity")
    for k in range(dim):
        point[k] = base_point[k]
    if b <= a:
        return 0.0, 0.0
    cdef double fa, fm, fb, whole, value
    cdef double err = 0.0
    cdef Py_ssize_t nc = codes.shape[0]
    with nogil:
        point[free_var] = a
        fa = _width(&codes[0], &operands[0], nc, point, stack, lo_i, hi_i, half_width)
        point[free_var] = 0.5 * (a + b)
        fm = _width(&codes[0], &operands[0], nc, point, stack, lo_i, hi_i, half_width)
        point[free_var] = b
        fb = _width(&codes[0], &operands[0], nc, point, stack, lo_i, hi_i, half_width)
        if isfinite(fa) and isfinite(fm) and isfinite(fb):
            whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
            value = _adapt(&codes[0], &operands[0], nc, point, stack, free_var,
                           lo_i, hi_i, half_width, a, b, fa, fm, fb, whole,
                           abs_tol, max_depth, &err)
        else:
            value = NAN
            err = NAN
    return value, err
