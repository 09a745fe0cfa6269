"""Opcode table for the postfix expression programs run by the kernels.

The native kernel (_native.pyx) hardcodes the same values in a C enum;
test_backends asserts the two tables agree.
"""

OP_CONST = 0   # push operand
OP_VAR = 1     # push point[int(operand)]
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

# Hard cap on VM stack depth; enforced when programs are compiled.
MAX_STACK = 64

TABLE = {
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
