"""Builtin base types and operations shared by the whole pipeline.

`bool` is an ordinary two-constructor datatype that the default adaptation
table maps onto Go's booleans; `int` and `str` are opaque type constructors
whose values exist only as literals and as results of the builtin
operations below.  The reference interpreter evaluates the builtins
natively; the code generator prints them through the adaptation table.
"""

from __future__ import annotations

from . import ir

BOOL = ir.TyCon("bool")
INT = ir.TyCon("int")
STR = ir.TyCon("str")

PRELUDE_DECLS: tuple[ir.Declaration, ...] = (
    ir.Data("bool", (), (("True", ()), ("False", ()))),
    ir.Data("int", (), ()),
    ir.Data("str", (), ()),
)

PRELUDE_NAMES = {"bool", "True", "False", "int", "str"}


def _fn(*tys: ir.TypeExpr) -> ir.TypeExpr:
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = ir.TyFun(t, out)
    return out


# name -> signature; all builtins are first-order and fully applied at
# their natural arity unless the program abstracts over them.
BUILTIN_SIGS: dict[str, ir.TypeExpr] = {
    "int_plus": _fn(INT, INT, INT),
    "int_minus": _fn(INT, INT, INT),
    "int_times": _fn(INT, INT, INT),
    "int_eq": _fn(INT, INT, BOOL),
    "int_le": _fn(INT, INT, BOOL),
    "int_lt": _fn(INT, INT, BOOL),
    "str_append": _fn(STR, STR, STR),
}


def builtin_arity(name: str) -> int:
    sig = BUILTIN_SIGS[name]
    n = 0
    while isinstance(sig, ir.TyFun):
        n += 1
        sig = sig.result
    return n


# Surface operators are sugar for alphanumeric method/function names.
OPERATOR_TABLE = {"+": "plus", "-": "minus", "*": "times"}
