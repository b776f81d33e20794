"""The target language: a functional fragment of Go.

Structs, empty interfaces, generic functions constrained by `any`,
returns, ifs and type assertions — extended with `==`, `&&`, `panic`,
discard bindings, block statements, function types and opaque adapted
types, all of which the generated code needs.  The module provides a
well-formedness checker (a structural type checker standing in for the Go
compiler, including its unused-variable rule), a small-step-free big-step
evaluator, and a deterministic source renderer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# ---------------------------------------------------------------------------
# Types


class GoType:
    pass


@dataclass(frozen=True)
class Param(GoType):
    name: str


@dataclass(frozen=True)
class StructRef(GoType):
    name: str
    type_args: tuple[GoType, ...] = ()


@dataclass(frozen=True)
class InterfaceRef(GoType):
    name: str
    type_args: tuple[GoType, ...] = ()


@dataclass(frozen=True)
class FuncType(GoType):
    params: tuple[GoType, ...]
    results: tuple[GoType, ...]


@dataclass(frozen=True)
class Raw(GoType):
    """An adapted (printed) type, referenced verbatim: `bool`, `*big.Int`."""

    text: str
    imports: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class StructBody:
    fields: tuple[tuple[str, GoType], ...]


@dataclass(frozen=True)
class InterfaceBody:
    pass


@dataclass(frozen=True)
class TypeDecl:
    name: str
    type_params: tuple[str, ...]  # every constraint is the token `any`
    body: StructBody | InterfaceBody


@dataclass(frozen=True)
class FuncDecl:
    name: str
    type_params: tuple[str, ...]
    params: tuple[tuple[str, GoType], ...]
    results: tuple[GoType, ...]
    body: "GoStmt"
    # destructors print their result list parenthesized even when single
    paren_results: bool = False


GoDecl = TypeDecl | FuncDecl


# ---------------------------------------------------------------------------
# Expressions


class GoExpr:
    pass


@dataclass(frozen=True)
class Var(GoExpr):
    name: str


@dataclass(frozen=True)
class Call(GoExpr):
    func_name: str
    type_args: tuple[GoType, ...]
    args: tuple[GoExpr, ...]
    # destructor calls print without explicit instantiation (Go infers it);
    # the checker and the evaluator still see the full type arguments
    elide_type_args: bool = False


@dataclass(frozen=True)
class StructLit(GoExpr):
    type_name: str
    type_args: tuple[GoType, ...]
    field_values: tuple[GoExpr, ...]


@dataclass(frozen=True)
class FuncLit(GoExpr):
    params: tuple[tuple[str, GoType], ...]
    results: tuple[GoType, ...]
    body: "GoStmt"


@dataclass(frozen=True)
class FieldSel(GoExpr):
    target: GoExpr
    field_name: str


@dataclass(frozen=True)
class TypeConv(GoExpr):
    to_interface: GoType
    inner: GoExpr


@dataclass(frozen=True)
class Nil(GoExpr):
    pass


@dataclass(frozen=True)
class ExprCall(GoExpr):
    target: GoExpr
    args: tuple[GoExpr, ...]


@dataclass(frozen=True)
class Eq(GoExpr):
    lhs: GoExpr
    rhs: GoExpr


@dataclass(frozen=True)
class And(GoExpr):
    lhs: GoExpr
    rhs: GoExpr


@dataclass(frozen=True)
class Prim(GoExpr):
    """Instantiated adaptation template; op names the builtin semantics."""

    op: str
    template: str
    go_type: GoType
    args: tuple[GoExpr, ...] = ()
    imports: tuple[str, ...] = ()
    value: object = None


# ---------------------------------------------------------------------------
# Statements (chains; `rest` is None where a branch falls through)


class GoStmt:
    pass


@dataclass(frozen=True)
class Return(GoStmt):
    exprs: tuple[GoExpr, ...]


@dataclass(frozen=True)
class VarDecl(GoStmt):
    names: tuple[str, ...]  # "_" discards
    rhs: GoExpr
    rest: GoStmt | None


@dataclass(frozen=True)
class If(GoStmt):
    cond: GoExpr
    then: GoStmt
    rest: GoStmt | None


@dataclass(frozen=True)
class TypeAssert(GoStmt):
    value_name: str
    ok_name: str
    target: GoExpr
    asserted: GoType
    rest: GoStmt | None


@dataclass(frozen=True)
class Block(GoStmt):
    inner: GoStmt
    rest: GoStmt | None


@dataclass(frozen=True)
class Panic(GoStmt):
    message: str


# ---------------------------------------------------------------------------
# Values


class GValue:
    pass


@dataclass(frozen=True)
class GStruct(GValue):
    type_name: str
    type_args: tuple[GoType, ...]
    fields: tuple[GValue, ...]


@dataclass(frozen=True)
class GIface(GValue):
    dynamic: GoType  # the inner value's struct type; never an interface
    inner: GValue


@dataclass(frozen=True)
class GClosure(GValue):
    params: tuple[tuple[str, GoType], ...]
    body: GoStmt
    env: dict = field(compare=False)
    tenv: dict = field(compare=False)


@dataclass(frozen=True)
class GNil(GValue):
    pass


@dataclass(frozen=True)
class GBool(GValue):
    value: bool


@dataclass(frozen=True)
class GInt(GValue):
    value: int


@dataclass(frozen=True)
class GStr(GValue):
    value: str


@dataclass(frozen=True)
class GMulti(GValue):
    values: tuple[GValue, ...]


class GFailure(Exception):
    pass


class GoPanic(GFailure):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class GoOutOfFuel(GFailure):
    pass


class NilDereference(GFailure):
    pass


class GoInternalError(Exception):
    """The evaluator hit something check_wf should have rejected."""


# ---------------------------------------------------------------------------
# Diagnostics and the well-formedness checker


@dataclass(frozen=True)
class Diagnostic:
    decl: str
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind} in {self.decl}: {self.message}"


def subst_type(t: GoType, env: dict[str, GoType]) -> GoType:
    if isinstance(t, Param):
        return env.get(t.name, t)
    if isinstance(t, StructRef):
        return StructRef(t.name, tuple(subst_type(a, env) for a in t.type_args))
    if isinstance(t, InterfaceRef):
        return InterfaceRef(t.name, tuple(subst_type(a, env) for a in t.type_args))
    if isinstance(t, FuncType):
        return FuncType(
            tuple(subst_type(a, env) for a in t.params),
            tuple(subst_type(a, env) for a in t.results),
        )
    return t


class _Multi:
    def __init__(self, types: tuple[GoType, ...]):
        self.types = types


class _NilT:
    pass


_NIL_T = _NilT()


class _Scope:
    def __init__(self, parent: "_Scope | None"):
        self.parent = parent
        self.names: dict[str, list] = {}  # name -> [type, used, exempt]

    def declare(self, name: str, ty, exempt: bool = False) -> bool:
        if name in self.names:
            return False
        self.names[name] = [ty, False, exempt]
        return True

    def lookup(self, name: str):
        s = self
        while s is not None:
            if name in s.names:
                s.names[name][1] = True
                return s.names[name][0]
            s = s.parent
        return None

    def unused(self) -> list[str]:
        # parameters are exempt: Go only rejects unused := variables
        return [n for n, (_, used, exempt) in self.names.items() if not used and not exempt]


class _Checker:
    def __init__(self, decls: list[GoDecl], strict: bool):
        self.strict = strict
        self.diags: list[Diagnostic] = []
        self.types: dict[str, TypeDecl] = {}
        self.funcs: dict[str, FuncDecl] = {}
        self.decl = "<program>"
        for d in decls:
            table = self.types if isinstance(d, TypeDecl) else self.funcs
            if d.name in self.types or d.name in self.funcs:
                self.error("DuplicateDecl", f"{d.name} declared twice")
            table[d.name] = d

    def error(self, kind: str, message: str):
        self.diags.append(Diagnostic(self.decl, kind, message))

    def extension(self, what: str):
        if self.strict:
            self.error("Extension", f"{what} is outside the base fragment")

    # -- types ----------------------------------------------------------

    def check_type(self, t: GoType, tparams: set[str]):
        if isinstance(t, Param):
            if t.name not in tparams:
                self.error("UnknownTypeParam", t.name)
        elif isinstance(t, (StructRef, InterfaceRef)):
            decl = self.types.get(t.name)
            if decl is None:
                self.error("UnknownType", t.name)
                return
            want_struct = isinstance(decl.body, StructBody)
            if isinstance(t, StructRef) != want_struct:
                self.error("TypeKindMismatch", f"{t.name} referenced as the wrong kind")
            if len(t.type_args) != len(decl.type_params):
                self.error(
                    "TypeArityMismatch",
                    f"{t.name} expects {len(decl.type_params)} type args, got {len(t.type_args)}",
                )
            for a in t.type_args:
                self.check_type(a, tparams)
        elif isinstance(t, FuncType):
            self.extension("function type")
            for a in t.params + t.results:
                self.check_type(a, tparams)
        elif isinstance(t, Raw):
            self.extension(f"adapted type {t.text}")

    def is_interface(self, t) -> bool:
        return isinstance(t, InterfaceRef)

    def assignable(self, src, dst) -> bool:
        if isinstance(src, _Multi) or isinstance(dst, _Multi):
            return False
        if isinstance(src, _NilT):
            return isinstance(dst, (InterfaceRef, FuncType)) or (
                isinstance(dst, Raw) and dst.text.startswith("*")
            )
        if src == dst:
            return True
        if isinstance(dst, InterfaceRef):
            return True  # all our interfaces are empty
        if isinstance(dst, Raw) and isinstance(src, Raw):
            return src.text == dst.text
        return False

    def comparable(self, t) -> bool:
        return isinstance(t, (InterfaceRef, StructRef, Raw))

    # -- expressions ------------------------------------------------------

    def expr(self, e: GoExpr, scope: _Scope, tparams: set[str]):
        if isinstance(e, Var):
            ty = scope.lookup(e.name)
            if ty is None:
                self.error("UnknownVar", e.name)
                return _NIL_T
            return ty
        if isinstance(e, Nil):
            return _NIL_T
        if isinstance(e, Call):
            f = self.funcs.get(e.func_name)
            if f is None:
                self.error("UnknownFunc", e.func_name)
                return _NIL_T
            if len(e.type_args) != len(f.type_params):
                self.error("TypeArityMismatch", f"call of {f.name}")
                return _NIL_T
            for a in e.type_args:
                self.check_type(a, tparams)
            sub = dict(zip(f.type_params, e.type_args))
            if len(e.args) != len(f.params):
                self.error(
                    "ArityMismatch",
                    f"{f.name} takes {len(f.params)} args, got {len(e.args)}",
                )
            for arg, (_, pty) in zip(e.args, f.params):
                at = self.expr(arg, scope, tparams)
                self.multi_guard(at)
                if not self.assignable(at, subst_type(pty, sub)):
                    self.error("TypeMismatch", f"argument of {f.name}")
            results = tuple(subst_type(r, sub) for r in f.results)
            return results[0] if len(results) == 1 else _Multi(results)
        if isinstance(e, StructLit):
            decl = self.types.get(e.type_name)
            if decl is None or not isinstance(decl.body, StructBody):
                self.error("UnknownType", f"struct {e.type_name}")
                return _NIL_T
            if len(e.type_args) != len(decl.type_params):
                self.error("TypeArityMismatch", f"literal of {e.type_name}")
            for a in e.type_args:
                self.check_type(a, tparams)
            sub = dict(zip(decl.type_params, e.type_args))
            if len(e.field_values) != len(decl.body.fields):
                self.error(
                    "FieldCountMismatch",
                    f"{e.type_name} has {len(decl.body.fields)} fields, literal has "
                    f"{len(e.field_values)}",
                )
            for v, (_, fty) in zip(e.field_values, decl.body.fields):
                vt = self.expr(v, scope, tparams)
                self.multi_guard(vt)
                if not self.assignable(vt, subst_type(fty, sub)):
                    self.error("TypeMismatch", f"field of {e.type_name}")
            return StructRef(e.type_name, e.type_args)
        if isinstance(e, FuncLit):
            inner = _Scope(scope)
            for n, ty in e.params:
                self.check_type(ty, tparams)
                inner.declare(n, ty, exempt=True)
            for r in e.results:
                self.check_type(r, tparams)
            self.stmt_chain(e.body, inner, tparams, e.results, toplevel=False)
            return FuncType(tuple(t for _, t in e.params), e.results)
        if isinstance(e, FieldSel):
            t = self.expr(e.target, scope, tparams)
            if not isinstance(t, StructRef):
                self.error("FieldOnNonStruct", e.field_name)
                return _NIL_T
            decl = self.types[t.name]
            assert isinstance(decl.body, StructBody)
            sub = dict(zip(decl.type_params, t.type_args))
            for n, fty in decl.body.fields:
                if n == e.field_name:
                    return subst_type(fty, sub)
            self.error("UnknownField", f"{t.name}.{e.field_name}")
            return _NIL_T
        if isinstance(e, TypeConv):
            self.check_type(e.to_interface, tparams)
            if not self.is_interface(e.to_interface):
                self.error("ConvToNonInterface", str(e.to_interface))
            it = self.expr(e.inner, scope, tparams)
            self.multi_guard(it)
            return e.to_interface
        if isinstance(e, ExprCall):
            t = self.expr(e.target, scope, tparams)
            if not isinstance(t, FuncType):
                self.error("CallOfNonFunction", "expression call")
                return _NIL_T
            if len(e.args) != len(t.params):
                self.error("ArityMismatch", "expression call")
            for a, pty in zip(e.args, t.params):
                at = self.expr(a, scope, tparams)
                self.multi_guard(at)
                if not self.assignable(at, pty):
                    self.error("TypeMismatch", "expression call argument")
            return t.results[0] if len(t.results) == 1 else _Multi(t.results)
        if isinstance(e, Eq):
            self.extension("==")
            lt = self.expr(e.lhs, scope, tparams)
            rt = self.expr(e.rhs, scope, tparams)
            self.multi_guard(lt)
            self.multi_guard(rt)
            if not (self.assignable(lt, rt) or self.assignable(rt, lt)):
                self.error("TypeMismatch", "== on incompatible types")
            for t in (lt, rt):
                if not (isinstance(t, _NilT) or self.comparable(t)):
                    self.error("NotComparable", "== on non-comparable type")
            return Raw("bool")
        if isinstance(e, And):
            self.extension("&&")
            for side in (e.lhs, e.rhs):
                t = self.expr(side, scope, tparams)
                if not (isinstance(t, Raw) and t.text == "bool"):
                    self.error("TypeMismatch", "&& on non-boolean")
            return Raw("bool")
        if isinstance(e, Prim):
            self.extension(f"adapted constant {e.op}")
            for a in e.args:
                self.multi_guard(self.expr(a, scope, tparams))
            return e.go_type
        raise TypeError(e)

    def multi_guard(self, t):
        if isinstance(t, _Multi):
            self.error(
                "MultiValueMisuse",
                "multi-valued call must be immediately destructured",
            )

    # -- statements -------------------------------------------------------

    def stmt_chain(self, s: GoStmt, scope: _Scope, tparams, results, toplevel: bool):
        terminated = self.stmt(s, scope, tparams, results)
        if toplevel and not terminated:
            self.error("MissingReturn", "function body can fall through")
        for name in scope.unused():
            self.error("UnusedVariable", name)

    def stmt(self, s: GoStmt | None, scope: _Scope, tparams, results) -> bool:
        """Checks a chain; True if every path through it ends in
        return/panic before falling off."""
        if s is None:
            return False
        if isinstance(s, Return):
            if len(s.exprs) != len(results):
                self.error(
                    "ReturnArity",
                    f"returns {len(s.exprs)} values, function declares {len(results)}",
                )
            for e, rty in zip(s.exprs, results):
                t = self.expr(e, scope, tparams)
                self.multi_guard(t)
                if not self.assignable(t, rty):
                    self.error("TypeMismatch", "return value")
            return True
        if isinstance(s, Panic):
            self.extension("panic")
            return True
        if isinstance(s, VarDecl):
            t = self.expr(s.rhs, scope, tparams)
            tys = t.types if isinstance(t, _Multi) else (t,)
            if len(s.names) != len(tys):
                self.error(
                    "MultiValueMisuse" if isinstance(t, _Multi) or len(s.names) > 1 else "ArityMismatch",
                    f"{len(tys)} values assigned to {len(s.names)} names",
                )
            for n, ty in zip(s.names, tys):
                if n == "_":
                    self.extension("discard binding")
                    continue
                if not scope.declare(n, ty):
                    self.error("Redeclared", n)
            return self.stmt(s.rest, scope, tparams, results)
        if isinstance(s, TypeAssert):
            t = self.expr(s.target, scope, tparams)
            if not (self.is_interface(t) or isinstance(t, _NilT)):
                self.error("AssertOnNonInterface", str(t))
            self.check_type(s.asserted, tparams)
            if s.value_name != "_" and not scope.declare(s.value_name, s.asserted):
                self.error("Redeclared", s.value_name)
            if s.ok_name != "_" and not scope.declare(s.ok_name, Raw("bool")):
                self.error("Redeclared", s.ok_name)
            return self.stmt(s.rest, scope, tparams, results)
        if isinstance(s, If):
            ct = self.expr(s.cond, scope, tparams)
            if not (isinstance(ct, Raw) and ct.text == "bool"):
                self.error("TypeMismatch", "if condition is not boolean")
            inner = _Scope(scope)
            self.stmt(s.then, inner, tparams, results)
            for name in inner.unused():
                self.error("UnusedVariable", name)
            return self.stmt(s.rest, scope, tparams, results)
        if isinstance(s, Block):
            self.extension("block statement")
            inner = _Scope(scope)
            self.stmt(s.inner, inner, tparams, results)
            for name in inner.unused():
                self.error("UnusedVariable", name)
            return self.stmt(s.rest, scope, tparams, results)
        raise TypeError(s)


def check_wf(decls: list[GoDecl], strict: bool = False) -> list[Diagnostic]:
    """Empty iff the program lies in the (extended) fragment and is
    type-correct under its rules."""
    ck = _Checker(list(decls), strict)
    for d in decls:
        ck.decl = d.name
        tparams = set(d.type_params)
        if isinstance(d, TypeDecl):
            if isinstance(d.body, StructBody):
                seen = set()
                for n, ty in d.body.fields:
                    if n in seen:
                        ck.error("DuplicateField", n)
                    seen.add(n)
                    ck.check_type(ty, tparams)
        else:
            scope = _Scope(None)
            for n, ty in d.params:
                ck.check_type(ty, tparams)
                if n != "_" and not scope.declare(n, ty, exempt=True):
                    ck.error("Redeclared", n)
            for r in d.results:
                ck.check_type(r, tparams)
            ck.stmt_chain(d.body, scope, tparams, d.results, toplevel=True)
    return ck.diags


# ---------------------------------------------------------------------------
# Evaluator


_MAX_CALL_DEPTH = 1200


class _Runner:
    def __init__(self, decls: list[GoDecl], fuel: int):
        self.types: dict[str, TypeDecl] = {}
        self.funcs: dict[str, FuncDecl] = {}
        for d in decls:
            (self.types if isinstance(d, TypeDecl) else self.funcs)[d.name] = d
        self.fuel = fuel
        self.depth = 0

    def spend(self):
        if self.fuel <= 0:
            raise GoOutOfFuel()
        self.fuel -= 1

    def enter(self):
        self.depth += 1
        if self.depth > _MAX_CALL_DEPTH:
            raise GoOutOfFuel()

    def field_index(self, type_name: str, field_name: str) -> int:
        body = self.types[type_name].body
        assert isinstance(body, StructBody)
        for i, (n, _) in enumerate(body.fields):
            if n == field_name:
                return i
        raise GoInternalError(f"no field {field_name} on {type_name}")

    def call_func(self, f: FuncDecl, args: list[GValue], tenv: dict) -> GValue:
        env = {n: v for (n, _), v in zip(f.params, args)}
        self.enter()
        try:
            out = self.exec(f.body, env, tenv)
        finally:
            self.depth -= 1
        if out is None:
            raise GoInternalError(f"{f.name} fell through without returning")
        return out

    def exec(self, s: GoStmt | None, env: dict, tenv: dict) -> GValue | None:
        while s is not None:
            self.spend()
            if isinstance(s, Return):
                vals = [self.eval(e, env, tenv) for e in s.exprs]
                return vals[0] if len(vals) == 1 else GMulti(tuple(vals))
            if isinstance(s, Panic):
                raise GoPanic(s.message)
            if isinstance(s, VarDecl):
                v = self.eval(s.rhs, env, tenv)
                vals = v.values if isinstance(v, GMulti) else (v,)
                if len(vals) != len(s.names):
                    raise GoInternalError("destructuring arity mismatch")
                env = dict(env)
                for n, val in zip(s.names, vals):
                    if n != "_":
                        env[n] = val
                s = s.rest
                continue
            if isinstance(s, TypeAssert):
                v = self.eval(s.target, env, tenv)
                want = subst_type(s.asserted, tenv)
                if isinstance(v, GIface) and v.dynamic == want:
                    bound, ok = v.inner, GBool(True)
                else:
                    bound, ok = GNil(), GBool(False)
                env = dict(env)
                if s.value_name != "_":
                    env[s.value_name] = bound
                if s.ok_name != "_":
                    env[s.ok_name] = ok
                s = s.rest
                continue
            if isinstance(s, If):
                c = self.eval(s.cond, env, tenv)
                if not isinstance(c, GBool):
                    raise GoInternalError("non-boolean if condition")
                if c.value:
                    out = self.exec(s.then, dict(env), tenv)
                    if out is not None:
                        return out
                s = s.rest
                continue
            if isinstance(s, Block):
                out = self.exec(s.inner, dict(env), tenv)
                if out is not None:
                    return out
                s = s.rest
                continue
            raise TypeError(s)
        return None

    def eval(self, e: GoExpr, env: dict, tenv: dict) -> GValue:
        self.spend()
        if isinstance(e, Var):
            try:
                return env[e.name]
            except KeyError:
                raise GoInternalError(f"unbound variable {e.name}") from None
        if isinstance(e, Nil):
            return GNil()
        if isinstance(e, Call):
            f = self.funcs.get(e.func_name)
            if f is None:
                raise GoInternalError(f"unknown function {e.func_name}")
            args = [self.eval(a, env, tenv) for a in e.args]
            new_tenv = {
                p: subst_type(a, tenv) for p, a in zip(f.type_params, e.type_args)
            }
            return self.call_func(f, args, new_tenv)
        if isinstance(e, StructLit):
            return GStruct(
                e.type_name,
                tuple(subst_type(a, tenv) for a in e.type_args),
                tuple(self.eval(v, env, tenv) for v in e.field_values),
            )
        if isinstance(e, FuncLit):
            return GClosure(
                tuple((n, subst_type(t, tenv)) for n, t in e.params),
                e.body,
                env,
                dict(tenv),
            )
        if isinstance(e, FieldSel):
            v = self.eval(e.target, env, tenv)
            if isinstance(v, GNil):
                raise NilDereference()
            if not isinstance(v, GStruct):
                raise GoInternalError("field selection on a non-struct value")
            return v.fields[self.field_index(v.type_name, e.field_name)]
        if isinstance(e, TypeConv):
            v = self.eval(e.inner, env, tenv)
            if isinstance(v, GIface):
                return v  # converting between empty interfaces keeps the value
            if isinstance(v, GNil):
                return v
            return GIface(self.dynamic_type(v), v)
        if isinstance(e, ExprCall):
            f = self.eval(e.target, env, tenv)
            if isinstance(f, GNil):
                raise NilDereference()
            if not isinstance(f, GClosure):
                raise GoInternalError("calling a non-function value")
            args = [self.eval(a, env, tenv) for a in e.args]
            if len(args) != len(f.params):
                raise GoInternalError("closure arity mismatch")
            inner = dict(f.env)
            for (n, _), v in zip(f.params, args):
                inner[n] = v
            self.enter()
            try:
                out = self.exec(f.body, inner, f.tenv)
            finally:
                self.depth -= 1
            if out is None:
                raise GoInternalError("function literal fell through")
            return out
        if isinstance(e, Eq):
            return GBool(gequal(self.eval(e.lhs, env, tenv), self.eval(e.rhs, env, tenv)))
        if isinstance(e, And):
            l = self.eval(e.lhs, env, tenv)
            if not isinstance(l, GBool):
                raise GoInternalError("non-boolean && operand")
            if not l.value:
                return GBool(False)
            r = self.eval(e.rhs, env, tenv)
            if not isinstance(r, GBool):
                raise GoInternalError("non-boolean && operand")
            return r
        if isinstance(e, Prim):
            args = [self.eval(a, env, tenv) for a in e.args]
            return _prim(e, args)
        raise TypeError(e)

    def dynamic_type(self, v: GValue) -> GoType:
        if isinstance(v, GStruct):
            return StructRef(v.type_name, v.type_args)
        if isinstance(v, GBool):
            return Raw("bool")
        if isinstance(v, GInt):
            return Raw("*big.Int")
        if isinstance(v, GStr):
            return Raw("string")
        raise GoInternalError("value has no nameable dynamic type")


def _prim(e: Prim, args: list[GValue]) -> GValue:
    op = e.op
    if op == "int_lit":
        return GInt(e.value)
    if op == "str_lit":
        return GStr(e.value)
    if op == "bool_lit":
        return GBool(e.value)
    a, b = (args + [None, None])[:2]
    if op == "int_plus":
        return GInt(a.value + b.value)
    if op == "int_minus":
        return GInt(a.value - b.value)
    if op == "int_times":
        return GInt(a.value * b.value)
    if op == "int_eq":
        return GBool(a.value == b.value)
    if op == "int_le":
        return GBool(a.value <= b.value)
    if op == "int_lt":
        return GBool(a.value < b.value)
    if op == "str_append":
        return GStr(a.value + b.value)
    raise GoInternalError(f"unknown adapted operation {op}")


def gequal(a: GValue, b: GValue) -> bool:
    if isinstance(a, GNil) or isinstance(b, GNil):
        return isinstance(a, GNil) and isinstance(b, GNil)
    if isinstance(a, GIface) and isinstance(b, GIface):
        return a.dynamic == b.dynamic and gequal(a.inner, b.inner)
    if isinstance(a, GStruct) and isinstance(b, GStruct):
        if a.type_name != b.type_name or a.type_args != b.type_args:
            return False
        if len(a.fields) != len(b.fields):
            raise GoInternalError("same struct type with different field counts")
        return all(gequal(x, y) for x, y in zip(a.fields, b.fields))
    if isinstance(a, (GBool, GInt, GStr)) and type(a) is type(b):
        return a.value == b.value
    raise GoInternalError(f"comparing incomparable values {a!r} and {b!r}")


def geval(
    decls: list[GoDecl],
    entry: str,
    args: list[GValue],
    fuel: int = 10**6,
    type_args: tuple[GoType, ...] = (),
) -> GValue:
    """Run an entry function; raises GoPanic / GoOutOfFuel / NilDereference."""
    r = _Runner(list(decls), fuel)
    f = r.funcs.get(entry)
    if f is None:
        raise GoInternalError(f"unknown entry {entry}")
    if not type_args:
        # leave type parameters as themselves: parametric entries behave
        # uniformly, so skolems compare consistently on both sides
        type_args = tuple(Param(p) for p in f.type_params)
    tenv = {p: a for p, a in zip(f.type_params, type_args)}
    try:
        return r.call_func(f, list(args), tenv)
    except RecursionError:
        raise GoOutOfFuel() from None


def render_gvalue(v: GValue) -> str:
    """Canonical rendering mirroring the reference interpreter's format."""
    if isinstance(v, GIface):
        return render_gvalue(v.inner)
    if isinstance(v, GStruct):
        if not v.fields:
            return v.type_name
        return f"{v.type_name}({', '.join(render_gvalue(f) for f in v.fields)})"
    if isinstance(v, GBool):
        return "true" if v.value else "false"
    if isinstance(v, GInt):
        return str(v.value)
    if isinstance(v, GStr):
        return json.dumps(v.value)
    if isinstance(v, GNil):
        return "nil"
    raise GoInternalError("cannot render a closure")


# ---------------------------------------------------------------------------
# Renderer


def _type_src(t: GoType) -> str:
    if isinstance(t, Param):
        return t.name
    if isinstance(t, (StructRef, InterfaceRef)):
        if not t.type_args:
            return t.name
        return f"{t.name}[{', '.join(_type_src(a) for a in t.type_args)}]"
    if isinstance(t, FuncType):
        params = ", ".join(_type_src(a) for a in t.params)
        if len(t.results) == 1:
            return f"func({params}) {_type_src(t.results[0])}"
        results = ", ".join(_type_src(r) for r in t.results)
        return f"func({params}) ({results})"
    if isinstance(t, Raw):
        return t.text
    raise TypeError(t)


def _tparams_src(tps: tuple[str, ...]) -> str:
    if not tps:
        return ""
    return f"[{', '.join(tps)} any]"


def _expr_src(e: GoExpr, indent: int) -> str:
    pad = "\t" * indent
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Nil):
        return "nil"
    if isinstance(e, Call):
        show_args = e.type_args and not e.elide_type_args
        ta = f"[{', '.join(_type_src(t) for t in e.type_args)}]" if show_args else ""
        args = ", ".join(_expr_src(a, indent) for a in e.args)
        return f"{e.func_name}{ta}({args})"
    if isinstance(e, StructLit):
        ta = f"[{', '.join(_type_src(t) for t in e.type_args)}]" if e.type_args else ""
        vals = ", ".join(_expr_src(v, indent) for v in e.field_values)
        return f"{e.type_name}{ta}{{{vals}}}"
    if isinstance(e, FuncLit):
        params = ", ".join(f"{n} {_type_src(t)}" for n, t in e.params)
        results = _results_src(e.results)
        body = _stmt_src(e.body, indent + 1)
        return f"func({params}){results} {{\n{body}\n{pad}}}"
    if isinstance(e, FieldSel):
        return f"{_expr_src(e.target, indent)}.{e.field_name}"
    if isinstance(e, TypeConv):
        return f"({_type_src(e.to_interface)}({_expr_src(e.inner, indent)}))"
    if isinstance(e, ExprCall):
        args = ", ".join(_expr_src(a, indent) for a in e.args)
        return f"{_expr_src(e.target, indent)}({args})"
    if isinstance(e, Eq):
        return f"{_expr_src(e.lhs, indent)} == {_expr_src(e.rhs, indent)}"
    if isinstance(e, And):
        return f"{_expr_src(e.lhs, indent)} && {_expr_src(e.rhs, indent)}"
    if isinstance(e, Prim):
        if e.op == "int_lit":
            return (
                f"big.NewInt({e.value})"
                if -(2**63) <= e.value < 2**63
                else f'func() *big.Int {{ v, _ := new(big.Int).SetString("{e.value}", 10); return v }}()'
            )
        if e.op == "str_lit":
            return json.dumps(e.value)
        if e.op == "bool_lit":
            return "true" if e.value else "false"
        out = e.template
        for i, a in enumerate(e.args, start=1):
            out = out.replace(f"%{i}", _expr_src(a, indent))
        return out
    raise TypeError(e)


def _results_src(results: tuple[GoType, ...], force_paren: bool = False) -> str:
    if not results:
        return ""
    if len(results) == 1 and not force_paren:
        return f" {_type_src(results[0])}"
    return f" ({', '.join(_type_src(r) for r in results)})"


def _stmt_src(s: GoStmt | None, indent: int) -> str:
    pad = "\t" * indent
    lines: list[str] = []
    while s is not None:
        if isinstance(s, Return):
            exprs = ", ".join(_expr_src(e, indent) for e in s.exprs)
            lines.append(f"{pad}return {exprs}")
            break
        if isinstance(s, Panic):
            lines.append(f'{pad}panic("{s.message}")')
            break
        if isinstance(s, VarDecl):
            # an all-discard binding is a plain assignment (`:=` would
            # declare no new variables)
            op = "=" if all(n == "_" for n in s.names) else ":="
            lines.append(f"{pad}{', '.join(s.names)} {op} {_expr_src(s.rhs, indent)}")
            s = s.rest
            continue
        if isinstance(s, TypeAssert):
            lines.append(
                f"{pad}{s.value_name}, {s.ok_name} := "
                f"{_expr_src(s.target, indent)}.({_type_src(s.asserted)})"
            )
            s = s.rest
            continue
        if isinstance(s, If):
            lines.append(f"{pad}if ({_expr_src(s.cond, indent)}) {{")
            lines.append(_stmt_src(s.then, indent + 1))
            lines.append(f"{pad}}}")
            s = s.rest
            continue
        if isinstance(s, Block):
            lines.append(f"{pad}{{")
            lines.append(_stmt_src(s.inner, indent + 1))
            lines.append(f"{pad}}}")
            s = s.rest
            continue
        raise TypeError(s)
    return "\n".join(lines)


def collect_imports(decls: list[GoDecl]) -> list[str]:
    found: set[str] = set()

    def ty(t: GoType):
        if isinstance(t, Raw):
            found.update(t.imports)
        elif isinstance(t, (StructRef, InterfaceRef)):
            for a in t.type_args:
                ty(a)
        elif isinstance(t, FuncType):
            for a in t.params + t.results:
                ty(a)

    def expr(e: GoExpr):
        if isinstance(e, Prim):
            found.update(e.imports)
            if e.op == "int_lit":
                found.add("math/big")
            for a in e.args:
                expr(a)
        elif isinstance(e, Call):
            for t in e.type_args:
                ty(t)
            for a in e.args:
                expr(a)
        elif isinstance(e, StructLit):
            for t in e.type_args:
                ty(t)
            for a in e.field_values:
                expr(a)
        elif isinstance(e, FuncLit):
            for _, t in e.params:
                ty(t)
            for t in e.results:
                ty(t)
            stmt(e.body)
        elif isinstance(e, FieldSel):
            expr(e.target)
        elif isinstance(e, TypeConv):
            ty(e.to_interface)
            expr(e.inner)
        elif isinstance(e, ExprCall):
            expr(e.target)
            for a in e.args:
                expr(a)
        elif isinstance(e, (Eq, And)):
            expr(e.lhs)
            expr(e.rhs)

    def stmt(s: GoStmt | None):
        while s is not None:
            if isinstance(s, Return):
                for e in s.exprs:
                    expr(e)
                return
            if isinstance(s, Panic):
                return
            if isinstance(s, VarDecl):
                expr(s.rhs)
                s = s.rest
            elif isinstance(s, TypeAssert):
                expr(s.target)
                ty(s.asserted)
                s = s.rest
            elif isinstance(s, If):
                expr(s.cond)
                stmt(s.then)
                s = s.rest
            elif isinstance(s, Block):
                stmt(s.inner)
                s = s.rest
            else:
                raise TypeError(s)

    for d in decls:
        if isinstance(d, TypeDecl):
            if isinstance(d.body, StructBody):
                for _, t in d.body.fields:
                    ty(t)
        else:
            for _, t in d.params:
                ty(t)
            for t in d.results:
                ty(t)
            stmt(d.body)
    return sorted(found)


def render(decls: list[GoDecl], package: str = "main") -> str:
    """Deterministic source text for the whole program."""
    parts = [f"package {package}", ""]
    imports = collect_imports(decls)
    if imports:
        parts.append("import (")
        for imp in imports:
            parts.append(f'\t"{imp}"')
        parts.append(")")
    else:
        parts.append("import (")
        parts.append(")")
    parts.append("")
    for d in decls:
        if isinstance(d, TypeDecl):
            if isinstance(d.body, InterfaceBody):
                if d.type_params:
                    parts.append(f"type {d.name}{_tparams_src(d.type_params)} interface {{}}")
                else:
                    parts.append(f"type {d.name} any")
            else:
                head = f"type {d.name}{_tparams_src(d.type_params)} struct {{"
                if not d.body.fields:
                    parts.append(head + "}")
                else:
                    parts.append(head)
                    for n, t in d.body.fields:
                        parts.append(f"\t{n} {_type_src(t)}")
                    parts.append("}")
        else:
            params = ", ".join(f"{n} {_type_src(t)}" for n, t in d.params)
            head = (
                f"func {d.name}{_tparams_src(d.type_params)}({params})"
                f"{_results_src(d.results, d.paren_results)} {{"
            )
            parts.append(head)
            parts.append(_stmt_src(d.body, 1))
            parts.append("}")
        parts.append("")
    return "\n".join(parts).rstrip("\n") + "\n"
