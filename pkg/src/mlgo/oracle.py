"""Reference interpreter: big-step, call-by-value, fuel-bounded.

This is the semantic baseline the generated code is checked against.
Clauses and equations are tried top to bottom, first match wins; when
nothing matches, evaluation fails the same way the generated code panics.
`eval_with_instances` additionally dispatches class methods through a
runtime type environment — used to cross-check dictionary elaboration, by
a mechanism that shares nothing with it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import ir
from .prelude import BUILTIN_SIGS

DEFAULT_FUEL = 10**6


class OValue:
    pass


@dataclass(frozen=True)
class OCon(OValue):
    ctor: str
    args: tuple[OValue, ...] = ()


@dataclass(frozen=True)
class OBool(OValue):
    value: bool


@dataclass(frozen=True)
class OInt(OValue):
    value: int  # arbitrary precision


@dataclass(frozen=True)
class OStr(OValue):
    value: str


@dataclass(frozen=True)
class OClosure(OValue):
    binder: str
    body: ir.Term
    env: dict = field(compare=False)
    tyenv: dict = field(compare=False, default=None)


class EvalFailure(Exception):
    pass


class MatchFailed(EvalFailure):
    pass


class OutOfFuel(EvalFailure):
    pass


class InterpreterError(Exception):
    """Broken invariant (unbound name, ill-kinded value): a bug, not a
    program outcome."""


def _builtin(name: str, args: list[OValue]) -> OValue:
    a, b = (args + [None, None])[:2]
    if name == "int_plus":
        return OInt(a.value + b.value)
    if name == "int_minus":
        return OInt(a.value - b.value)
    if name == "int_times":
        return OInt(a.value * b.value)
    if name == "int_eq":
        return OBool(a.value == b.value)
    if name == "int_le":
        return OBool(a.value <= b.value)
    if name == "int_lt":
        return OBool(a.value < b.value)
    if name == "str_append":
        return OStr(a.value + b.value)
    raise InterpreterError(f"unknown builtin {name}")


MAX_CALL_DEPTH = 1200


class Interp:
    def __init__(self, program: ir.Program, fuel: int = DEFAULT_FUEL, dynamic: bool = False):
        self.idx = program.by_name()
        self.fuel = fuel
        self.dynamic = dynamic
        self.depth = 0

    def spend(self):
        if self.fuel <= 0:
            raise OutOfFuel()
        self.fuel -= 1

    def enter(self):
        # call nesting is bounded like fuel: the host stack is finite
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise OutOfFuel()

    # -- entry points ---------------------------------------------------

    def eval(self, t: ir.Term, env: dict | None = None, tyenv: dict | None = None) -> OValue:
        env = env or {}
        tyenv = tyenv or {}
        self.spend()
        if isinstance(t, ir.Var):
            try:
                return env[t.name]
            except KeyError:
                raise InterpreterError(f"unbound variable {t.name!r}") from None
        if isinstance(t, ir.Lit):
            return OInt(t.value) if isinstance(t.value, int) else OStr(t.value)
        if isinstance(t, ir.Abs):
            return OClosure(t.binder, t.body, env, tyenv if self.dynamic else None)
        if isinstance(t, ir.Proj):
            base = self.eval(t.base, env, tyenv)
            if not isinstance(base, OCon):
                raise InterpreterError("projection from a non-record value")
            return base.args[t.index]
        if isinstance(t, ir.Case):
            scrut = self.eval(t.scrutinee, env, tyenv)
            for pat, body in t.clauses:
                bound = match(pat, scrut)
                if bound is not None:
                    return self.eval(body, {**env, **bound}, tyenv)
            raise MatchFailed()
        if isinstance(t, (ir.Ref, ir.App)):
            head, args = t, []
            while isinstance(head, ir.App):
                args.append(head.arg)
                head = head.fun
            args.reverse()
            if isinstance(head, ir.Ref):
                return self.call_ref(head, args, env, tyenv)
            f = self.eval(head, env, tyenv)
            for a in args:
                f = self.apply(f, self.eval(a, env, tyenv))
            return f
        raise InterpreterError(f"cannot evaluate {t!r}")

    def apply(self, f: OValue, v: OValue) -> OValue:
        self.spend()
        if not isinstance(f, OClosure):
            raise InterpreterError("applying a non-function value")
        self.enter()
        try:
            return self.eval(f.body, {**f.env, f.binder: v}, f.tyenv)
        finally:
            self.depth -= 1

    # -- references -------------------------------------------------------

    def call_ref(self, head: ir.Ref, args: list[ir.Term], env: dict, tyenv: dict) -> OValue:
        name = head.name
        idx = self.idx
        if name in idx.ctors:
            m = len(idx.ctor_fields(name))
            kind = "ctor"
        elif name in idx.funs:
            m = len(idx.funs[name].equations[0][0])
            kind = "fun"
        elif name in idx.consts:
            m = 0
            kind = "const"
        elif name in BUILTIN_SIGS:
            sig = BUILTIN_SIGS[name]
            m = 0
            while isinstance(sig, ir.TyFun):
                m, sig = m + 1, sig.result
            kind = "builtin"
        elif self.dynamic and name in idx.methods:
            return self.call_method(head, args, env, tyenv)
        else:
            raise InterpreterError(f"unknown reference {name!r}")

        n = len(args)
        if n < m:
            # eta-expand: a partially applied global is an ordinary closure;
            # available arguments are evaluated now (call by value)
            inner_env = dict(env)
            spine: ir.Term = ir.Ref(head.name, head.type_args)
            for i, a in enumerate(args):
                tmp = f"$a{i}"
                inner_env[tmp] = self.eval(a, env, tyenv)
                spine = ir.App(spine, ir.Var(tmp))
            fresh = [f"${i}" for i in range(m - n)]
            for v in fresh:
                spine = ir.App(spine, ir.Var(v))
            body = spine
            for v in reversed(fresh):
                body = ir.Abs(v, ir.TyVar("_"), body)
            return self.eval_closure(body, inner_env, tyenv)

        vals = [self.eval(a, env, tyenv) for a in args[:m]]
        if kind == "ctor":
            if name == "True":
                result: OValue = OBool(True)
            elif name == "False":
                result = OBool(False)
            else:
                result = OCon(name, tuple(vals))
        elif kind == "builtin":
            result = _builtin(name, vals)
        elif kind == "const":
            decl = idx.consts[name]
            result = self.eval(decl.rhs, {}, self._decl_tyenv_const(decl, head, tyenv))
        else:
            result = self.invoke(idx.funs[name], vals, head, tyenv)
        for a in args[m:]:
            result = self.apply(result, self.eval(a, env, tyenv))
        return result

    def eval_closure(self, abs_term: ir.Term, env: dict, tyenv: dict) -> OValue:
        assert isinstance(abs_term, ir.Abs)
        return OClosure(abs_term.binder, abs_term.body, env, tyenv if self.dynamic else None)

    def _decl_tyenv_const(self, decl: ir.Const, head: ir.Ref, tyenv: dict) -> dict:
        if not self.dynamic:
            return {}
        order = sorted(ir.free_ty_vars(decl.signature))
        return dict(zip(order, (self.subst(a, tyenv) for a in head.type_args)))

    def subst(self, t: ir.TypeExpr, tyenv: dict) -> ir.TypeExpr:
        return ir.subst_ty(t, tyenv) if tyenv else t

    def invoke(self, fun: ir.Fun, vals: list[OValue], head: ir.Ref, tyenv: dict) -> OValue:
        new_tyenv = {}
        if self.dynamic:
            new_tyenv = {
                v: self.subst(a, tyenv)
                for (v, _), a in zip(fun.ty_params, head.type_args)
            }
        for params, rhs in fun.equations:
            bound: dict = {}
            ok = True
            for pat, v in zip(params, vals):
                b = match(pat, v)
                if b is None:
                    ok = False
                    break
                bound.update(b)
            if ok:
                self.enter()
                try:
                    return self.eval(rhs, bound, new_tyenv)
                finally:
                    self.depth -= 1
        raise MatchFailed()

    def call_method(self, head: ir.Ref, args: list[ir.Term], env: dict, tyenv: dict) -> OValue:
        """Dynamic dispatch on the class variable's runtime instantiation."""
        cls = self.idx.methods[head.name]
        witness = self.subst(head.type_args[0], tyenv)
        if not isinstance(witness, ir.TyCon):
            raise InterpreterError(
                f"method {head.name!r} used at non-ground type {witness}"
            )
        inst = self.idx.instances.get((cls.name, witness.name))
        if inst is None:
            raise InterpreterError(f"no instance {cls.name}@{witness.name}")
        defs = dict(inst.method_defs)
        if head.name not in defs:
            raise InterpreterError(
                f"instance {cls.name}@{witness.name} lacks method {head.name!r}"
            )
        equations = defs[head.name]
        m = len(equations[0][0])
        inst_tyenv = {v: a for (v, _), a in zip(inst.ty_params, witness.args)}
        n = len(args)
        if n < m:
            fresh = [f"${i}" for i in range(m - n)]
            inner_env = dict(env)
            spine: ir.Term = ir.Ref(head.name, head.type_args)
            for i, a in enumerate(args):
                tmp = f"$a{i}"
                inner_env[tmp] = self.eval(a, env, tyenv)
                spine = ir.App(spine, ir.Var(tmp))
            for v in fresh:
                spine = ir.App(spine, ir.Var(v))
            body = spine
            for v in reversed(fresh):
                body = ir.Abs(v, ir.TyVar("_"), body)
            # the closure must remember the *caller's* type environment
            return OClosure(body.binder, body.body, inner_env, tyenv)
        vals = [self.eval(a, env, tyenv) for a in args[:m]]
        result = None
        for params, rhs in equations:
            bound: dict = {}
            ok = True
            for pat, v in zip(params, vals):
                b = match(pat, v)
                if b is None:
                    ok = False
                    break
                bound.update(b)
            if ok:
                result = self.eval(rhs, bound, inst_tyenv)
                break
        if result is None:
            raise MatchFailed()
        for a in args[m:]:
            result = self.apply(result, self.eval(a, env, tyenv))
        return result


def match(pat: ir.Pattern, v: OValue) -> dict | None:
    """Bindings if the pattern matches, None otherwise."""
    if isinstance(pat, ir.PVar):
        return {pat.name: v}
    assert isinstance(pat, ir.PCon)
    if isinstance(v, OBool):
        want = pat.ctor == ("True" if v.value else "False")
        return {} if want else None
    if not isinstance(v, OCon) or v.ctor != pat.ctor:
        return None
    bound: dict = {}
    for sp, sv in zip(pat.subpatterns, v.args):
        b = match(sp, sv)
        if b is None:
            return None
        bound.update(b)
    return bound


def evaluate(
    program: ir.Program,
    term: ir.Term,
    env: dict | None = None,
    fuel: int = DEFAULT_FUEL,
) -> OValue:
    """Evaluate a class-free term; raises MatchFailed / OutOfFuel.

    Host stack exhaustion counts as running out of fuel: both bound the
    same resource, only the unit differs."""
    try:
        return Interp(program, fuel=fuel).eval(term, env or {})
    except RecursionError:
        raise OutOfFuel() from None


def eval_with_instances(
    program: ir.Program,
    term: ir.Term,
    env: dict | None = None,
    fuel: int = DEFAULT_FUEL,
) -> OValue:
    """Evaluate a class-carrying program by runtime instance dispatch."""
    try:
        return Interp(program, fuel=fuel, dynamic=True).eval(term, env or {})
    except RecursionError:
        raise OutOfFuel() from None


def render_value(v: OValue, rename: dict[str, str] | None = None) -> str:
    """Canonical rendering: Ctor(arg1, ..., argn); integers in decimal,
    strings quoted.  Constructor names go through the export rename map
    when one is supplied."""
    if isinstance(v, OCon):
        name = rename.get(v.ctor, v.ctor) if rename else v.ctor
        if not v.args:
            return name
        return f"{name}({', '.join(render_value(a, rename) for a in v.args)})"
    if isinstance(v, OBool):
        return "true" if v.value else "false"
    if isinstance(v, OInt):
        return str(v.value)
    if isinstance(v, OStr):
        return json.dumps(v.value)
    raise InterpreterError("cannot render a closure")
