"""Intermediate representation: a small typed functional language.

A program is a flat list of declarations (datatypes, multi-equation
functions, classes, instances, constants).  Terms are lambda calculus plus
case expressions, fully type-annotated at binders, scrutinees and
references.  Everything here is immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Types


class TypeExpr:
    pass


@dataclass(frozen=True)
class TyVar(TypeExpr):
    name: str

    def __str__(self):
        return f"'{self.name}"


@dataclass(frozen=True)
class TyCon(TypeExpr):
    name: str
    args: tuple[TypeExpr, ...] = ()

    def __str__(self):
        if not self.args:
            return self.name
        if len(self.args) == 1:
            return f"{_paren_ty(self.args[0])} {self.name}"
        inner = ", ".join(str(a) for a in self.args)
        return f"({inner}) {self.name}"


@dataclass(frozen=True)
class TyFun(TypeExpr):
    arg: TypeExpr
    result: TypeExpr

    def __str__(self):
        return f"{_paren_ty(self.arg)} => {self.result}"


def _paren_ty(t: TypeExpr) -> str:
    if isinstance(t, TyFun) or (isinstance(t, TyCon) and t.args):
        return f"({t})"
    return str(t)


@dataclass(frozen=True)
class Constraint:
    var: str
    class_name: str


# ---------------------------------------------------------------------------
# Terms and patterns


class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Ref(Term):
    """Reference to a top-level function, constructor, constant or method.

    type_args instantiate the referee's type parameters, in declaration
    order; the elaborator fills them in.
    """

    name: str
    type_args: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Abs(Term):
    binder: str
    binder_type: TypeExpr
    body: Term


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    scrutinee_type: TypeExpr
    clauses: tuple[tuple["Pattern", Term], ...]


@dataclass(frozen=True)
class Lit(Term):
    """Integer or string literal of an adapted base type."""

    value: object
    type: TypeExpr


@dataclass(frozen=True)
class Proj(Term):
    """Field projection out of a single-constructor value.

    Only produced by dictionary elaboration (superclass hops and method
    selection); never written in source programs.
    """

    base: Term
    type_name: str
    index: int


class Pattern:
    pass


@dataclass(frozen=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True)
class PCon(Pattern):
    ctor: str
    type_args: tuple[TypeExpr, ...] = ()
    subpatterns: tuple[Pattern, ...] = ()


def pattern_vars(p: Pattern) -> list[str]:
    if isinstance(p, PVar):
        return [p.name]
    out: list[str] = []
    for s in p.subpatterns:
        out.extend(pattern_vars(s))
    return out


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.binder}
    if isinstance(t, Case):
        out = free_vars(t.scrutinee)
        for pat, body in t.clauses:
            out |= free_vars(body) - set(pattern_vars(pat))
        return out
    if isinstance(t, Proj):
        return free_vars(t.base)
    return set()


# ---------------------------------------------------------------------------
# Declarations

Equation = tuple[tuple[Pattern, ...], Term]


@dataclass(frozen=True)
class Data:
    name: str
    ty_params: tuple[str, ...]
    ctors: tuple[tuple[str, tuple[TypeExpr, ...]], ...]


@dataclass(frozen=True)
class Fun:
    name: str
    ty_params: tuple[tuple[str, tuple[Constraint, ...]], ...]
    signature: TypeExpr
    equations: tuple[Equation, ...]


@dataclass(frozen=True)
class Class:
    name: str
    ty_param: str
    superclasses: tuple[str, ...]
    methods: tuple[tuple[str, TypeExpr], ...]


@dataclass(frozen=True)
class Instance:
    class_name: str
    ty_con_name: str
    ty_params: tuple[tuple[str, tuple[Constraint, ...]], ...]
    method_defs: tuple[tuple[str, tuple[Equation, ...]], ...]


@dataclass(frozen=True)
class Const:
    name: str
    signature: TypeExpr
    rhs: Term


Declaration = Data | Fun | Class | Instance | Const


@dataclass(frozen=True)
class Program:
    decls: tuple[Declaration, ...]

    def by_name(self) -> "ProgramIndex":
        return ProgramIndex(self)


@dataclass(frozen=True)
class Diagnostic:
    decl: str
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind} in {self.decl}: {self.message}"


class UnknownName(Exception):
    pass


# ---------------------------------------------------------------------------
# Name index

ARROW_T = "->"


class ProgramIndex:
    """Lookup tables over one program; built once, read everywhere."""

    def __init__(self, program: Program):
        self.program = program
        self.datatypes: dict[str, Data] = {}
        self.ctors: dict[str, tuple[Data, int]] = {}
        self.funs: dict[str, Fun] = {}
        self.consts: dict[str, Const] = {}
        self.classes: dict[str, Class] = {}
        self.instances: dict[tuple[str, str], Instance] = {}
        self.methods: dict[str, Class] = {}
        for d in program.decls:
            if isinstance(d, Data):
                self.datatypes[d.name] = d
                for i, (cname, _) in enumerate(d.ctors):
                    self.ctors[cname] = (d, i)
            elif isinstance(d, Fun):
                self.funs[d.name] = d
            elif isinstance(d, Const):
                self.consts[d.name] = d
            elif isinstance(d, Class):
                self.classes[d.name] = d
                for mname, _ in d.methods:
                    self.methods[mname] = d
            elif isinstance(d, Instance):
                self.instances[(d.class_name, d.ty_con_name)] = d

    def ctor_fields(self, cname: str) -> tuple[TypeExpr, ...]:
        data, i = self.ctors[cname]
        return data.ctors[i][1]

    def method_sig(self, mname: str) -> TypeExpr:
        cls = self.methods[mname]
        return dict(cls.methods)[mname]


def arity(p: Program, name: str) -> int:
    """Argument count of a function, constant or constructor."""
    idx = p.by_name() if not isinstance(p, ProgramIndex) else p
    if name in idx.funs:
        return len(idx.funs[name].equations[0][0])
    if name in idx.consts:
        return 0
    if name in idx.ctors:
        return len(idx.ctor_fields(name))
    raise UnknownName(name)


def uncurry(sig: TypeExpr, n: int) -> tuple[list[TypeExpr], TypeExpr]:
    """Split the first n arrows off a signature."""
    params: list[TypeExpr] = []
    t = sig
    for _ in range(n):
        assert isinstance(t, TyFun), f"signature too short: {sig}"
        params.append(t.arg)
        t = t.result
    return params, t


def subst_ty(t: TypeExpr, env: dict[str, TypeExpr]) -> TypeExpr:
    if isinstance(t, TyVar):
        return env.get(t.name, t)
    if isinstance(t, TyCon):
        return TyCon(t.name, tuple(subst_ty(a, env) for a in t.args))
    if isinstance(t, TyFun):
        return TyFun(subst_ty(t.arg, env), subst_ty(t.result, env))
    raise TypeError(t)


def free_ty_vars(t: TypeExpr) -> set[str]:
    if isinstance(t, TyVar):
        return {t.name}
    if isinstance(t, TyCon):
        out: set[str] = set()
        for a in t.args:
            out |= free_ty_vars(a)
        return out
    if isinstance(t, TyFun):
        return free_ty_vars(t.arg) | free_ty_vars(t.result)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Validation


def validate(p: Program) -> list[Diagnostic]:
    """Structural well-formedness; returns [] iff the program is valid."""
    diags: list[Diagnostic] = []
    idx = ProgramIndex(p)

    seen: set[str] = set()
    for d in p.decls:
        names = [d.name] if not isinstance(d, Instance) else [
            f"{d.class_name}@{d.ty_con_name}"
        ]
        if isinstance(d, Data):
            names += [c for c, _ in d.ctors]
        if isinstance(d, Class):
            names += [m for m, _ in d.methods]
        for n in names:
            if n in seen:
                diags.append(Diagnostic(n, "DuplicateName", f"{n} declared twice"))
            seen.add(n)

    def check_ty(t: TypeExpr, bound: set[str], decl: str):
        if isinstance(t, TyVar):
            if t.name not in bound:
                diags.append(
                    Diagnostic(decl, "UnboundTypeVar", f"'{t.name} is not bound")
                )
        elif isinstance(t, TyCon):
            data = idx.datatypes.get(t.name)
            if data is None:
                diags.append(Diagnostic(decl, "UnknownTypeCon", t.name))
            elif len(t.args) != len(data.ty_params):
                diags.append(
                    Diagnostic(
                        decl,
                        "TypeArityMismatch",
                        f"{t.name} expects {len(data.ty_params)} args, got {len(t.args)}",
                    )
                )
            for a in t.args:
                check_ty(a, bound, decl)
        elif isinstance(t, TyFun):
            check_ty(t.arg, bound, decl)
            check_ty(t.result, bound, decl)

    def check_pattern(pat: Pattern, decl: str):
        if isinstance(pat, PCon):
            if pat.ctor not in idx.ctors:
                diags.append(Diagnostic(decl, "UnknownCtor", pat.ctor))
            else:
                want = len(idx.ctor_fields(pat.ctor))
                if len(pat.subpatterns) != want:
                    diags.append(
                        Diagnostic(
                            decl,
                            "CtorArityMismatch",
                            f"{pat.ctor} has {want} fields, pattern has "
                            f"{len(pat.subpatterns)}",
                        )
                    )
            for s in pat.subpatterns:
                check_pattern(s, decl)

    def check_rows(eqs: tuple[Equation, ...], decl: str):
        arities = {len(params) for params, _ in eqs}
        if len(arities) > 1:
            diags.append(
                Diagnostic(decl, "EquationArityMismatch", f"parameter counts {sorted(arities)}")
            )
        for params, rhs in eqs:
            vars_bound: list[str] = []
            for pat in params:
                check_pattern(pat, decl)
                vars_bound.extend(pattern_vars(pat))
            dupes = {v for v in vars_bound if vars_bound.count(v) > 1}
            for v in sorted(dupes):
                diags.append(
                    Diagnostic(decl, "NonLinearPattern", f"{v} bound more than once")
                )
            check_term(rhs, decl)

    def check_term(t: Term, decl: str):
        if isinstance(t, Case):
            if not t.clauses:
                diags.append(Diagnostic(decl, "EmptyCase", "case with no clauses"))
            check_term(t.scrutinee, decl)
            for pat, body in t.clauses:
                check_pattern(pat, decl)
                vs = pattern_vars(pat)
                for v in sorted({v for v in vs if vs.count(v) > 1}):
                    diags.append(
                        Diagnostic(decl, "NonLinearPattern", f"{v} bound more than once")
                    )
                check_term(body, decl)
        elif isinstance(t, App):
            check_term(t.fun, decl)
            check_term(t.arg, decl)
        elif isinstance(t, Abs):
            check_term(t.body, decl)
        elif isinstance(t, Proj):
            check_term(t.base, decl)

    for d in p.decls:
        if isinstance(d, Data):
            bound = set(d.ty_params)
            for cname, fields in d.ctors:
                for ft in fields:
                    check_ty(ft, bound, d.name)
        elif isinstance(d, Fun):
            bound = {v for v, _ in d.ty_params}
            check_ty(d.signature, bound, d.name)
            for v, cs in d.ty_params:
                for c in cs:
                    if c.class_name not in idx.classes:
                        diags.append(Diagnostic(d.name, "UnknownClass", c.class_name))
            check_rows(d.equations, d.name)
        elif isinstance(d, Class):
            for s in d.superclasses:
                if s not in idx.classes:
                    diags.append(Diagnostic(d.name, "UnknownClass", s))
            for mname, sig in d.methods:
                check_ty(sig, {d.ty_param} | free_ty_vars(sig), d.name)
        elif isinstance(d, Instance):
            decl_name = f"{d.class_name}@{d.ty_con_name}"
            if d.class_name not in idx.classes:
                diags.append(Diagnostic(decl_name, "UnknownClass", d.class_name))
            if d.ty_con_name not in idx.datatypes:
                diags.append(Diagnostic(decl_name, "UnknownTypeCon", d.ty_con_name))
            for mname, eqs in d.method_defs:
                check_rows(eqs, decl_name)
        elif isinstance(d, Const):
            check_ty(d.signature, free_ty_vars(d.signature), d.name)
            check_term(d.rhs, d.name)

    return diags


def term_type(t: Term, idx: ProgramIndex, env: dict[str, TypeExpr]) -> TypeExpr:
    """Type of a fully annotated term; trusts the annotations."""
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Lit):
        return t.type
    if isinstance(t, Ref):
        if t.name in idx.funs:
            f = idx.funs[t.name]
            sub = {v: a for (v, _), a in zip(f.ty_params, t.type_args)}
            return subst_ty(f.signature, sub)
        if t.name in idx.consts:
            c = idx.consts[t.name]
            sub = dict(zip(sorted(free_ty_vars(c.signature)), t.type_args))
            return subst_ty(c.signature, sub)
        if t.name in idx.ctors:
            data, i = idx.ctors[t.name]
            sub = dict(zip(data.ty_params, t.type_args))
            out: TypeExpr = TyCon(data.name, t.type_args)
            for ft in reversed(data.ctors[i][1]):
                out = TyFun(subst_ty(ft, sub), out)
            return out
        if t.name in idx.methods:
            cls = idx.methods[t.name]
            sig = idx.method_sig(t.name)
            order = [cls.ty_param] + sorted(free_ty_vars(sig) - {cls.ty_param})
            sub = dict(zip(order, t.type_args))
            return subst_ty(sig, sub)
        raise UnknownName(t.name)
    if isinstance(t, App):
        ft = term_type(t.fun, idx, env)
        assert isinstance(ft, TyFun), f"applying non-function of type {ft}"
        return ft.result
    if isinstance(t, Abs):
        return TyFun(t.binder_type, term_type(t.body, idx, {**env, t.binder: t.binder_type}))
    if isinstance(t, Case):
        pat, body = t.clauses[0]
        benv = dict(env)
        _bind_pattern_types(pat, t.scrutinee_type, idx, benv)
        return term_type(body, idx, benv)
    if isinstance(t, Proj):
        base_ty = term_type(t.base, idx, env)
        assert isinstance(base_ty, TyCon)
        data = idx.datatypes[base_ty.name]
        sub = dict(zip(data.ty_params, base_ty.args))
        return subst_ty(data.ctors[0][1][t.index], sub)
    raise TypeError(t)


def _bind_pattern_types(
    pat: Pattern, ty: TypeExpr, idx: ProgramIndex, env: dict[str, TypeExpr]
):
    if isinstance(pat, PVar):
        env[pat.name] = ty
    else:
        assert isinstance(pat, PCon)
        data, i = idx.ctors[pat.ctor]
        sub = dict(zip(data.ty_params, pat.type_args))
        for sp, ft in zip(pat.subpatterns, data.ctors[i][1]):
            _bind_pattern_types(sp, subst_ty(ft, sub), idx, env)
