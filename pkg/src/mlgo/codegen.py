"""Translation from the class-free IR to the target fragment.

Datatypes become one struct per constructor plus (for sum types) an empty
interface; case expressions become chains of type assertions, destructor
calls and equality checks; multi-equation functions are merged and
uncurried; constants become nullary functions; adapted base types print
through a configurable template table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import go_ast as ga
from . import ir
from .dict_pass import DictProgram
from .prelude import BUILTIN_SIGS, builtin_arity

GO_KEYWORDS = {
    "break", "case", "chan", "const", "continue", "default", "defer", "else",
    "fallthrough", "for", "func", "go", "goto", "if", "import", "interface",
    "map", "package", "range", "return", "select", "struct", "switch", "type",
    "var",
}

GO_PREDECLARED = {
    "any", "bool", "byte", "comparable", "complex64", "complex128", "error",
    "float32", "float64", "int", "int8", "int16", "int32", "int64", "rune",
    "string", "uint", "uint8", "uint16", "uint32", "uint64", "uintptr",
    "true", "false", "iota", "nil", "append", "cap", "clear", "close",
    "complex", "copy", "delete", "imag", "len", "make", "max", "min", "new",
    "panic", "print", "println", "real", "recover",
}

RESERVED = GO_KEYWORDS | GO_PREDECLARED | {"big"}


class CodegenError(Exception):
    pass


# ---------------------------------------------------------------------------
# Adaptation table


@dataclass(frozen=True)
class TypeAdaptation:
    go: str
    imports: tuple[str, ...] = ()
    lit: str | None = None  # literal scheme: "int" or "str"


@dataclass(frozen=True)
class ConstAdaptation:
    template: str
    arity: int
    imports: tuple[str, ...] = ()


@dataclass
class AdaptationTable:
    types: dict[str, TypeAdaptation] = field(default_factory=dict)
    consts: dict[str, ConstAdaptation] = field(default_factory=dict)

    @staticmethod
    def empty() -> "AdaptationTable":
        return AdaptationTable()

    @staticmethod
    def default() -> "AdaptationTable":
        big = ("math/big",)
        return AdaptationTable(
            types={
                "bool": TypeAdaptation("bool"),
                "int": TypeAdaptation("*big.Int", big, lit="int"),
                "str": TypeAdaptation("string", lit="str"),
            },
            consts={
                "True": ConstAdaptation("true", 0),
                "False": ConstAdaptation("false", 0),
                "int_plus": ConstAdaptation("(new(big.Int)).Add(%1, %2)", 2, big),
                "int_minus": ConstAdaptation("(new(big.Int)).Sub(%1, %2)", 2, big),
                "int_times": ConstAdaptation("(new(big.Int)).Mul(%1, %2)", 2, big),
                "int_eq": ConstAdaptation("(%1.Cmp(%2) == 0)", 2, big),
                "int_le": ConstAdaptation("(%1.Cmp(%2) <= 0)", 2, big),
                "int_lt": ConstAdaptation("(%1.Cmp(%2) < 0)", 2, big),
                "str_append": ConstAdaptation("(%1 + %2)", 2),
            },
        )

    @staticmethod
    def load(path: str) -> "AdaptationTable":
        """The default table extended/overridden by a JSON file shaped
        {"types": {name: {"go": .., "imports": [..]}},
         "consts": {name: {"template": .., "arity": .., "imports": [..]}}}."""
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        table = AdaptationTable.default()
        for name, spec in raw.get("types", {}).items():
            table.types[name] = TypeAdaptation(
                spec["go"], tuple(spec.get("imports", ())), spec.get("lit")
            )
        for name, spec in raw.get("consts", {}).items():
            table.consts[name] = ConstAdaptation(
                spec["template"], int(spec["arity"]), tuple(spec.get("imports", ()))
            )
        return table


def apply_adaptation(table: AdaptationTable, dp: DictProgram) -> DictProgram:
    """Validate the table against the program.  Adapted declarations are
    dropped at emission; their uses print as template instantiations."""
    idx = dp.program.by_name()
    for name, entry in table.consts.items():
        declared: int | None = None
        if name in BUILTIN_SIGS:
            declared = builtin_arity(name)
        elif name in idx.funs:
            declared = len(idx.funs[name].equations[0][0])
        elif name in idx.consts:
            declared = 0
        elif name in idx.ctors:
            declared = len(idx.ctor_fields(name))
        if declared is not None and declared != entry.arity:
            raise CodegenError(
                f"adaptation arity mismatch for {name}: table says {entry.arity}, "
                f"declaration says {declared}"
            )
    return dp


# ---------------------------------------------------------------------------
# Names


def _letters(i: int) -> str:
    s = ""
    while i > 0:
        i -= 1
        s = chr(ord("a") + i % 26) + s
        i //= 26
    return s


def invented_field_names(n: int) -> list[str]:
    return ["A" + _letters(i) for i in range(n)]


class NameContext:
    """Global rename map plus fresh-name bookkeeping; exported names are
    capitalized and deduplicated in declaration order."""

    def __init__(self):
        self.used_names: set[str] = set()
        self.rename_map: dict[str, str] = {}

    def export(self, ir_name: str) -> str:
        base = ir_name[0].upper() + ir_name[1:]
        if not base[0].isalpha():
            base = "X" + base
        name = base
        while name in self.used_names or name in GO_KEYWORDS:
            name += "a"
        self.used_names.add(name)
        self.rename_map[ir_name] = name
        return name

    def go_name(self, ir_name: str) -> str:
        return self.rename_map[ir_name]


def fresh_name(base: str, taken: set[str]) -> str:
    if not base or not (base[0].isalpha() or base[0] == "_"):
        base = "v"
    if base in RESERVED:
        base = base + "_"
    name = base
    i = 0
    while name in taken or name in RESERVED:
        i += 1
        name = base + _letters(i)
    return name


# ---------------------------------------------------------------------------
# Saturation analysis


@dataclass(frozen=True)
class SaturationReport:
    head: str
    kind: str  # function | constructor | constant | adapted | method
    declared_arity: int
    dict_count: int
    actual_args: int

    @property
    def classification(self) -> str:
        if self.actual_args == self.declared_arity:
            return "exact"
        return "under" if self.actual_args < self.declared_arity else "over"


def classify_application(
    t: ir.Term, dp: DictProgram, table: AdaptationTable | None = None
) -> tuple[SaturationReport, list[ir.Term]]:
    """Spine analysis of an application (or bare reference)."""
    table = table or AdaptationTable.default()
    head, args = t, []
    while isinstance(head, ir.App):
        args.append(head.arg)
        head = head.fun
    args.reverse()
    idx = dp.program.by_name()
    if isinstance(head, ir.Proj):
        info = dp.dict_info[head.type_name]
        f = info.fields[head.index]
        if f.kind != "method":
            raise CodegenError("projection head is not a method field")
        return (
            SaturationReport(f.source_name, "method", f.method_arity, 0, len(args)),
            args,
        )
    if not isinstance(head, ir.Ref):
        raise CodegenError("application head is not a reference")
    name = head.name
    if name in idx.ctors:
        m = len(idx.ctor_fields(name))
        if len(args) > m:
            raise CodegenError(f"constructor {name} over-applied")
        return SaturationReport(name, "constructor", m, 0, len(args)), args
    if name in table.consts or name in BUILTIN_SIGS:
        if name in table.consts:
            m = table.consts[name].arity
        else:
            m = builtin_arity(name)
        return SaturationReport(name, "adapted", m, 0, len(args)), args
    if name in idx.funs:
        m = len(idx.funs[name].equations[0][0])
        r = dp.fun_dict_counts.get(name, 0)
        return SaturationReport(name, "function", m, r, len(args)), args
    if name in idx.consts:
        return SaturationReport(name, "constant", 0, 0, len(args)), args
    raise CodegenError(f"unknown reference {name!r}")


# ---------------------------------------------------------------------------
# Translator


class Translator:
    def __init__(self, dp: DictProgram, table: AdaptationTable | None = None):
        self.dp = dp
        self.table = table if table is not None else AdaptationTable.default()
        self.idx = dp.program.by_name()
        self.names = NameContext()

        # one prepass fixes every exported name deterministically
        for d in dp.decls:
            if isinstance(d, ir.Data):
                if d.name in self.table.types:
                    continue
                if len(d.ctors) > 1:
                    self.names.export(d.name)
                    for cname, _ in d.ctors:
                        self.names.export(cname)
                else:
                    go = self.names.export(d.name)
                    if d.ctors:
                        self.names.rename_map[d.ctors[0][0]] = go
            elif isinstance(d, (ir.Fun, ir.Const)):
                if d.name in self.table.consts:
                    continue
                self.names.export(d.name)
        for d in dp.decls:
            if isinstance(d, ir.Data) and d.name not in self.table.types:
                for cname, fields in d.ctors:
                    if fields:
                        # named after the constructor even when the struct
                        # carries the datatype's name
                        base = cname[0].upper() + cname[1:] + "_dest"
                        dest = base
                        while dest in self.names.used_names:
                            dest += "a"
                        self.names.used_names.add(dest)
                        self.names.rename_map[cname + "_dest"] = dest

    # -- types ------------------------------------------------------------

    def is_single_ctor(self, data: ir.Data) -> bool:
        return len(data.ctors) == 1

    def translate_type(self, t: ir.TypeExpr, tyvars: dict[str, str]) -> ga.GoType:
        if isinstance(t, ir.TyVar):
            try:
                return ga.Param(tyvars[t.name])
            except KeyError:
                raise CodegenError(f"unbound type variable '{t.name}") from None
        if isinstance(t, ir.TyFun):
            return ga.FuncType(
                (self.translate_type(t.arg, tyvars),),
                (self.translate_type(t.result, tyvars),),
            )
        assert isinstance(t, ir.TyCon)
        adapted = self.table.types.get(t.name)
        if adapted is not None:
            return ga.Raw(adapted.go, adapted.imports)
        data = self.idx.datatypes.get(t.name)
        if data is None:
            raise CodegenError(f"unknown type constructor {t.name}")
        args = tuple(self.translate_type(a, tyvars) for a in t.args)
        go = self.names.go_name(t.name)
        if self.is_single_ctor(data):
            return ga.StructRef(go, args)
        return ga.InterfaceRef(go, args)

    def method_field_type(
        self, sig: ir.TypeExpr, arity: int, tyvars: dict[str, str]
    ) -> ga.FuncType:
        params, result = ir.uncurry(sig, arity)
        return ga.FuncType(
            tuple(self.translate_type(p, tyvars) for p in params),
            (self.translate_type(result, tyvars),),
        )

    # -- datatypes ----------------------------------------------------------

    def translate_datatype(self, d: ir.Data) -> list[ga.GoDecl]:
        if d.name in self.table.types:
            return []
        tyvars = {v: v for v in d.ty_params}
        tps = tuple(d.ty_params)
        decls: list[ga.GoDecl] = []
        multi = not self.is_single_ctor(d)
        info = self.dp.dict_info.get(d.name)
        if multi:
            decls.append(ga.TypeDecl(self.names.go_name(d.name), tps, ga.InterfaceBody()))
        for cname, fields in d.ctors:
            struct_name = self.names.go_name(cname if multi else d.name)
            if info is not None:
                field_decls = tuple(
                    (
                        f.go_name,
                        self.method_field_type(ft, f.method_arity, tyvars)
                        if f.kind == "method"
                        else self.translate_type(ft, tyvars),
                    )
                    for f, ft in zip(info.fields, fields)
                )
            else:
                field_decls = tuple(
                    zip(
                        invented_field_names(len(fields)),
                        (self.translate_type(ft, tyvars) for ft in fields),
                    )
                )
            decls.append(ga.TypeDecl(struct_name, tps, ga.StructBody(field_decls)))
        if info is None:
            # dictionaries are consumed through field selection, no destructors
            for cname, fields in d.ctors:
                if not fields:
                    continue
                struct_name = self.names.go_name(cname if multi else d.name)
                struct_ref = ga.StructRef(struct_name, tuple(ga.Param(v) for v in tps))
                names = invented_field_names(len(fields))
                decls.append(
                    ga.FuncDecl(
                        self.names.go_name(cname + "_dest"),
                        tps,
                        (("p", struct_ref),),
                        tuple(self.translate_type(ft, tyvars) for ft in fields),
                        ga.Return(tuple(ga.FieldSel(ga.Var("p"), n) for n in names)),
                        paren_results=True,
                    )
                )
        return decls

    # -- declarations ---------------------------------------------------------

    def translate_program(self) -> list[ga.GoDecl]:
        decls: list[ga.GoDecl] = []
        for d in self.dp.decls:
            if isinstance(d, ir.Data):
                decls.extend(self.translate_datatype(d))
            elif isinstance(d, ir.Fun):
                if d.name in self.table.consts:
                    continue
                decls.append(self.translate_fun(d))
            elif isinstance(d, ir.Const):
                if d.name in self.table.consts:
                    continue
                decls.append(self.translate_const(d))
            else:
                raise CodegenError("classes must be elaborated before translation")
        return decls

    def translate_fun(self, d: ir.Fun) -> ga.FuncDecl:
        equations = _hoist_parameter_cases(d.equations)
        m = len(equations[0][0])
        tyvars = {v: v for v, _ in d.ty_params}
        param_tys, result_ty = ir.uncurry(d.signature, m)

        taken = set(tyvars.values())
        param_names: list[str] = []
        for i, ty in enumerate(param_tys):
            pat = equations[0][0][i]
            base = pat.name if isinstance(pat, ir.PVar) else f"x{i}"
            name = fresh_name(base, taken)
            taken.add(name)
            param_names.append(name)

        fctx = _FnCtx(self, tyvars, taken)
        go_params = tuple(
            (n, self.translate_type(t, tyvars)) for n, t in zip(param_names, param_tys)
        )
        go_result = self.translate_type(result_ty, tyvars)

        first_params, first_rhs = equations[0]
        if m == 0:
            body = fctx.stmt(first_rhs, {}, {})
        elif all(isinstance(p, ir.PVar) for p in first_params):
            # the first equation matches unconditionally: plain body, no
            # clause blocks and no panic (later equations are dead)
            renames = {p.name: n for p, n in zip(first_params, param_names)}
            tyenv = {p.name: t for p, t in zip(first_params, param_tys)}
            body = fctx.stmt(first_rhs, renames, tyenv)
        else:
            scruts = list(zip(param_names, param_tys))
            body = fctx.compile_match(scruts, list(equations), {}, {})
        return ga.FuncDecl(
            self.names.go_name(d.name),
            tuple(tyvars.values()),
            go_params,
            (go_result,),
            prune_unused(body),
        )

    def translate_const(self, d: ir.Const) -> ga.FuncDecl:
        order = sorted(ir.free_ty_vars(d.signature))
        tyvars = {v: v for v in order}
        fctx = _FnCtx(self, tyvars, set(tyvars.values()))
        return ga.FuncDecl(
            self.names.go_name(d.name),
            tuple(tyvars.values()),
            (),
            (self.translate_type(d.signature, tyvars),),
            prune_unused(fctx.stmt(d.rhs, {}, {})),
        )

    def translate_entry(
        self, term: ir.Term, name: str = "Entry", wrap: str = "stmt"
    ) -> ga.FuncDecl:
        """A closed (up to skolem type variables) call term packaged as a
        zero-parameter function, for driving the generated program.

        wrap chooses the lowering of the body: "stmt" (the default
        statement translation), "expr" (return of the expression
        translation), or "iife" (return of an immediately-invoked literal
        around the statement translation) — the last two being the two
        sides of the expression/statement equivalence."""
        order = sorted(term_ty_vars(term))
        tyvars = {v: v for v in order}
        fctx = _FnCtx(self, tyvars, set(tyvars.values()))
        result_ty = ir.term_type(term, self.idx, {})
        go_ty = self.translate_type(result_ty, tyvars)
        if wrap == "expr":
            body: ga.GoStmt = ga.Return((fctx.expr(term, {}, {}),))
        elif wrap == "iife":
            lit = ga.FuncLit((), (go_ty,), fctx.stmt(term, {}, {}))
            body = ga.Return((ga.ExprCall(lit, ()),))
        else:
            body = fctx.stmt(term, {}, {})
        return ga.FuncDecl(
            name,
            tuple(tyvars.values()),
            (),
            (go_ty,),
            prune_unused(body),
        )


def _hoist_parameter_cases(equations: tuple[ir.Equation, ...]) -> tuple[ir.Equation, ...]:
    """A single equation whose body is a tail case on one of its own
    parameter variables folds into per-clause equations, so the case form
    and the equational form of a function translate identically."""
    while len(equations) == 1:
        params, rhs = equations[0]
        if not isinstance(rhs, ir.Case) or not isinstance(rhs.scrutinee, ir.Var):
            break
        v = rhs.scrutinee.name
        pos = None
        for i, p in enumerate(params):
            if isinstance(p, ir.PVar) and p.name == v:
                pos = i
                break
        if pos is None:
            break
        if any(v in ir.free_vars(body) for _, body in rhs.clauses):
            break
        equations = tuple(
            (params[:pos] + (pat,) + params[pos + 1 :], body)
            for pat, body in rhs.clauses
        )
    return equations


class _FnCtx:
    """Per-function translation state."""

    def __init__(self, tr: Translator, tyvars: dict[str, str], taken: set[str]):
        self.tr = tr
        self.tyvars = tyvars
        self.taken = taken  # params, type params, function-scoped temporaries

    def ty(self, t: ir.TypeExpr) -> ga.GoType:
        return self.tr.translate_type(t, self.tyvars)

    def fresh(self, base: str, avoid: set[str]) -> str:
        name = fresh_name(base, self.taken | avoid)
        self.taken.add(name)
        return name

    # -- expressions --------------------------------------------------------

    def expr(self, t: ir.Term, renames: dict[str, str], tyenv: dict[str, ir.TypeExpr]) -> ga.GoExpr:
        if isinstance(t, ir.Var):
            try:
                return ga.Var(renames[t.name])
            except KeyError:
                raise CodegenError(f"unbound variable {t.name!r}") from None
        if isinstance(t, ir.Lit):
            return self.literal(t)
        if isinstance(t, ir.Abs):
            binder = self.fresh(t.binder, set(renames.values()))
            inner_renames = {**renames, t.binder: binder}
            inner_tyenv = {**tyenv, t.binder: t.binder_type}
            body_ty = ir.term_type(t.body, self.tr.idx, dict(inner_tyenv))
            return ga.FuncLit(
                ((binder, self.ty(t.binder_type)),),
                (self.ty(body_ty),),
                self.stmt(t.body, inner_renames, inner_tyenv),
            )
        if isinstance(t, ir.Case):
            case_ty = ir.term_type(t, self.tr.idx, dict(tyenv))
            lit = ga.FuncLit((), (self.ty(case_ty),), self.stmt(t, renames, tyenv))
            return ga.ExprCall(lit, ())
        if isinstance(t, (ir.Ref, ir.App, ir.Proj)):
            return self.application(t, renames, tyenv)
        raise CodegenError(f"cannot translate {t!r}")

    def literal(self, t: ir.Lit) -> ga.GoExpr:
        assert isinstance(t.type, ir.TyCon)
        entry = self.tr.table.types.get(t.type.name)
        if entry is None or entry.lit is None:
            raise CodegenError(f"no adaptation for literals of type {t.type.name}")
        op = "int_lit" if entry.lit == "int" else "str_lit"
        return ga.Prim(op, "", ga.Raw(entry.go, entry.imports), (), entry.imports, t.value)

    def application(self, t: ir.Term, renames, tyenv) -> ga.GoExpr:
        head, spine_args = t, []
        while isinstance(head, ir.App):
            spine_args.append(head.arg)
            head = head.fun
        spine_args.reverse()
        if not isinstance(head, (ir.Ref, ir.Proj)):
            # lambda application: one curried call per argument
            out: ga.GoExpr = self.expr(head, renames, tyenv)
            for a in spine_args:
                out = ga.ExprCall(out, (self.expr(a, renames, tyenv),))
            return out

        report, args = classify_application(t, self.tr.dp, self.tr.table)

        if isinstance(head, ir.Proj):
            info = self.tr.dp.dict_info[head.type_name]
            f = info.fields[head.index]
            if f.kind == "super":
                if args:
                    raise CodegenError("dictionary value applied to arguments")
                return self.dict_access(head, renames, tyenv)
            target = ga.FieldSel(self.dict_access(head.base, renames, tyenv), f.go_name)
            sig = self.projected_sig(head, tyenv)
            return self.saturate_callable(target, sig, f.method_arity, args, renames, tyenv)

        assert isinstance(head, ir.Ref)
        if report.kind == "constructor":
            return self.constructor_call(head, args, renames, tyenv)
        if report.kind == "adapted":
            return self.adapted_call(head, args, renames, tyenv)
        if report.kind == "constant":
            decl = self.tr.idx.consts[head.name]
            order = sorted(ir.free_ty_vars(decl.signature))
            tas = tuple(self.ty(a) for a in head.type_args[: len(order)])
            out: ga.GoExpr = ga.Call(self.tr.names.go_name(head.name), tas, ())
            for a in args:
                out = ga.ExprCall(out, (self.expr(a, renames, tyenv),))
            return out

        decl = self.tr.idx.funs[head.name]
        m = report.declared_arity
        tas = tuple(self.ty(a) for a in head.type_args)
        sub = {v: a for (v, _), a in zip(decl.ty_params, head.type_args)}
        sig = ir.subst_ty(decl.signature, sub)
        if len(args) >= m:
            out = ga.Call(
                self.tr.names.go_name(head.name),
                tas,
                tuple(self.expr(a, renames, tyenv) for a in args[:m]),
            )
            for a in args[m:]:
                out = ga.ExprCall(out, (self.expr(a, renames, tyenv),))
            return out
        return self.eta_expand(
            lambda exprs: ga.Call(self.tr.names.go_name(head.name), tas, tuple(exprs)),
            sig,
            m,
            args,
            renames,
            tyenv,
        )

    def dict_access(self, t: ir.Term, renames, tyenv) -> ga.GoExpr:
        """A dictionary value: parameter, superclass hop, or instance ref."""
        if isinstance(t, ir.Proj):
            info = self.tr.dp.dict_info[t.type_name]
            f = info.fields[t.index]
            if f.kind != "super":
                raise CodegenError("method value used as a dictionary")
            return ga.FieldSel(self.dict_access(t.base, renames, tyenv), f.go_name)
        return self.expr(t, renames, tyenv)

    def projected_sig(self, proj: ir.Proj, tyenv) -> ir.TypeExpr:
        base_ty = ir.term_type(proj.base, self.tr.idx, dict(tyenv))
        assert isinstance(base_ty, ir.TyCon)
        data = self.tr.idx.datatypes[proj.type_name]
        sub = dict(zip(data.ty_params, base_ty.args))
        return ir.subst_ty(data.ctors[0][1][proj.index], sub)

    def saturate_callable(
        self, target: ga.GoExpr, sig: ir.TypeExpr, m: int, args, renames, tyenv
    ) -> ga.GoExpr:
        if len(args) >= m:
            out: ga.GoExpr = ga.ExprCall(
                target, tuple(self.expr(a, renames, tyenv) for a in args[:m])
            )
            for a in args[m:]:
                out = ga.ExprCall(out, (self.expr(a, renames, tyenv),))
            return out
        return self.eta_expand(
            lambda exprs: ga.ExprCall(target, tuple(exprs)), sig, m, args, renames, tyenv
        )

    def adapted_call(self, head: ir.Ref, args, renames, tyenv) -> ga.GoExpr:
        name = head.name
        entry = self.tr.table.consts.get(name)
        if entry is None:
            raise CodegenError(f"no adaptation for {name}")
        if name in BUILTIN_SIGS:
            sig: ir.TypeExpr = BUILTIN_SIGS[name]
        elif name in self.tr.idx.funs:
            decl = self.tr.idx.funs[name]
            sub = {v: a for (v, _), a in zip(decl.ty_params, head.type_args)}
            sig = ir.subst_ty(decl.signature, sub)
        elif name in self.tr.idx.consts:
            sig = self.tr.idx.consts[name].signature
        else:
            raise CodegenError(f"adapted name {name} has no known signature")
        m = entry.arity
        _, result = ir.uncurry(sig, m)

        def build(exprs: list[ga.GoExpr]) -> ga.GoExpr:
            value = (name == "True") if name in ("True", "False") else None
            op = "bool_lit" if name in ("True", "False") else name
            return ga.Prim(op, entry.template, self.ty(result), tuple(exprs), entry.imports, value)

        if len(args) >= m:
            out = build([self.expr(a, renames, tyenv) for a in args[:m]])
            for a in args[m:]:
                out = ga.ExprCall(out, (self.expr(a, renames, tyenv),))
            return out
        return self.eta_expand(build, sig, m, args, renames, tyenv)

    def constructor_call(self, head: ir.Ref, args, renames, tyenv) -> ga.GoExpr:
        name = head.name
        if name in self.tr.table.consts:
            return self.adapted_ctor(head, args, renames, tyenv)
        data, ctor_i = self.tr.idx.ctors[name]
        m = len(data.ctors[ctor_i][1])
        sub = dict(zip(data.ty_params, head.type_args))
        tas = tuple(self.ty(a) for a in head.type_args)
        multi = len(data.ctors) > 1
        struct_name = self.tr.names.go_name(name if multi else data.name)
        info = self.tr.dp.dict_info.get(data.name)

        def build(exprs: list[ga.GoExpr]) -> ga.GoExpr:
            lit = ga.StructLit(struct_name, tas, tuple(exprs))
            if multi:
                return ga.TypeConv(
                    ga.InterfaceRef(self.tr.names.go_name(data.name), tas), lit
                )
            return lit

        if len(args) == m:
            if info is not None:
                vals = [
                    self.dict_field_value(data, i, a, sub, renames, tyenv)
                    for i, a in enumerate(args)
                ]
            else:
                vals = [self.expr(a, renames, tyenv) for a in args]
            return build(vals)
        # under-applied constructor
        sig: ir.TypeExpr = ir.TyCon(data.name, head.type_args)
        for ft in reversed(data.ctors[ctor_i][1]):
            sig = ir.TyFun(ir.subst_ty(ft, sub), sig)
        return self.eta_expand(build, sig, m, args, renames, tyenv)

    def adapted_ctor(self, head: ir.Ref, args, renames, tyenv) -> ga.GoExpr:
        name = head.name
        entry = self.tr.table.consts[name]
        data, ctor_i = self.tr.idx.ctors[name]
        sub = dict(zip(data.ty_params, head.type_args))
        sig: ir.TypeExpr = ir.TyCon(data.name, head.type_args)
        for ft in reversed(data.ctors[ctor_i][1]):
            sig = ir.TyFun(ir.subst_ty(ft, sub), sig)
        m = entry.arity
        _, result = ir.uncurry(sig, m)

        def build(exprs: list[ga.GoExpr]) -> ga.GoExpr:
            value = (name == "True") if name in ("True", "False") else None
            op = "bool_lit" if name in ("True", "False") else name
            return ga.Prim(op, entry.template, self.ty(result), tuple(exprs), entry.imports, value)

        if len(args) >= m:
            return build([self.expr(a, renames, tyenv) for a in args])
        return self.eta_expand(build, sig, m, args, renames, tyenv)

    def dict_field_value(
        self, data: ir.Data, index: int, arg: ir.Term, sub, renames, tyenv
    ) -> ga.GoExpr:
        """Method fields hold uncurried functions; wrap the supplied
        (curried) value in an adapter literal of the declared shape."""
        info = self.tr.dp.dict_info[data.name]
        f = info.fields[index]
        if f.kind == "super":
            return self.expr(arg, renames, tyenv)
        k = f.method_arity
        sig = ir.subst_ty(data.ctors[0][1][index], sub)
        params, result = ir.uncurry(sig, k)
        inner_renames = dict(renames)
        inner_tyenv = dict(tyenv)
        fresh: list[tuple[str, ir.TypeExpr]] = []
        for i, pty in enumerate(params):
            pname = self.fresh(_eta_base(i), set(inner_renames.values()))
            fresh.append((pname, pty))
            inner_renames[pname] = pname
            inner_tyenv[pname] = pty
        spine = arg
        for pname, _ in fresh:
            spine = ir.App(spine, ir.Var(pname))
        body = ga.Return((self.expr(spine, inner_renames, inner_tyenv),))
        return ga.FuncLit(
            tuple((n, self.ty(t)) for n, t in fresh),
            (self.ty(result),),
            body,
        )

    def eta_expand(self, build, sig: ir.TypeExpr, m: int, args, renames, tyenv) -> ga.GoExpr:
        """Missing arguments become nested single-parameter literals of
        depth m - n."""
        n = len(args)
        outer_exprs = [self.expr(a, renames, tyenv) for a in args]
        param_tys, _ = ir.uncurry(sig, m)
        missing = param_tys[n:]
        live = set(renames.values())
        fresh: list[tuple[str, ir.TypeExpr]] = []
        for i, ty in enumerate(missing):
            fresh.append((self.fresh(_eta_base(i), live), ty))
        inner = build(outer_exprs + [ga.Var(nm) for nm, _ in fresh])
        # curried result types for each literal level
        chain: list[ir.TypeExpr] = []
        t = sig
        for _ in range(n):
            assert isinstance(t, ir.TyFun)
            t = t.result
        for _ in missing:
            assert isinstance(t, ir.TyFun)
            chain.append(t.result)
            t = t.result
        out: ga.GoExpr = inner
        for i in reversed(range(len(missing))):
            nm, ty = fresh[i]
            out = ga.FuncLit(
                ((nm, self.ty(ty)),), (self.ty(chain[i]),), ga.Return((out,))
            )
        return out

    # -- statements -----------------------------------------------------------

    def stmt(self, t: ir.Term, renames, tyenv) -> ga.GoStmt:
        if isinstance(t, ir.Case):
            scrut = t.scrutinee
            if isinstance(scrut, ir.Var):
                scrut_name = renames[scrut.name]
                pre = None
            else:
                scrut_name = self.fresh("s", set(renames.values()))
                pre = ga.VarDecl((scrut_name,), self.expr(scrut, renames, tyenv), None)
            rows = [((pat,), body) for pat, body in t.clauses]
            chain = self.compile_match([(scrut_name, t.scrutinee_type)], rows, renames, tyenv)
            if pre is not None:
                chain = ga.VarDecl((scrut_name,), pre.rhs, chain)
            return chain
        return ga.Return((self.expr(t, renames, tyenv),))

    # -- pattern compilation ----------------------------------------------------

    def compile_match(self, scrutinees, rows, renames, tyenv) -> ga.GoStmt:
        """One block per row in order, then the catch-all panic."""
        chain: ga.GoStmt = ga.Panic("match failed")
        for patterns, rhs in reversed(rows):
            clause = _Clause(self, renames, tyenv)
            goals = [
                (scrut, pat, ty)
                for (scrut, ty), pat in zip(scrutinees, patterns)
            ]
            chain = ga.Block(clause.lower(goals, rhs), chain)
        return chain


def _eta_base(i: int) -> str:
    return chr(ord("a") + i % 26) + ("" if i < 26 else str(i // 26))


class _Clause:
    """Lowers one clause/equation row, with clause-local fresh-name pools:
    assertion temporaries cycle q, r, s, ...; equality temporaries c, d,
    e, ...; invented names for proper subpatterns p, q, r, ... allocated
    right to left within one destructuring."""

    ASSERT_POOL = "qrstuvwxyzo"
    EQ_POOL = "cdefghijkl"
    SUBPAT_POOL = "pqrstuvwxyz"

    def __init__(self, fctx: _FnCtx, renames, tyenv):
        self.f = fctx
        self.renames = dict(renames)
        self.tyenv = dict(tyenv)
        self.taken: set[str] = set(fctx.taken) | set(renames.values())
        self.desired: set[str] = set()
        self.rhs_free: set[str] = set()

    def alloc_pool(self, pool: str) -> str:
        for i in range(len(pool) * 8):
            cand = pool[i % len(pool)] + "a" * (i // len(pool))
            if cand not in self.taken and cand not in self.desired and cand not in RESERVED:
                self.taken.add(cand)
                return cand
        raise CodegenError("fresh-name pool exhausted")

    def alloc_binder(self, v: str) -> str:
        name = fresh_name(v, self.taken)
        self.taken.add(name)
        return name

    def ok_flag(self) -> str:
        if "m" not in self.desired and "m" not in self.f.taken and "m" not in self.renames.values():
            return "m"
        return self.alloc_pool("nml")

    def lower(self, goals: list, rhs: ir.Term) -> ga.GoStmt:
        for _, pat, _ in goals:
            self.desired.update(ir.pattern_vars(pat))
        self.rhs_free = ir.free_vars(rhs)
        return self.lower_goals(goals, rhs)

    def lower_goals(self, goals: list, rhs: ir.Term) -> ga.GoStmt:
        binds: list[tuple[str, str]] = []
        eq_conds: list[ga.GoExpr] = []
        propers: list[tuple[str, ir.PCon, ir.TypeExpr]] = []
        for scrut, pat, ty in goals:
            if isinstance(pat, ir.PVar):
                if pat.name not in self.rhs_free:
                    continue
                if pat.name == scrut:
                    self.renames[pat.name] = scrut
                else:
                    target = self.alloc_binder(pat.name)
                    binds.append((target, scrut))
                    self.renames[pat.name] = target
                self.tyenv[pat.name] = ty
            else:
                assert isinstance(pat, ir.PCon)
                if pat.subpatterns:
                    propers.append((scrut, pat, ty))
                else:
                    eq_conds.append(ga.Eq(ga.Var(scrut), self.ctor_value(pat, ty)))

        inner = self.descend(propers, rhs)
        if eq_conds:
            cond = eq_conds[0]
            for c in eq_conds[1:]:
                cond = ga.And(cond, c)
            inner = ga.If(cond, inner, None)
        for target, source in reversed(binds):
            inner = ga.VarDecl((target,), ga.Var(source), inner)
        return inner

    def ctor_value(self, pat: ir.PCon, ty: ir.TypeExpr) -> ga.GoExpr:
        f = self.f
        name = pat.ctor
        if name in f.tr.table.consts:
            entry = f.tr.table.consts[name]
            value = (name == "True") if name in ("True", "False") else None
            op = "bool_lit" if name in ("True", "False") else name
            return ga.Prim(op, entry.template, f.ty(ty), (), entry.imports, value)
        data, _ = f.tr.idx.ctors[name]
        tas = tuple(f.ty(a) for a in pat.type_args)
        multi = len(data.ctors) > 1
        struct_name = f.tr.names.go_name(name if multi else data.name)
        lit = ga.StructLit(struct_name, tas, ())
        if multi:
            return ga.TypeConv(ga.InterfaceRef(f.tr.names.go_name(data.name), tas), lit)
        return lit

    def descend(self, propers: list, rhs: ir.Term) -> ga.GoStmt:
        if not propers:
            return self.f.stmt(rhs, self.renames, self.tyenv)
        (scrut, pat, ty), rest = propers[0], propers[1:]
        f = self.f
        data, ctor_i = f.tr.idx.ctors[pat.ctor]
        if data.name in f.tr.table.types:
            raise CodegenError(
                f"patterns over adapted type {data.name} must be variables"
            )
        fields = data.ctors[ctor_i][1]
        sub = dict(zip(data.ty_params, pat.type_args))
        field_tys = [ir.subst_ty(ft, sub) for ft in fields]
        multi = len(data.ctors) > 1

        # allocate destructuring names; invented temporaries right to left
        names: list[str] = ["_"] * len(fields)
        for i in reversed(range(len(fields))):
            sp = pat.subpatterns[i]
            if isinstance(sp, ir.PCon):
                pool = self.SUBPAT_POOL if sp.subpatterns else self.EQ_POOL
                names[i] = self.alloc_pool(pool)
        subgoals: list = []
        for i, sp in enumerate(pat.subpatterns):
            if isinstance(sp, ir.PVar):
                if sp.name in self.rhs_free:
                    target = self.alloc_binder(sp.name)
                    self.renames[sp.name] = target
                    self.tyenv[sp.name] = field_tys[i]
                    names[i] = target
            else:
                subgoals.append((names[i], sp, field_tys[i]))

        need_destructure = bool(fields) and any(n != "_" for n in names)
        tas = tuple(f.ty(a) for a in pat.type_args)

        if multi:
            value_name = self.alloc_pool(self.ASSERT_POOL) if need_destructure else "_"
            inner = self.lower_goals(subgoals + rest, rhs)
            asserted = ga.StructRef(f.tr.names.go_name(pat.ctor), tas)
            if need_destructure:
                dest = f.tr.names.go_name(pat.ctor + "_dest")
                inner = ga.VarDecl(
                    tuple(names),
                    ga.Call(dest, tas, (ga.Var(value_name),), elide_type_args=True),
                    inner,
                )
            ok = self.ok_flag()
            return ga.TypeAssert(
                value_name, ok, ga.Var(scrut), asserted, ga.If(ga.Var(ok), inner, None)
            )
        inner = self.lower_goals(subgoals + rest, rhs)
        if need_destructure:
            dest = f.tr.names.go_name(pat.ctor + "_dest")
            inner = ga.VarDecl(
                tuple(names),
                ga.Call(dest, tas, (ga.Var(scrut),), elide_type_args=True),
                inner,
            )
        return inner


# ---------------------------------------------------------------------------
# Unused-binding pruning.  Usedness is approximated at the IR level while
# lowering; a variable's only use can disappear when a case over it keeps
# no reference (all clauses being unused variable patterns).  Go rejects
# unused `:=` variables, so a post-pass rewrites never-read names to `_`,
# drops bindings that become pure no-ops, and keeps effectful right-hand
# sides as discard assignments.


def _expr_uses(e: ga.GoExpr, acc: set[str]):
    if isinstance(e, ga.Var):
        acc.add(e.name)
    elif isinstance(e, ga.Call):
        for a in e.args:
            _expr_uses(a, acc)
    elif isinstance(e, ga.StructLit):
        for a in e.field_values:
            _expr_uses(a, acc)
    elif isinstance(e, ga.FuncLit):
        _stmt_uses(e.body, acc)
    elif isinstance(e, ga.FieldSel):
        _expr_uses(e.target, acc)
    elif isinstance(e, ga.TypeConv):
        _expr_uses(e.inner, acc)
    elif isinstance(e, ga.ExprCall):
        _expr_uses(e.target, acc)
        for a in e.args:
            _expr_uses(a, acc)
    elif isinstance(e, (ga.Eq, ga.And)):
        _expr_uses(e.lhs, acc)
        _expr_uses(e.rhs, acc)
    elif isinstance(e, ga.Prim):
        for a in e.args:
            _expr_uses(a, acc)


def _stmt_uses(s: ga.GoStmt | None, acc: set[str]):
    while s is not None:
        if isinstance(s, ga.Return):
            for e in s.exprs:
                _expr_uses(e, acc)
            return
        if isinstance(s, ga.Panic):
            return
        if isinstance(s, ga.VarDecl):
            _expr_uses(s.rhs, acc)
            s = s.rest
        elif isinstance(s, ga.TypeAssert):
            _expr_uses(s.target, acc)
            s = s.rest
        elif isinstance(s, ga.If):
            _expr_uses(s.cond, acc)
            _stmt_uses(s.then, acc)
            s = s.rest
        elif isinstance(s, ga.Block):
            _stmt_uses(s.inner, acc)
            s = s.rest
        else:
            raise TypeError(s)


def _pure_expr(e: ga.GoExpr) -> bool:
    """Safe to drop entirely: cannot panic, diverge or allocate observably.
    Destructor calls carry the elide flag and only read fields."""
    if isinstance(e, (ga.Var, ga.Nil)):
        return True
    if isinstance(e, ga.Call):
        return e.elide_type_args and all(_pure_expr(a) for a in e.args)
    if isinstance(e, ga.FieldSel):
        return _pure_expr(e.target)
    if isinstance(e, (ga.StructLit, ga.TypeConv)):
        inner = e.field_values if isinstance(e, ga.StructLit) else (e.inner,)
        return all(_pure_expr(a) for a in inner)
    if isinstance(e, ga.FuncLit):
        return True
    return False


def _prune_expr(e: ga.GoExpr) -> ga.GoExpr:
    if isinstance(e, ga.FuncLit):
        return ga.FuncLit(e.params, e.results, prune_unused(e.body))
    if isinstance(e, ga.Call):
        return ga.Call(
            e.func_name, e.type_args, tuple(_prune_expr(a) for a in e.args), e.elide_type_args
        )
    if isinstance(e, ga.StructLit):
        return ga.StructLit(e.type_name, e.type_args, tuple(_prune_expr(a) for a in e.field_values))
    if isinstance(e, ga.FieldSel):
        return ga.FieldSel(_prune_expr(e.target), e.field_name)
    if isinstance(e, ga.TypeConv):
        return ga.TypeConv(e.to_interface, _prune_expr(e.inner))
    if isinstance(e, ga.ExprCall):
        return ga.ExprCall(_prune_expr(e.target), tuple(_prune_expr(a) for a in e.args))
    if isinstance(e, ga.Eq):
        return ga.Eq(_prune_expr(e.lhs), _prune_expr(e.rhs))
    if isinstance(e, ga.And):
        return ga.And(_prune_expr(e.lhs), _prune_expr(e.rhs))
    if isinstance(e, ga.Prim):
        return ga.Prim(e.op, e.template, e.go_type, tuple(_prune_expr(a) for a in e.args), e.imports, e.value)
    return e


def prune_unused(s: ga.GoStmt | None) -> ga.GoStmt | None:
    if s is None:
        return None
    if isinstance(s, ga.Return):
        return ga.Return(tuple(_prune_expr(e) for e in s.exprs))
    if isinstance(s, ga.Panic):
        return s
    if isinstance(s, ga.VarDecl):
        rest = prune_unused(s.rest)
        rhs = _prune_expr(s.rhs)
        used: set[str] = set()
        _stmt_uses(rest, used)
        names = tuple(n if n in used else "_" for n in s.names)
        if all(n == "_" for n in names) and _pure_expr(rhs):
            return rest
        return ga.VarDecl(names, rhs, rest)
    if isinstance(s, ga.TypeAssert):
        rest = prune_unused(s.rest)
        used = set()
        _stmt_uses(rest, used)
        value = s.value_name if s.value_name in used else "_"
        ok = s.ok_name if s.ok_name in used else "_"
        return ga.TypeAssert(value, ok, _prune_expr(s.target), s.asserted, rest)
    if isinstance(s, ga.If):
        return ga.If(_prune_expr(s.cond), prune_unused(s.then), prune_unused(s.rest))
    if isinstance(s, ga.Block):
        return ga.Block(prune_unused(s.inner), prune_unused(s.rest))
    raise TypeError(s)


def term_ty_vars(t: ir.Term) -> set[str]:
    """Type variables occurring in a term's annotations."""
    out: set[str] = set()

    def pat(p: ir.Pattern):
        if isinstance(p, ir.PCon):
            for a in p.type_args:
                out.update(ir.free_ty_vars(a))
            for s in p.subpatterns:
                pat(s)

    def walk(t: ir.Term):
        if isinstance(t, ir.Ref):
            for a in t.type_args:
                out.update(ir.free_ty_vars(a))
        elif isinstance(t, ir.App):
            walk(t.fun)
            walk(t.arg)
        elif isinstance(t, ir.Abs):
            out.update(ir.free_ty_vars(t.binder_type))
            walk(t.body)
        elif isinstance(t, ir.Case):
            walk(t.scrutinee)
            out.update(ir.free_ty_vars(t.scrutinee_type))
            for p, b in t.clauses:
                pat(p)
                walk(b)
        elif isinstance(t, ir.Proj):
            walk(t.base)

    walk(t)
    return out
