"""Dictionary elaboration: classes and instances become plain data.

Each class turns into a single-constructor datatype whose fields hold one
dictionary per superclass (declaration order) followed by one function per
method (declaration order).  Constraints on functions become leading
value parameters; instances become constants (or, when they carry
constraints themselves, functions) that build dictionary values; method
references become field projections applied to arguments.

The output carries metadata about the generated dictionary types so the
code generator can print method fields uncurried and name them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ir


class MissingInstance(Exception):
    def __init__(self, class_name: str, ty: ir.TypeExpr | str):
        super().__init__(f"no instance of {class_name} for {ty}")
        self.class_name = class_name
        self.ty = ty


class AmbiguousInstance(Exception):
    def __init__(self, class_name: str, ty_con: str):
        super().__init__(f"overlapping instances of {class_name} for {ty_con}")


def _cap(name: str) -> str:
    return name[0].upper() + name[1:] if name else name


@dataclass(frozen=True)
class DictField:
    kind: str  # "super" | "method"
    source_name: str  # superclass name or method name
    go_name: str
    method_arity: int = 0  # method fields: arrows in the class signature


@dataclass(frozen=True)
class ClassInfo:
    class_name: str
    ctor_name: str
    ty_param: str
    fields: tuple[DictField, ...]

    def field_index(self, source_name: str) -> int:
        for i, f in enumerate(self.fields):
            if f.source_name == source_name:
                return i
        raise KeyError(source_name)


@dataclass(frozen=True)
class InstancePath:
    """How one required dictionary is obtained at a call site."""

    root: str  # parameter name or instance value name
    is_param: bool
    args: tuple["InstancePath", ...] = ()  # constraint arguments of the instance
    projections: tuple[str, ...] = ()  # superclass field names, outermost first


@dataclass
class DictProgram:
    decls: tuple[ir.Declaration, ...]
    dict_info: dict[str, ClassInfo] = field(default_factory=dict)
    fun_dict_counts: dict[str, int] = field(default_factory=dict)

    @property
    def program(self) -> ir.Program:
        return ir.Program(self.decls)


def _method_arity(sig: ir.TypeExpr) -> int:
    n = 0
    while isinstance(sig, ir.TyFun):
        n += 1
        sig = sig.result
    return n


class _Elab:
    def __init__(self, p: ir.Program):
        self.idx = p.by_name()
        self.src = p
        seen: set[tuple[str, str]] = set()
        for d in p.decls:
            if isinstance(d, ir.Instance):
                key = (d.class_name, d.ty_con_name)
                if key in seen:
                    raise AmbiguousInstance(*key)
                seen.add(key)

        self.used_names = set()
        for d in p.decls:
            if isinstance(d, ir.Instance):
                continue
            self.used_names.add(d.name)
            if isinstance(d, ir.Data):
                self.used_names.update(c for c, _ in d.ctors)
            if isinstance(d, ir.Class):
                self.used_names.update(m for m, _ in d.methods)

        self.class_info: dict[str, ClassInfo] = {}
        for d in p.decls:
            if isinstance(d, ir.Class):
                fields = tuple(
                    [
                        DictField("super", s, f"{_cap(s)}_{d.name}")
                        for s in d.superclasses
                    ]
                    + [
                        DictField("method", m, _cap(m), _method_arity(sig))
                        for m, sig in d.methods
                    ]
                )
                self.class_info[d.name] = ClassInfo(d.name, self.fresh(_cap(d.name)), d.ty_param, fields)

        self.inst_names: dict[tuple[str, str], str] = {}
        self.lifted_names: dict[tuple[str, str, str], str] = {}
        for d in p.decls:
            if isinstance(d, ir.Instance):
                self.inst_names[(d.class_name, d.ty_con_name)] = self.fresh(
                    f"{d.class_name}_{d.ty_con_name}"
                )
                for m, _ in d.method_defs:
                    self.lifted_names[(d.class_name, d.ty_con_name, m)] = self.fresh(
                        f"{m}_{d.ty_con_name}_{d.class_name}"
                    )

        # dictionary argument counts of everything callable
        self.dict_counts: dict[str, int] = {}
        self.fun_constraints: dict[str, tuple[ir.Constraint, ...]] = {}
        for d in p.decls:
            if isinstance(d, ir.Fun):
                cs = tuple(c for _, cons in d.ty_params for c in cons)
                self.fun_constraints[d.name] = cs
                self.dict_counts[d.name] = len(cs)
            elif isinstance(d, ir.Instance):
                cs = tuple(c for _, cons in d.ty_params for c in cons)
                name = self.inst_names[(d.class_name, d.ty_con_name)]
                self.fun_constraints[name] = cs
                self.dict_counts[name] = len(cs)
                for m, _ in d.method_defs:
                    lname = self.lifted_names[(d.class_name, d.ty_con_name, m)]
                    self.fun_constraints[lname] = cs
                    self.dict_counts[lname] = len(cs)

    def fresh(self, base: str) -> str:
        name = base
        while name in self.used_names:
            name += "a"
        self.used_names.add(name)
        return name

    # -- constraint resolution ------------------------------------------

    def super_path(self, from_class: str, to_class: str) -> list[str] | None:
        """Field names of the shortest superclass chain, BFS in
        declaration order."""
        if from_class == to_class:
            return []
        queue: list[tuple[str, list[str]]] = [(from_class, [])]
        seen = {from_class}
        while queue:
            cls, path = queue.pop(0)
            info = self.class_info[cls]
            for f in info.fields:
                if f.kind != "super" or f.source_name in seen:
                    continue
                npath = path + [f.go_name]
                if f.source_name == to_class:
                    return npath
                seen.add(f.source_name)
                queue.append((f.source_name, npath))
        return None

    def resolve(
        self, class_name: str, ty: ir.TypeExpr, scope: list[tuple[str, ir.Constraint]]
    ) -> InstancePath:
        if isinstance(ty, ir.TyVar):
            for param, c in scope:
                if c.var != ty.name:
                    continue
                path = self.super_path(c.class_name, class_name)
                if path is not None:
                    return InstancePath(param, True, (), tuple(path))
            raise MissingInstance(class_name, ty)
        if isinstance(ty, ir.TyCon):
            inst = self.idx.instances.get((class_name, ty.name))
            if inst is None:
                raise MissingInstance(class_name, ty)
            var_pos = {v: i for i, (v, _) in enumerate(inst.ty_params)}
            args = tuple(
                self.resolve(c.class_name, ty.args[var_pos[v]], scope)
                for v, cons in inst.ty_params
                for c in cons
            )
            return InstancePath(self.inst_names[(class_name, ty.name)], False, args)
        raise MissingInstance(class_name, ty)

    # -- term rewriting ---------------------------------------------------

    def dict_type(self, c: ir.Constraint) -> ir.TypeExpr:
        return ir.TyCon(c.class_name, (ir.TyVar(c.var),))

    def rewrite(self, t: ir.Term, scope: list[tuple[str, ir.Constraint]]) -> ir.Term:
        if isinstance(t, (ir.Var, ir.Lit)):
            return t
        if isinstance(t, ir.Abs):
            return ir.Abs(t.binder, t.binder_type, self.rewrite(t.body, scope))
        if isinstance(t, ir.Case):
            return ir.Case(
                self.rewrite(t.scrutinee, scope),
                t.scrutinee_type,
                tuple((p, self.rewrite(b, scope)) for p, b in t.clauses),
            )
        if isinstance(t, (ir.App, ir.Ref)):
            head, args = t, []
            while isinstance(head, ir.App):
                args.append(head.arg)
                head = head.fun
            args.reverse()
            new_args = [self.rewrite(a, scope) for a in args]
            new_head = self.rewrite_head(head, scope) if isinstance(head, ir.Ref) else self.rewrite(head, scope)
            out = new_head
            for a in new_args:
                out = ir.App(out, a)
            return out
        raise TypeError(t)

    def rewrite_head(self, head: ir.Ref, scope: list[tuple[str, ir.Constraint]]) -> ir.Term:
        name = head.name
        if name in self.idx.methods:
            cls = self.idx.methods[name]
            witness = head.type_args[0]
            dict_term = self.constraint_term(cls.name, witness, scope)
            info = self.class_info[cls.name]
            return ir.Proj(dict_term, cls.name, info.field_index(name))
        constraints = self.fun_constraints.get(name, ())
        if not constraints:
            return head
        decl = self.idx.funs[name]
        sub = {v: a for (v, _), a in zip(decl.ty_params, head.type_args)}
        out: ir.Term = head
        for c in constraints:
            out = ir.App(out, self.constraint_term(c.class_name, ir.subst_ty(ir.TyVar(c.var), sub), scope))
        return out

    def constraint_term(
        self, class_name: str, ty: ir.TypeExpr, scope: list[tuple[str, ir.Constraint]]
    ) -> ir.Term:
        """Resolve and materialize one dictionary as a term."""
        if isinstance(ty, ir.TyVar):
            for param, c in scope:
                if c.var != ty.name:
                    continue
                path = self.super_path(c.class_name, class_name)
                if path is None:
                    continue
                t: ir.Term = ir.Var(param)
                cls = c.class_name
                for field_name in path:
                    info = self.class_info[cls]
                    idx_ = next(i for i, f in enumerate(info.fields) if f.go_name == field_name)
                    t = ir.Proj(t, cls, idx_)
                    cls = info.fields[idx_].source_name
                return t
            raise MissingInstance(class_name, ty)
        if isinstance(ty, ir.TyCon):
            inst = self.idx.instances.get((class_name, ty.name))
            if inst is None:
                raise MissingInstance(class_name, ty)
            t = ir.Ref(self.inst_names[(class_name, ty.name)], ty.args)
            var_pos = {v: i for i, (v, _) in enumerate(inst.ty_params)}
            for v, cons in inst.ty_params:
                for c in cons:
                    t = ir.App(t, self.constraint_term(c.class_name, ty.args[var_pos[v]], scope))
            return t
        raise MissingInstance(class_name, ty)

    # -- declaration rewriting ---------------------------------------------

    def dict_params(
        self, constraints: tuple[ir.Constraint, ...], avoid: set[str]
    ) -> list[tuple[str, ir.Constraint]]:
        out = []
        taken = set(avoid) | self.used_names
        for c in constraints:
            base = f"{c.var}_"
            name = base
            while name in taken:
                name += "a"
            taken.add(name)
            out.append((name, c))
        return out

    def binder_names(self, equations: tuple[ir.Equation, ...]) -> set[str]:
        names: set[str] = set()

        def term_vars(t: ir.Term):
            if isinstance(t, ir.Abs):
                names.add(t.binder)
                term_vars(t.body)
            elif isinstance(t, ir.App):
                term_vars(t.fun)
                term_vars(t.arg)
            elif isinstance(t, ir.Case):
                term_vars(t.scrutinee)
                for p, b in t.clauses:
                    names.update(ir.pattern_vars(p))
                    term_vars(b)
            elif isinstance(t, ir.Proj):
                term_vars(t.base)

        for params, rhs in equations:
            for p in params:
                names.update(ir.pattern_vars(p))
            term_vars(rhs)
        return names

    def rewrite_fun(
        self, name: str, ty_params, signature: ir.TypeExpr, equations, constraints
    ) -> ir.Fun:
        scope = self.dict_params(constraints, self.binder_names(equations))
        sig = signature
        for pname, c in reversed(scope):
            sig = ir.TyFun(self.dict_type(c), sig)
        new_eqs = tuple(
            (
                tuple(ir.PVar(pname) for pname, _ in scope) + params,
                self.rewrite(rhs, scope),
            )
            for params, rhs in equations
        )
        stripped = tuple((v, ()) for v, _ in ty_params)
        return ir.Fun(name, stripped, sig, new_eqs)


def elaborate(p: ir.Program) -> DictProgram:
    """Remove classes and instances; see the module docstring."""
    el = _Elab(p)
    out: list[ir.Declaration] = []

    for d in p.decls:
        if isinstance(d, ir.Data):
            out.append(d)
        elif isinstance(d, ir.Const):
            out.append(ir.Const(d.name, d.signature, el.rewrite(d.rhs, [])))
        elif isinstance(d, ir.Fun):
            cs = el.fun_constraints[d.name]
            if not cs:
                out.append(
                    ir.Fun(
                        d.name,
                        tuple((v, ()) for v, _ in d.ty_params),
                        d.signature,
                        tuple((ps, el.rewrite(rhs, [])) for ps, rhs in d.equations),
                    )
                )
            else:
                out.append(el.rewrite_fun(d.name, d.ty_params, d.signature, d.equations, cs))
        elif isinstance(d, ir.Class):
            info = el.class_info[d.name]
            fields: list[ir.TypeExpr] = []
            for f in info.fields:
                if f.kind == "super":
                    fields.append(ir.TyCon(f.source_name, (ir.TyVar(d.ty_param),)))
                else:
                    fields.append(dict(d.methods)[f.source_name])
            out.append(ir.Data(d.name, (d.ty_param,), ((info.ctor_name, tuple(fields)),)))
        elif isinstance(d, ir.Instance):
            cls = el.idx.classes[d.class_name]
            info = el.class_info[d.class_name]
            head = ir.TyCon(d.ty_con_name, tuple(ir.TyVar(v) for v, _ in d.ty_params))
            cs = el.fun_constraints[el.inst_names[(d.class_name, d.ty_con_name)]]
            defs = dict(d.method_defs)

            # one lifted top-level function per method definition
            lifted: dict[str, str] = {}
            for m, eqs in d.method_defs:
                lname = el.lifted_names[(d.class_name, d.ty_con_name, m)]
                lifted[m] = lname
                msig = ir.subst_ty(el.idx.method_sig(m), {cls.ty_param: head})
                out.append(el.rewrite_fun(lname, d.ty_params, msig, eqs, cs))

            # the dictionary value itself
            scope = el.dict_params(cs, set())
            ctor_args: list[ir.Term] = []
            for f in info.fields:
                if f.kind == "super":
                    ctor_args.append(el.constraint_term(f.source_name, head, scope))
                else:
                    if f.source_name not in defs:
                        raise MissingInstance(
                            d.class_name, f"{d.ty_con_name} (method {f.source_name})"
                        )
                    t: ir.Term = ir.Ref(
                        lifted[f.source_name], tuple(ir.TyVar(v) for v, _ in d.ty_params)
                    )
                    for pname, _ in scope:
                        t = ir.App(t, ir.Var(pname))
                    ctor_args.append(t)
            dict_term: ir.Term = ir.Ref(info.ctor_name, (head,))
            for a in ctor_args:
                dict_term = ir.App(dict_term, a)

            inst_name = el.inst_names[(d.class_name, d.ty_con_name)]
            dict_ty = ir.TyCon(d.class_name, (head,))
            if not scope:
                out.append(ir.Const(inst_name, dict_ty, dict_term))
            else:
                sig = dict_ty
                for pname, c in reversed(scope):
                    sig = ir.TyFun(el.dict_type(c), sig)
                out.append(
                    ir.Fun(
                        inst_name,
                        tuple((v, ()) for v, _ in d.ty_params),
                        sig,
                        ((tuple(ir.PVar(p) for p, _ in scope), dict_term),),
                    )
                )
        else:
            raise TypeError(d)

    counts = dict(el.dict_counts)
    return DictProgram(tuple(out), dict(el.class_info), counts)


def elaborate_term(program: ir.Program, term: ir.Term) -> ir.Term:
    """Rewrite one closed term the same way elaborate rewrites bodies; the
    generated names match those of elaborate(program) because the naming
    prepass is deterministic."""
    return _Elab(program).rewrite(term, [])


def resolve_constraint(
    program: ir.Program,
    wanted: ir.Constraint | tuple[str, ir.TypeExpr],
    in_scope: list[tuple[str, ir.Constraint]],
) -> InstancePath:
    """Resolution as a standalone query: how would the dictionary demanded
    by `wanted` be produced with the given parameters in scope?"""
    el = _Elab(program)
    if isinstance(wanted, ir.Constraint):
        class_name, ty = wanted.class_name, ir.TyVar(wanted.var)
    else:
        class_name, ty = wanted[0], wanted[1]
    return el.resolve(class_name, ty, in_scope)
