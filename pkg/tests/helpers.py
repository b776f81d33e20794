"""Shared test machinery: fixture builds, Go-token comparison, random
well-typed program generation, and the oracle/generated differential."""

from __future__ import annotations

import random
import re
from functools import lru_cache
from pathlib import Path

from mlgo import dict_pass, emit, go_ast, ir, oracle, parser
from mlgo.codegen import AdaptationTable

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_TOKEN_RE = re.compile(
    r"\s+|(==|&&|:=|=>|[A-Za-z_][A-Za-z0-9_]*|\d+|\"(?:\\.|[^\"])*\"|.)"
)


def go_tokens(text: str) -> list[str]:
    """Token stream with whitespace and semicolons erased (semicolons and
    line breaks are interchangeable statement terminators here)."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(1)
        if tok is None or tok == ";":
            continue
        out.append(tok)
    return out


@lru_cache(maxsize=None)
def build_fixture(name: str, package: str = "main") -> emit.CompileResult:
    return emit.build((FIXTURES / name).read_text(), package=package)


def oracle_outcome(program: ir.Program, term: ir.Term, fuel: int):
    try:
        v = oracle.evaluate(program, term, fuel=fuel)
        return ("value", v)
    except oracle.MatchFailed:
        return ("match_failed", None)
    except oracle.OutOfFuel:
        return ("fuel", None)


def generated_outcome(result: emit.CompileResult, term: ir.Term, fuel: int):
    try:
        v = emit.eval_generated_call(result, term, fuel=fuel)
        return ("value", v)
    except go_ast.GoPanic as e:
        assert e.message == "match failed"
        return ("match_failed", None)
    except go_ast.GoOutOfFuel:
        return ("fuel", None)


def differential_check(result: emit.CompileResult, elaborated: ir.Term,
                       o_fuel: int = 100_000, g_fuel: int = 400_000):
    """Compare the reference interpreter against the fragment evaluator on
    one elaborated call.  Returns "agree", "fuel", or raises."""
    left = oracle_outcome(result.dict_program.program, elaborated, o_fuel)
    right = generated_outcome(result, elaborated, g_fuel)
    if left[0] == "fuel" or right[0] == "fuel":
        return "fuel"
    if left[0] != right[0]:
        raise AssertionError(f"outcome mismatch: oracle={left[0]} generated={right[0]}")
    if left[0] == "value":
        l = oracle.render_value(left[1], result.translator.names.rename_map)
        r = go_ast.render_gvalue(right[1])
        if l != r:
            raise AssertionError(f"value mismatch: oracle={l} generated={r}")
    return "agree"


def run_call(result: emit.CompileResult, call_text: str) -> ir.Term:
    parsed = parser.parse_term(call_text, result.program)
    assert not isinstance(parsed, list), parsed
    term, _ = parsed
    return dict_pass.elaborate_term(result.program, term)


# ---------------------------------------------------------------------------
# Random well-typed class-free programs


class ProgramGen:
    """Seeded generator: ≤4 datatypes (possibly generic, always with a
    non-recursive base constructor), ≤6 monomorphic functions with 1..3
    equations of pattern depth ≤3, plus ground entry calls."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    # -- datatypes -----------------------------------------------------

    def gen_datatypes(self) -> list[ir.Data]:
        rng = self.rng
        datas: list[ir.Data] = []
        for i in range(rng.randint(1, 4)):
            poly = rng.random() < 0.5 and i > 0
            tps = ("a",) if poly else ()
            ctors = []
            n_ctors = rng.randint(1, 3)
            for j in range(n_ctors):
                base_ctor = j == 0
                max_fields = 1 if base_ctor else 2
                fields = []
                for _ in range(rng.randint(0, max_fields)):
                    ft = self.field_type(datas, f"d{i}", tps, allow_self=not base_ctor)
                    if ft is not None:
                        fields.append(ft)
                ctors.append((f"K{i}{chr(ord('a') + j)}", tuple(fields)))
            datas.append(ir.Data(f"d{i}", tps, tuple(ctors)))
        return datas

    def field_type(self, earlier, self_name, tps, allow_self) -> ir.TypeExpr | None:
        rng = self.rng
        options = []
        if tps:
            options.append(ir.TyVar("a"))
        for d in earlier:
            options.append(self.instantiate(d, tps))
        if allow_self:
            options.append(ir.TyCon(self_name, tuple(ir.TyVar(v) for v in tps)))
        if not options:
            return None
        return rng.choice(options)

    def instantiate(self, d: ir.Data, tps) -> ir.TyCon:
        if not d.ty_params:
            return ir.TyCon(d.name, ())
        if tps and self.rng.random() < 0.5:
            return ir.TyCon(d.name, (ir.TyVar("a"),))
        # d0 is always concrete, making instantiations well founded
        return ir.TyCon(d.name, (ir.TyCon("d0", ()),))

    # -- programs --------------------------------------------------------

    def gen_program(self) -> tuple[ir.Program, list[ir.Term]]:
        rng = self.rng
        datas = self.gen_datatypes()
        self.datas = {d.name: d for d in datas}
        ground_types = [self.ground_instance(d) for d in datas]
        self.ground_types = ground_types

        funs: list[ir.Fun] = []
        self.funs = funs
        for i in range(rng.randint(1, 6)):
            funs.append(self.gen_fun(i, ground_types))

        decls = list(datas) + list(funs)
        program = ir.Program(tuple(decls))
        entries = []
        candidates = [f for f in funs if isinstance(self.result_type(f), ir.TyCon)]
        if candidates:
            for _ in range(rng.randint(5, 8)):
                f = rng.choice(candidates)
                m = len(f.equations[0][0])
                ptys, _ = ir.uncurry(f.signature, m)
                call: ir.Term = ir.Ref(f.name, ())
                for t in ptys:
                    call = ir.App(call, self.gen_ground(t, 3))
                entries.append(call)
        return program, entries

    def ground_instance(self, d: ir.Data) -> ir.TyCon:
        if not d.ty_params:
            return ir.TyCon(d.name, ())
        return ir.TyCon(d.name, (ir.TyCon("d0", ()),))

    def result_type(self, f: ir.Fun) -> ir.TypeExpr:
        m = len(f.equations[0][0])
        _, res = ir.uncurry(f.signature, m)
        return res

    def gen_fun(self, i: int, ground_types) -> ir.Fun:
        rng = self.rng
        m = rng.randint(1, 3)
        param_tys = [rng.choice(ground_types) for _ in range(m)]
        if rng.random() < 0.2:
            # a function returning a function, to exercise over-application
            extra = rng.choice(ground_types)
            result: ir.TypeExpr = ir.TyFun(extra, rng.choice(ground_types))
        else:
            result = rng.choice(ground_types)
        sig = result
        for t in reversed(param_tys):
            sig = ir.TyFun(t, sig)
        eqs = []
        for _ in range(rng.randint(1, 3)):
            env: dict[str, ir.TypeExpr] = {}
            params = tuple(self.gen_pattern(t, 3, env) for t in param_tys)
            rhs = self.gen_term(result, env, 3, self_name=f"f{i}", self_sig=sig, self_arity=m)
            eqs.append((params, rhs))
        return ir.Fun(f"f{i}", (), sig, tuple(eqs))

    def gen_pattern(self, ty: ir.TypeExpr, depth: int, env: dict) -> ir.Pattern:
        rng = self.rng
        if depth == 0 or not isinstance(ty, ir.TyCon) or rng.random() < 0.45:
            name = self.fresh("v")
            env[name] = ty
            return ir.PVar(name)
        data = self.datas[ty.name]
        cname, fields = rng.choice(data.ctors)
        sub = dict(zip(data.ty_params, ty.args))
        return ir.PCon(
            cname,
            ty.args,
            tuple(self.gen_pattern(ir.subst_ty(f, sub), depth - 1, env) for f in fields),
        )

    def gen_ground(self, ty: ir.TypeExpr, depth: int) -> ir.Term:
        assert isinstance(ty, ir.TyCon)
        rng = self.rng
        data = self.datas[ty.name]
        sub = dict(zip(data.ty_params, ty.args))
        candidates = list(data.ctors)
        if depth <= 0:
            # prefer the base constructor to terminate
            candidates = [data.ctors[0]]
        cname, fields = rng.choice(candidates)
        if depth <= 0 and fields:
            cname, fields = data.ctors[0]
        term: ir.Term = ir.Ref(cname, ty.args)
        for f in fields:
            term = ir.App(term, self.gen_ground(ir.subst_ty(f, sub), depth - 1))
        return term

    def gen_term(self, ty: ir.TypeExpr, env: dict, depth: int, self_name, self_sig, self_arity) -> ir.Term:
        rng = self.rng
        in_scope = [v for v, t in env.items() if t == ty]
        if depth <= 0:
            if in_scope:
                return ir.Var(rng.choice(in_scope))
            if isinstance(ty, ir.TyCon):
                return self.gen_ground(ty, 1)
            # function type at the leaf: wrap a constant body
            assert isinstance(ty, ir.TyFun)
            b = self.fresh("v")
            inner_env = {**env, b: ty.arg}
            return ir.Abs(b, ty.arg, self.gen_term(ty.result, inner_env, 0, self_name, self_sig, self_arity))

        roll = rng.random()
        if in_scope and roll < 0.25:
            return ir.Var(rng.choice(in_scope))

        if isinstance(ty, ir.TyFun):
            if rng.random() < 0.7:
                b = self.fresh("v")
                inner_env = {**env, b: ty.arg}
                return ir.Abs(b, ty.arg, self.gen_term(ty.result, inner_env, depth - 1, self_name, self_sig, self_arity))
            # under-applied call producing this function type
            target = self.find_fun_with_suffix(ty, self_name, self_sig, self_arity)
            if target is not None:
                name, sig, take = target
                term: ir.Term = ir.Ref(name, ())
                tys, _ = ir.uncurry(sig, take)
                for t in tys:
                    term = ir.App(term, self.gen_term(t, env, depth - 1, self_name, self_sig, self_arity))
                return term
            b = self.fresh("v")
            inner_env = {**env, b: ty.arg}
            return ir.Abs(b, ty.arg, self.gen_term(ty.result, inner_env, depth - 1, self_name, self_sig, self_arity))

        assert isinstance(ty, ir.TyCon)
        if roll < 0.45:
            # constructor application
            data = self.datas[ty.name]
            cname, fields = rng.choice(data.ctors)
            sub = dict(zip(data.ty_params, ty.args))
            term = ir.Ref(cname, ty.args)
            for f in fields:
                term = ir.App(term, self.gen_term(ir.subst_ty(f, sub), env, depth - 1, self_name, self_sig, self_arity))
            return term
        if roll < 0.62:
            # case split on something in scope (or a fresh ground value)
            scrut_candidates = [
                (v, t) for v, t in env.items()
                if isinstance(t, ir.TyCon) and t.name in self.datas
            ]
            if scrut_candidates:
                v, st = rng.choice(scrut_candidates)
                scrut: ir.Term = ir.Var(v)
            else:
                st = rng.choice(self.ground_types)
                scrut = self.gen_ground(st, 2)
            data = self.datas[st.name]
            sub = dict(zip(data.ty_params, st.args))
            clauses = []
            ctors = list(data.ctors)
            rng.shuffle(ctors)
            keep = rng.randint(1, len(ctors))  # possibly incomplete
            for cname, fields in ctors[:keep]:
                cenv = dict(env)
                pat = ir.PCon(
                    cname,
                    st.args,
                    tuple(self.gen_pattern(ir.subst_ty(f, sub), 1, cenv) for f in fields),
                )
                clauses.append((pat, self.gen_term(ty, cenv, depth - 1, self_name, self_sig, self_arity)))
            return ir.Case(scrut, st, tuple(clauses))
        if roll < 0.80:
            # call a generated function (possibly self, possibly over-applied)
            target = self.find_fun_returning(ty, self_name, self_sig, self_arity)
            if target is not None:
                name, sig, take = target
                term = ir.Ref(name, ())
                tys, _ = ir.uncurry(sig, take)
                for t in tys:
                    term = ir.App(term, self.gen_term(t, env, depth - 1, self_name, self_sig, self_arity))
                return term
        if roll < 0.88 and isinstance(ty, ir.TyCon):
            # immediately applied lambda
            at = rng.choice(self.ground_types)
            b = self.fresh("v")
            inner_env = {**env, b: at}
            lam = ir.Abs(b, at, self.gen_term(ty, inner_env, depth - 1, self_name, self_sig, self_arity))
            return ir.App(lam, self.gen_term(at, env, depth - 1, self_name, self_sig, self_arity))
        return self.gen_ground(ty, min(depth, 2))

    def _fun_space(self, self_name, self_sig, self_arity):
        out = [(f.name, f.signature, len(f.equations[0][0])) for f in self.funs]
        out.append((self_name, self_sig, self_arity))
        return out

    def find_fun_returning(self, ty, self_name, self_sig, self_arity):
        rng = self.rng
        options = []
        for name, sig, m in self._fun_space(self_name, self_sig, self_arity):
            tys, res = ir.uncurry(sig, m)
            if res == ty:
                options.append((name, sig, m))
            elif isinstance(res, ir.TyFun) and res.result == ty:
                options.append((name, sig, m + 1))  # one curried extra
        if not options:
            return None
        name, sig, take = rng.choice(options)
        if rng.random() < 0.3 and name != self_name:
            pass
        return name, sig, take

    def find_fun_with_suffix(self, ty: ir.TyFun, self_name, self_sig, self_arity):
        for name, sig, m in self._fun_space(self_name, self_sig, self_arity):
            tys, res = ir.uncurry(sig, m)
            if m >= 1 and ir.TyFun(tys[-1], res) == ty:
                return name, sig, m - 1
        return None

    def gen_closed(self, ty: ir.TypeExpr, depth: int) -> ir.Term:
        f = self.funs[0]
        return self.gen_term(
            ty, {}, depth, self_name=f.name, self_sig=f.signature,
            self_arity=len(f.equations[0][0]),
        )


def generate_program(seed: int) -> tuple[ir.Program, list[ir.Term]]:
    return ProgramGen(seed).gen_program()


def build_generated(program: ir.Program) -> emit.CompileResult:
    """Translate an already-resolved in-memory program."""
    from mlgo import codegen

    dp = dict_pass.elaborate(program)
    tr = codegen.Translator(dp, AdaptationTable.default())
    decls = tr.translate_program()
    wf = go_ast.check_wf(decls)
    assert not wf, f"generated program ill-formed: {[str(d) for d in wf][:5]}"
    return emit.CompileResult(program, dp, tr, decls, go_ast.render(decls))


# ---------------------------------------------------------------------------
# Random class-using programs over the shipped hierarchy


CLASS_PREAMBLE = """\
datatype nat = Zero | Suc nat
datatype 'a list = Nil | Cons 'a ('a list)
datatype 'a option = None | Some 'a

fun fold :: ('a => 'b => 'b) => 'a list => 'b => 'b where
  fold f Nil y = y
| fold f (Cons x xs) y = fold f xs (f x y)

class semigroup where
  (+) :: 'a => 'a => 'a

class monoid <= semigroup where
  zero :: 'a

instance nat :: semigroup where
  a + Zero = a
| Zero + a = a
| (Suc a) + b = Suc (a + b)

instance nat :: monoid where
  zero = Zero

instance option :: semigroup when 'a :: semigroup where
  None + b = b
| a + None = a
| (Some a) + (Some b) = Some (a + b)

instance option :: monoid when 'a :: semigroup where
  zero = None

fun sum :: ('a :: monoid) list => 'a where
  sum xs = fold (+) xs zero
"""


class ClassProgramGen:
    """Random constrained functions over the fixed semigroup/monoid
    hierarchy, with ground entries at nat and nat option."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def gen_expr(self, depth: int, vars_: list[str]) -> str:
        rng = self.rng
        if depth <= 0:
            return rng.choice(vars_ + ["zero"])
        roll = rng.random()
        if roll < 0.3:
            return rng.choice(vars_ + ["zero"])
        if roll < 0.65:
            return f"({self.gen_expr(depth - 1, vars_)} + {self.gen_expr(depth - 1, vars_)})"
        return f"(sum {self.gen_list(depth - 1, vars_)})"

    def gen_list(self, depth: int, vars_: list[str]) -> str:
        rng = self.rng
        items = [self.gen_expr(max(depth - 1, 0), vars_) for _ in range(rng.randint(0, 3))]
        out = "Nil"
        for item in reversed(items):
            out = f"(Cons {item} {out})"
        return out

    def gen_ground_nat(self, depth: int) -> str:
        n = self.rng.randint(0, 4)
        out = "Zero"
        for _ in range(n):
            out = f"(Suc {out})"
        return out

    def gen_ground_opt(self) -> str:
        if self.rng.random() < 0.3:
            return "None"
        return f"(Some {self.gen_ground_nat(2)})"

    def gen(self) -> tuple[str, list[str]]:
        rng = self.rng
        n_funs = rng.randint(1, 3)
        parts = [CLASS_PREAMBLE]
        names = []
        for i in range(n_funs):
            name = f"g{i}"
            names.append(name)
            body = self.gen_expr(3, ["x", "y"])
            parts.append(
                f"fun {name} :: ('a :: monoid) => 'a => 'a where\n  {name} x y = {body}\n"
            )
        calls = []
        for _ in range(rng.randint(3, 6)):
            f = rng.choice(names)
            if rng.random() < 0.5:
                calls.append(f"{f} {self.gen_ground_nat(3)} {self.gen_ground_nat(3)}")
            else:
                a, b = self.gen_ground_opt(), self.gen_ground_opt()
                if a == "None" and b == "None":
                    b = f"(Some {self.gen_ground_nat(2)})"  # keep the element type fixed
                calls.append(f"{f} {a} {b}")
        return "\n".join(parts), calls
