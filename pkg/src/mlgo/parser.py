"""Surface syntax: lexer, parser, pretty printer and type elaboration.

The concrete grammar is line-flexible ML:

    datatype ('a, 'b) name = Ctor ty* ( '|' Ctor ty* )*
    fun name :: type where eq ( '|' eq )*
    class name [ '<=' super (',' super)* ] where  (name | '(' op ')') :: type ...
    instance tycon :: class [ 'when' 'a :: cls (',' ...) ] where eq ( '|' eq )*
    definition name :: type where name = term

Types: `'a`, postfix application `ty name` / `('t1, 't2) name`, `=>` arrows
(right associative), `('a :: cls)` constraint annotations.  Terms:
juxtaposition application, `\\x. t`, `case t of pat => t | ...`, infix
`+ - *` as sugar for method names.  `⇒` is accepted for `=>`.

Elaboration (resolve_types) runs unification against declared signatures
and leaves every binder, scrutinee and reference annotated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import ir
from .prelude import BUILTIN_SIGS, OPERATOR_TABLE, PRELUDE_DECLS, PRELUDE_NAMES


@dataclass(frozen=True)
class SourcePos:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    pos: SourcePos
    kind: str  # Lex | Parse | Scope | Type | Arity
    message: str

    def __str__(self):
        return f"{self.pos}: {self.kind}: {self.message}"


@dataclass
class ParseResult:
    program: ir.Program | None
    diagnostics: list[Diagnostic]

    def ok(self) -> bool:
        return not self.diagnostics


KEYWORDS = {"datatype", "fun", "class", "instance", "definition", "where", "case", "of", "when"}
DECL_KEYWORDS = {"datatype", "fun", "class", "instance", "definition"}

_PUNCT = ["=>", "::", "<=", "=", "|", "(", ")", ",", ".", "\\", "+", "-", "*", "_"]


@dataclass(frozen=True)
class Token:
    kind: str  # ident tyvar int string punct eof
    text: str
    pos: SourcePos


def tokenize(src: str) -> tuple[list[Token], list[Diagnostic]]:
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    line, col, i = 1, 1, 0
    n = len(src)

    def pos() -> SourcePos:
        return SourcePos(line, col)

    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c == "⇒":
            toks.append(Token("punct", "=>", pos()))
            i += 1
            col += 1
            continue
        if c.isalpha():
            p = pos()
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            toks.append(Token("ident", src[i:j], p))
            col += j - i
            i = j
            continue
        if c == "'":
            p = pos()
            j = i + 1
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            if j == i + 1:
                diags.append(Diagnostic(p, "Lex", "lone quote"))
                i += 1
                col += 1
                continue
            toks.append(Token("tyvar", src[i + 1 : j], p))
            col += j - i
            i = j
            continue
        if c.isdigit():
            p = pos()
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], p))
            col += j - i
            i = j
            continue
        if c == '"':
            p = pos()
            j = i + 1
            buf = []
            while j < n and src[j] != '"':
                if src[j] == "\\" and j + 1 < n:
                    esc = src[j + 1]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    buf.append(src[j])
                    j += 1
            if j >= n:
                diags.append(Diagnostic(p, "Lex", "unterminated string"))
            toks.append(Token("string", "".join(buf), p))
            col += j + 1 - i
            i = j + 1
            continue
        matched = False
        for punct in _PUNCT:
            if src.startswith(punct, i):
                toks.append(Token("punct", punct, pos()))
                i += len(punct)
                col += len(punct)
                matched = True
                break
        if not matched:
            diags.append(Diagnostic(pos(), "Lex", f"unexpected character {c!r}"))
            i += 1
            col += 1
    toks.append(Token("eof", "", SourcePos(line, col)))
    return toks, diags


class _ParseError(Exception):
    def __init__(self, pos: SourcePos, message: str):
        super().__init__(message)
        self.pos = pos
        self.message = message


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.wildcards = itertools.count()
        # per-declaration inline constraints, keyed by type variable
        self.inline_constraints: dict[str, list[str]] = {}

    # -- token helpers ------------------------------------------------

    def peek(self, off: int = 0) -> Token:
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_keyword(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text in words

    def take(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if not self.at(kind, text):
            want = text or kind
            raise _ParseError(t.pos, f"expected {want!r}, found {t.text or t.kind!r}")
        return self.take()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise _ParseError(t.pos, f"expected identifier, found {t.text or t.kind!r}")
        return self.take()

    # -- declarations -------------------------------------------------

    def program(self) -> list[ir.Declaration]:
        decls: list[ir.Declaration] = []
        while not self.at("eof"):
            t = self.peek()
            if t.kind != "ident" or t.text not in DECL_KEYWORDS:
                self.diags.append(
                    Diagnostic(t.pos, "Parse", f"expected declaration, found {t.text!r}")
                )
                self.skip_to_decl()
                continue
            try:
                decls.append(self.declaration())
            except _ParseError as e:
                self.diags.append(Diagnostic(e.pos, "Parse", e.message))
                self.skip_to_decl()
        return decls

    def skip_to_decl(self):
        while not self.at("eof"):
            t = self.peek()
            if t.kind == "ident" and t.text in DECL_KEYWORDS:
                return
            self.take()

    def declaration(self) -> ir.Declaration:
        kw = self.take().text
        self.inline_constraints = {}
        if kw == "datatype":
            return self.datatype()
        if kw == "fun":
            return self.fun()
        if kw == "class":
            return self.class_decl()
        if kw == "instance":
            return self.instance()
        if kw == "definition":
            return self.definition()
        raise AssertionError(kw)

    def datatype(self) -> ir.Data:
        ty_params: list[str] = []
        if self.at("tyvar"):
            ty_params.append(self.take().text)
        elif self.at("punct", "(") and self.peek(1).kind == "tyvar":
            self.take()
            ty_params.append(self.expect("tyvar").text)
            while self.at("punct", ","):
                self.take()
                ty_params.append(self.expect("tyvar").text)
            self.expect("punct", ")")
        name = self.expect_ident().text
        self.expect("punct", "=")
        ctors = [self.ctor()]
        while self.at("punct", "|"):
            self.take()
            ctors.append(self.ctor())
        return ir.Data(name, tuple(ty_params), tuple(ctors))

    def ctor(self) -> tuple[str, tuple[ir.TypeExpr, ...]]:
        name = self.expect_ident().text
        fields: list[ir.TypeExpr] = []
        while self.at_type_atom():
            fields.append(self.type_atom_applied())
        return name, tuple(fields)

    def fun(self) -> ir.Fun:
        name = self.expect_ident().text
        self.expect("punct", "::")
        sig = self.type_expr()
        self.expect("ident", "where")
        eqs = [self.equation(name)]
        while self.continue_equations():
            self.take()
            eqs.append(self.equation(name))
        return ir.Fun(name, self.collect_ty_params(sig), sig, tuple(eqs))

    def collect_ty_params(self, sig: ir.TypeExpr) -> tuple[tuple[str, tuple[ir.Constraint, ...]], ...]:
        order: list[str] = []

        def walk(t: ir.TypeExpr):
            if isinstance(t, ir.TyVar):
                if t.name not in order:
                    order.append(t.name)
            elif isinstance(t, ir.TyCon):
                for a in t.args:
                    walk(a)
            elif isinstance(t, ir.TyFun):
                walk(t.arg)
                walk(t.result)

        walk(sig)
        return tuple(
            (v, tuple(ir.Constraint(v, c) for c in self.inline_constraints.get(v, ())))
            for v in order
        )

    def class_decl(self) -> ir.Class:
        name = self.expect_ident().text
        supers: list[str] = []
        if self.at("punct", "<="):
            self.take()
            supers.append(self.expect_ident().text)
            while self.at("punct", ","):
                self.take()
                supers.append(self.expect_ident().text)
        self.expect("ident", "where")
        methods: list[tuple[str, ir.TypeExpr]] = []
        while True:
            if self.at("punct", "(") and self.peek(1).text in OPERATOR_TABLE:
                self.take()
                mname = OPERATOR_TABLE[self.take().text]
                self.expect("punct", ")")
            elif self.peek().kind == "ident" and not self.at_keyword(*DECL_KEYWORDS):
                mname = self.expect_ident().text
            else:
                break
            self.expect("punct", "::")
            methods.append((mname, self.type_expr()))
        if not methods:
            raise _ParseError(self.peek().pos, "class with no methods")
        return ir.Class(name, "a", tuple(supers), tuple(methods))

    def instance(self) -> ir.Instance:
        tycon = self.expect_ident().text
        self.expect("punct", "::")
        cls = self.expect_ident().text
        constraints: dict[str, list[str]] = {}
        if self.at_keyword("when"):
            self.take()
            while True:
                v = self.expect("tyvar").text
                self.expect("punct", "::")
                constraints.setdefault(v, []).append(self.expect_ident().text)
                if self.at("punct", ","):
                    self.take()
                else:
                    break
        self.expect("ident", "where")
        eqs_by_method: dict[str, list[ir.Equation]] = {}
        eq_name, eq = self.method_equation()
        eqs_by_method.setdefault(eq_name, []).append(eq)
        while self.continue_equations():
            self.take()
            eq_name, eq = self.method_equation()
            eqs_by_method.setdefault(eq_name, []).append(eq)
        # type parameters named positionally; arity is checked during resolve
        ty_params = tuple(
            (v, tuple(ir.Constraint(v, c) for c in constraints.get(v, ())))
            for v in self._instance_vars(constraints)
        )
        return ir.Instance(
            cls, tycon, ty_params, tuple((m, tuple(eqs)) for m, eqs in eqs_by_method.items())
        )

    def _instance_vars(self, constraints: dict[str, list[str]]) -> list[str]:
        # 'a, 'b, ... as referenced by the when-clause, in alphabetical order
        return sorted(constraints.keys())

    def definition(self) -> ir.Const:
        name = self.expect_ident().text
        self.expect("punct", "::")
        sig = self.type_expr()
        self.expect("ident", "where")
        lhs = self.expect_ident()
        if lhs.text != name:
            raise _ParseError(lhs.pos, f"definition body must define {name!r}")
        self.expect("punct", "=")
        rhs = self.term()
        if self.inline_constraints:
            raise _ParseError(lhs.pos, "constraints are not allowed on definitions")
        return ir.Const(name, sig, rhs)

    # -- equations ----------------------------------------------------

    def continue_equations(self) -> bool:
        """At '|': decide between a further equation and clauses swallowed
        by a trailing case expression (those use '=>', equations use '=')."""
        if not self.at("punct", "|"):
            return False
        depth = 0
        j = self.i + 1
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "punct":
                if t.text == "(":
                    depth += 1
                elif t.text == ")":
                    depth -= 1
                elif depth == 0 and t.text == "=":
                    return True
                elif depth == 0 and t.text in ("=>", "|"):
                    return False
            elif t.kind == "ident" and t.text in DECL_KEYWORDS and depth == 0:
                return False
            elif t.kind == "eof":
                return False
            j += 1
        return False

    def equation(self, fun_name: str) -> ir.Equation:
        name, eq = self.any_equation()
        if name != fun_name:
            raise _ParseError(self.peek().pos, f"equation defines {name!r}, expected {fun_name!r}")
        return eq

    def method_equation(self) -> tuple[str, ir.Equation]:
        return self.any_equation()

    def any_equation(self) -> tuple[str, ir.Equation]:
        """LHS forms: `name pats`, `(op) pats`, or infix `pat op pat`."""
        pos = self.peek().pos
        if self.at("punct", "(") and self.peek(1).text in OPERATOR_TABLE:
            self.take()
            name = OPERATOR_TABLE[self.take().text]
            self.expect("punct", ")")
            params = self.pattern_atoms()
        else:
            first = self.pattern_atom()
            if self.peek().kind == "punct" and self.peek().text in OPERATOR_TABLE:
                name = OPERATOR_TABLE[self.take().text]
                second = self.pattern_atom()
                params = [first, second]
            else:
                if not (isinstance(first, ir.PCon) and not first.subpatterns):
                    raise _ParseError(pos, "equation head must be a name")
                name = first.ctor
                params = self.pattern_atoms()
        self.expect("punct", "=")
        rhs = self.term()
        return name, (tuple(params), rhs)

    # -- patterns -----------------------------------------------------

    def pattern_atoms(self) -> list[ir.Pattern]:
        out = []
        while self.at_pattern_atom():
            out.append(self.pattern_atom())
        return out

    def at_pattern_atom(self) -> bool:
        t = self.peek()
        if t.kind == "ident" and t.text not in KEYWORDS:
            return True
        return t.kind == "punct" and t.text in ("(", "_")

    def pattern_atom(self) -> ir.Pattern:
        t = self.peek()
        if t.kind == "punct" and t.text == "_":
            self.take()
            return ir.PVar(f"_w{next(self.wildcards)}")
        if t.kind == "punct" and t.text == "(":
            self.take()
            p = self.pattern()
            self.expect("punct", ")")
            return p
        name = self.expect_ident().text
        # bare name: constructor or variable, decided after all decls parse
        return ir.PCon(name, (), ())

    def pattern(self) -> ir.Pattern:
        t = self.peek()
        if t.kind == "ident" and t.text not in KEYWORDS:
            name = self.take().text
            subs = self.pattern_atoms()
            return ir.PCon(name, (), tuple(subs))
        return self.pattern_atom()

    # -- types ----------------------------------------------------------

    def at_type_atom(self) -> bool:
        t = self.peek()
        if t.kind == "tyvar":
            return True
        if t.kind == "ident" and t.text not in KEYWORDS:
            return True
        return t.kind == "punct" and t.text == "("

    def type_expr(self) -> ir.TypeExpr:
        lhs = self.app_type()
        if self.at("punct", "=>"):
            self.take()
            return ir.TyFun(lhs, self.type_expr())
        return lhs

    def app_type(self) -> ir.TypeExpr:
        base = self.type_atom()
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
            name = self.take().text
            args = base if isinstance(base, tuple) else (base,)
            base = ir.TyCon(name, args)
        if isinstance(base, tuple):
            raise _ParseError(self.peek().pos, "type tuple must be applied to a constructor")
        return base

    def type_atom(self) -> ir.TypeExpr | tuple[ir.TypeExpr, ...]:
        t = self.peek()
        if t.kind == "tyvar":
            self.take()
            return ir.TyVar(t.text)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.take()
            return ir.TyCon(t.text, ())
        if t.kind == "punct" and t.text == "(":
            self.take()
            if self.at("tyvar") and self.peek(1).kind == "punct" and self.peek(1).text == "::":
                v = self.take().text
                self.take()
                classes = [self.expect_ident().text]
                while self.at("punct", ","):
                    self.take()
                    classes.append(self.expect_ident().text)
                self.expect("punct", ")")
                self.inline_constraints.setdefault(v, []).extend(
                    c for c in classes if c not in self.inline_constraints.get(v, [])
                )
                return ir.TyVar(v)
            first = self.type_expr()
            if self.at("punct", ","):
                items = [first]
                while self.at("punct", ","):
                    self.take()
                    items.append(self.type_expr())
                self.expect("punct", ")")
                return tuple(items)
            self.expect("punct", ")")
            return first
        raise _ParseError(t.pos, f"expected type, found {t.text or t.kind!r}")

    def type_atom_applied(self) -> ir.TypeExpr:
        """A constructor field: atom plus trailing postfix applications."""
        base = self.type_atom()
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
            # stop if this identifier starts the next constructor alternative:
            # a constructor name is followed by '|' '=' or another field, so
            # postfix type application inside field lists must be parenthesized.
            break
        if isinstance(base, tuple):
            raise _ParseError(self.peek().pos, "type tuple must be applied to a constructor")
        return base

    # -- terms ----------------------------------------------------------

    def at_term_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("int", "string"):
            return True
        if t.kind == "ident" and (t.text == "case" or t.text not in KEYWORDS):
            return True
        return t.kind == "punct" and t.text in ("(", "\\")

    def term(self) -> ir.Term:
        if self.at("punct", "\\"):
            self.take()
            binders = [self.expect_ident().text]
            while self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
                binders.append(self.take().text)
            self.expect("punct", ".")
            body = self.term()
            for b in reversed(binders):
                body = ir.Abs(b, None, body)  # type: ignore[arg-type]
            return body
        lhs = self.app_term()
        while self.peek().kind == "punct" and self.peek().text in OPERATOR_TABLE:
            op = OPERATOR_TABLE[self.take().text]
            rhs = self.app_term()
            lhs = ir.App(ir.App(ir.Var(op), lhs), rhs)
        return lhs

    def app_term(self) -> ir.Term:
        t = self.term_atom()
        while self.at_term_atom():
            t = ir.App(t, self.term_atom())
        return t

    def term_atom(self) -> ir.Term:
        t = self.peek()
        if t.kind == "int":
            self.take()
            return ir.Lit(int(t.text), ir.TyCon("int"))
        if t.kind == "string":
            self.take()
            return ir.Lit(t.text, ir.TyCon("str"))
        if t.kind == "ident" and t.text == "case":
            return self.case_term()
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.take()
            return ir.Var(t.text)
        if t.kind == "punct" and t.text == "(":
            self.take()
            if self.peek().text in OPERATOR_TABLE and self.peek(1).text == ")":
                op = OPERATOR_TABLE[self.take().text]
                self.take()
                return ir.Var(op)
            inner = self.term()
            self.expect("punct", ")")
            return inner
        raise _ParseError(t.pos, f"expected term, found {t.text or t.kind!r}")

    def case_term(self) -> ir.Term:
        self.expect("ident", "case")
        scrut = self.term()
        self.expect("ident", "of")
        clauses = [self.case_clause()]
        while self.at("punct", "|") and not self.continue_equations():
            self.take()
            clauses.append(self.case_clause())
        return ir.Case(scrut, None, tuple(clauses))  # type: ignore[arg-type]

    def case_clause(self) -> tuple[ir.Pattern, ir.Term]:
        pat = self.pattern()
        self.expect("punct", "=>")
        return pat, self.term()


# ---------------------------------------------------------------------------
# Post-parse classification: bare pattern names become variables unless a
# constructor of that name is declared somewhere in the program.


def _classify_patterns(decls: list[ir.Declaration]) -> list[ir.Declaration]:
    ctors = set()
    for d in itertools.chain(PRELUDE_DECLS, decls):
        if isinstance(d, ir.Data):
            ctors.update(c for c, _ in d.ctors)

    def pat(p: ir.Pattern) -> ir.Pattern:
        if isinstance(p, ir.PCon):
            if not p.subpatterns and p.ctor not in ctors:
                return ir.PVar(p.ctor)
            return ir.PCon(p.ctor, p.type_args, tuple(pat(s) for s in p.subpatterns))
        return p

    def term(t: ir.Term) -> ir.Term:
        if isinstance(t, ir.App):
            return ir.App(term(t.fun), term(t.arg))
        if isinstance(t, ir.Abs):
            return ir.Abs(t.binder, t.binder_type, term(t.body))
        if isinstance(t, ir.Case):
            return ir.Case(
                term(t.scrutinee),
                t.scrutinee_type,
                tuple((pat(p), term(b)) for p, b in t.clauses),
            )
        return t

    def eqs(equations):
        return tuple((tuple(pat(p) for p in ps), term(rhs)) for ps, rhs in equations)

    out: list[ir.Declaration] = []
    for d in decls:
        if isinstance(d, ir.Fun):
            out.append(ir.Fun(d.name, d.ty_params, d.signature, eqs(d.equations)))
        elif isinstance(d, ir.Instance):
            out.append(
                ir.Instance(
                    d.class_name,
                    d.ty_con_name,
                    d.ty_params,
                    tuple((m, eqs(e)) for m, e in d.method_defs),
                )
            )
        elif isinstance(d, ir.Const):
            out.append(ir.Const(d.name, d.signature, term(d.rhs)))
        else:
            out.append(d)
    return out


# ---------------------------------------------------------------------------
# Unification-based elaboration


@dataclass(frozen=True)
class UVar(ir.TypeExpr):
    id: int

    def __str__(self):
        return f"?{self.id}"


class _Unifier:
    def __init__(self):
        self.subst: dict[int, ir.TypeExpr] = {}
        self.counter = itertools.count()

    def fresh(self) -> UVar:
        return UVar(next(self.counter))

    def prune(self, t: ir.TypeExpr) -> ir.TypeExpr:
        while isinstance(t, UVar) and t.id in self.subst:
            t = self.subst[t.id]
        return t

    def unify(self, a: ir.TypeExpr, b: ir.TypeExpr) -> bool:
        a, b = self.prune(a), self.prune(b)
        if a == b:
            return True
        if isinstance(a, UVar):
            if self.occurs(a.id, b):
                return False
            self.subst[a.id] = b
            return True
        if isinstance(b, UVar):
            return self.unify(b, a)
        if isinstance(a, ir.TyCon) and isinstance(b, ir.TyCon):
            if a.name != b.name or len(a.args) != len(b.args):
                return False
            return all(self.unify(x, y) for x, y in zip(a.args, b.args))
        if isinstance(a, ir.TyFun) and isinstance(b, ir.TyFun):
            return self.unify(a.arg, b.arg) and self.unify(a.result, b.result)
        return False

    def occurs(self, vid: int, t: ir.TypeExpr) -> bool:
        t = self.prune(t)
        if isinstance(t, UVar):
            return t.id == vid
        if isinstance(t, ir.TyCon):
            return any(self.occurs(vid, a) for a in t.args)
        if isinstance(t, ir.TyFun):
            return self.occurs(vid, t.arg) or self.occurs(vid, t.result)
        return False

    def zonk(self, t: ir.TypeExpr, default: ir.TypeExpr | None = None) -> ir.TypeExpr:
        t = self.prune(t)
        if isinstance(t, UVar):
            if default is None:
                raise _Ambiguous(t)
            return default
        if isinstance(t, ir.TyCon):
            return ir.TyCon(t.name, tuple(self.zonk(a, default) for a in t.args))
        if isinstance(t, ir.TyFun):
            return ir.TyFun(self.zonk(t.arg, default), self.zonk(t.result, default))
        return t


class _Ambiguous(Exception):
    pass


class _Elaborator:
    """Types every declaration body against the declared signatures."""

    def __init__(self, idx: ir.ProgramIndex):
        self.idx = idx
        self.diags: list[Diagnostic] = []
        self.pos = SourcePos(1, 1)

    def error(self, kind: str, message: str):
        self.diags.append(Diagnostic(self.pos, kind, message))

    def instantiate(self, name: str, u: _Unifier) -> tuple[ir.TypeExpr, list[ir.TypeExpr]] | None:
        """Signature of a global with fresh metas for its type parameters;
        returns (type, metas-in-declaration-order)."""
        idx = self.idx
        if name in idx.funs:
            f = idx.funs[name]
            metas = [u.fresh() for _ in f.ty_params]
            sub = {v: m for (v, _), m in zip(f.ty_params, metas)}
            return ir.subst_ty(f.signature, sub), metas
        if name in idx.consts:
            c = idx.consts[name]
            order = sorted(ir.free_ty_vars(c.signature))
            metas = [u.fresh() for _ in order]
            return ir.subst_ty(c.signature, dict(zip(order, metas))), metas
        if name in idx.ctors:
            data, i = idx.ctors[name]
            metas = [u.fresh() for _ in data.ty_params]
            sub = dict(zip(data.ty_params, metas))
            out: ir.TypeExpr = ir.TyCon(data.name, tuple(metas))
            for ft in reversed(data.ctors[i][1]):
                out = ir.TyFun(ir.subst_ty(ft, sub), out)
            return out, metas
        if name in idx.methods:
            cls = idx.methods[name]
            sig = self.idx.method_sig(name)
            order = [cls.ty_param] + sorted(ir.free_ty_vars(sig) - {cls.ty_param})
            metas = [u.fresh() for _ in order]
            return ir.subst_ty(sig, dict(zip(order, metas))), metas
        if name in BUILTIN_SIGS:
            return BUILTIN_SIGS[name], []
        return None

    def infer(self, t: ir.Term, env: dict[str, ir.TypeExpr], u: _Unifier) -> tuple[ir.Term, ir.TypeExpr]:
        if isinstance(t, ir.Var):
            if t.name in env:
                return t, env[t.name]
            inst = self.instantiate(t.name, u)
            if inst is None:
                self.error("Scope", f"unknown name {t.name!r}")
                return ir.Ref(t.name, ()), u.fresh()
            sig, metas = inst
            return ir.Ref(t.name, tuple(metas)), sig
        if isinstance(t, ir.Lit):
            return t, t.type
        if isinstance(t, ir.App):
            fun, fun_ty = self.infer(t.fun, env, u)
            arg, arg_ty = self.infer(t.arg, env, u)
            res = u.fresh()
            if not u.unify(fun_ty, ir.TyFun(arg_ty, res)):
                self.error(
                    "Type",
                    f"cannot apply value of type {u.zonk(fun_ty, ir.TyVar('_'))} "
                    f"to argument of type {u.zonk(arg_ty, ir.TyVar('_'))}",
                )
            return ir.App(fun, arg), res
        if isinstance(t, ir.Abs):
            bt = t.binder_type if t.binder_type is not None else u.fresh()
            body, body_ty = self.infer(t.body, {**env, t.binder: bt}, u)
            return ir.Abs(t.binder, bt, body), ir.TyFun(bt, body_ty)
        if isinstance(t, ir.Case):
            scrut, scrut_ty = self.infer(t.scrutinee, env, u)
            result = u.fresh()
            clauses = []
            for pat, body in t.clauses:
                benv = dict(env)
                pat2 = self.check_pattern(pat, scrut_ty, benv, u)
                body2, body_ty = self.infer(body, benv, u)
                if not u.unify(result, body_ty):
                    self.error("Type", "case clauses have different types")
                clauses.append((pat2, body2))
            return ir.Case(scrut, scrut_ty, tuple(clauses)), result
        if isinstance(t, ir.Ref):
            inst = self.instantiate(t.name, u)
            if inst is None:
                self.error("Scope", f"unknown name {t.name!r}")
                return t, u.fresh()
            sig, metas = inst
            return ir.Ref(t.name, tuple(metas)), sig
        raise TypeError(t)

    def check_pattern(
        self, pat: ir.Pattern, ty: ir.TypeExpr, env: dict[str, ir.TypeExpr], u: _Unifier
    ) -> ir.Pattern:
        if isinstance(pat, ir.PVar):
            env[pat.name] = ty
            return pat
        assert isinstance(pat, ir.PCon)
        if pat.ctor not in self.idx.ctors:
            self.error("Scope", f"unknown constructor {pat.ctor!r}")
            return pat
        data, i = self.idx.ctors[pat.ctor]
        metas = [u.fresh() for _ in data.ty_params]
        if not u.unify(ty, ir.TyCon(data.name, tuple(metas))):
            self.error("Type", f"pattern {pat.ctor} does not match scrutinee type")
        fields = data.ctors[i][1]
        if len(fields) != len(pat.subpatterns):
            self.error(
                "Arity",
                f"constructor {pat.ctor} has {len(fields)} fields, "
                f"pattern has {len(pat.subpatterns)}",
            )
            return pat
        sub = dict(zip(data.ty_params, metas))
        subs = [
            self.check_pattern(sp, ir.subst_ty(ft, sub), env, u)
            for sp, ft in zip(pat.subpatterns, fields)
        ]
        return ir.PCon(pat.ctor, tuple(metas), tuple(subs))

    # -- zonking helpers ------------------------------------------------

    def zonk_term(self, t: ir.Term, u: _Unifier, default: ir.TypeExpr | None) -> ir.Term:
        z = lambda ty: u.zonk(ty, default)
        if isinstance(t, (ir.Var, ir.Lit)):
            return t
        if isinstance(t, ir.Ref):
            return ir.Ref(t.name, tuple(z(a) for a in t.type_args))
        if isinstance(t, ir.App):
            return ir.App(self.zonk_term(t.fun, u, default), self.zonk_term(t.arg, u, default))
        if isinstance(t, ir.Abs):
            return ir.Abs(t.binder, z(t.binder_type), self.zonk_term(t.body, u, default))
        if isinstance(t, ir.Case):
            return ir.Case(
                self.zonk_term(t.scrutinee, u, default),
                z(t.scrutinee_type),
                tuple(
                    (self.zonk_pattern(p, u, default), self.zonk_term(b, u, default))
                    for p, b in t.clauses
                ),
            )
        raise TypeError(t)

    def zonk_pattern(self, p: ir.Pattern, u: _Unifier, default: ir.TypeExpr | None) -> ir.Pattern:
        if isinstance(p, ir.PVar):
            return p
        assert isinstance(p, ir.PCon)
        return ir.PCon(
            p.ctor,
            tuple(u.zonk(a, default) for a in p.type_args),
            tuple(self.zonk_pattern(s, u, default) for s in p.subpatterns),
        )


def resolve_types(p: ir.Program) -> ir.Program | list[Diagnostic]:
    """Annotate binders, scrutinees and references by unification."""
    idx = p.by_name()
    el = _Elaborator(idx)
    out: list[ir.Declaration] = []

    def elaborate_equations(
        equations, sig: ir.TypeExpr, decl_name: str
    ) -> tuple[ir.Equation, ...] | None:
        done = []
        for params, rhs in equations:
            u = _Unifier()
            n = len(params)
            try:
                param_tys, result_ty = ir.uncurry(sig, n)
            except AssertionError:
                el.error("Arity", f"{decl_name}: more parameters than the signature allows")
                return None
            env: dict[str, ir.TypeExpr] = {}
            params2 = [
                el.check_pattern(pat, ty, env, u) for pat, ty in zip(params, param_tys)
            ]
            rhs2, rhs_ty = el.infer(rhs, env, u)
            if not u.unify(rhs_ty, result_ty):
                el.error(
                    "Type",
                    f"{decl_name}: right-hand side has type "
                    f"{u.zonk(rhs_ty, ir.TyVar('_'))}, expected {result_ty}",
                )
                return None
            try:
                params3 = [el.zonk_pattern(q, u, None) for q in params2]
                rhs3 = el.zonk_term(rhs2, u, None)
            except _Ambiguous:
                el.error("Type", f"{decl_name}: ambiguous type; add annotations")
                return None
            done.append((tuple(params3), rhs3))
        return tuple(done)

    for d in p.decls:
        el.pos = SourcePos(1, 1)
        if isinstance(d, ir.Fun):
            eqs = elaborate_equations(d.equations, d.signature, d.name)
            out.append(d if eqs is None else ir.Fun(d.name, d.ty_params, d.signature, eqs))
        elif isinstance(d, ir.Const):
            u = _Unifier()
            rhs2, rhs_ty = el.infer(d.rhs, {}, u)
            if not u.unify(rhs_ty, d.signature):
                el.error(
                    "Type",
                    f"{d.name}: right-hand side has type "
                    f"{u.zonk(rhs_ty, ir.TyVar('_'))}, expected {d.signature}",
                )
                out.append(d)
                continue
            try:
                out.append(ir.Const(d.name, d.signature, el.zonk_term(rhs2, u, None)))
            except _Ambiguous:
                el.error("Type", f"{d.name}: ambiguous type; add annotations")
                out.append(d)
        elif isinstance(d, ir.Instance):
            data = idx.datatypes.get(d.ty_con_name)
            cls = idx.classes.get(d.class_name)
            if data is None or cls is None:
                el.error("Scope", f"unknown names in instance {d.class_name}@{d.ty_con_name}")
                out.append(d)
                continue
            # positional type parameters 'a, 'b ... for the instantiated head
            named = dict(d.ty_params)
            vars_ = [chr(ord("a") + i) for i in range(len(data.ty_params))]
            ty_params = tuple((v, named.get(v, ())) for v in vars_)
            head = ir.TyCon(d.ty_con_name, tuple(ir.TyVar(v) for v in vars_))
            new_defs = []
            ok = True
            for mname, eqs in d.method_defs:
                if mname not in idx.methods or idx.methods[mname].name != d.class_name:
                    el.error("Scope", f"{mname!r} is not a method of class {d.class_name}")
                    ok = False
                    continue
                sig = ir.subst_ty(self_sig := idx.method_sig(mname), {cls.ty_param: head})
                eqs2 = elaborate_equations(eqs, sig, f"{d.class_name}@{d.ty_con_name}.{mname}")
                if eqs2 is None:
                    ok = False
                    continue
                new_defs.append((mname, eqs2))
            out.append(
                ir.Instance(d.class_name, d.ty_con_name, ty_params, tuple(new_defs))
                if ok
                else d
            )
        else:
            out.append(d)

    if el.diags:
        return el.diags
    return ir.Program(tuple(out))


def parse_program(src: str, include_prelude: bool = True) -> ParseResult:
    """Parse, classify, validate and elaborate a source file."""
    toks, diags = tokenize(src)
    parser = _Parser(toks)
    decls = parser.program()
    diags.extend(parser.diags)
    if diags:
        return ParseResult(None, diags)
    decls = _classify_patterns(decls)
    if include_prelude:
        decls = list(PRELUDE_DECLS) + decls
    program = ir.Program(tuple(decls))
    for v in ir.validate(program):
        diags.append(Diagnostic(SourcePos(1, 1), "Parse", str(v)))
    if diags:
        return ParseResult(None, diags)
    resolved = resolve_types(program)
    if isinstance(resolved, list):
        return ParseResult(None, resolved)
    leftovers = ir.validate(resolved)
    if leftovers:
        return ParseResult(None, [Diagnostic(SourcePos(1, 1), "Type", str(v)) for v in leftovers])
    return ParseResult(resolved, [])


def parse_term(
    src: str, program: ir.Program, rigidify: bool = True
) -> tuple[ir.Term, ir.TypeExpr] | list[Diagnostic]:
    """Parse and elaborate one term against an already-resolved program.

    Unconstrained type variables left over after unification are
    instantiated to rigid skolems when `rigidify` is set (entry points of
    the oracle runner are parametric, so this is sound)."""
    toks, diags = tokenize(src)
    if diags:
        return diags
    parser = _Parser(toks)
    try:
        raw = parser.term()
    except _ParseError as e:
        return [Diagnostic(e.pos, "Parse", e.message)]
    if not parser.at("eof"):
        return [Diagnostic(parser.peek().pos, "Parse", "trailing input after term")]
    [decl] = _classify_patterns([ir.Const("it", ir.TyVar("_it"), raw)])
    assert isinstance(decl, ir.Const)
    el = _Elaborator(program.by_name())
    u = _Unifier()
    term, ty = el.infer(decl.rhs, {}, u)
    if el.diags:
        return el.diags
    default = ir.TyVar("k0") if rigidify else None
    try:
        return el.zonk_term(term, u, default), u.zonk(ty, default)
    except _Ambiguous:
        return [Diagnostic(SourcePos(1, 1), "Type", "ambiguous type in term")]


# ---------------------------------------------------------------------------
# Pretty printer (used for the parse/print round-trip and fixture upkeep)


def _ty_src(t: ir.TypeExpr, constraints: dict[str, tuple[str, ...]] | None = None, seen=None) -> str:
    seen = seen if seen is not None else set()
    if isinstance(t, ir.TyVar):
        cs = (constraints or {}).get(t.name, ())
        if cs and t.name not in seen:
            seen.add(t.name)
            return f"('{t.name} :: {', '.join(cs)})"
        return f"'{t.name}"
    if isinstance(t, ir.TyCon):
        if not t.args:
            return t.name
        rendered = [_ty_src(a, constraints, seen) for a in t.args]
        if len(rendered) == 1:
            inner = rendered[0]
            if isinstance(t.args[0], (ir.TyFun,)) or (
                isinstance(t.args[0], ir.TyCon) and t.args[0].args
            ):
                inner = f"({inner})"
            return f"{inner} {t.name}"
        return f"({', '.join(rendered)}) {t.name}"
    assert isinstance(t, ir.TyFun)
    lhs = _ty_src(t.arg, constraints, seen)
    if isinstance(t.arg, ir.TyFun):
        lhs = f"({lhs})"
    return f"{lhs} => {_ty_src(t.result, constraints, seen)}"


def _pat_src(p: ir.Pattern, atom: bool = False) -> str:
    if isinstance(p, ir.PVar):
        return p.name
    assert isinstance(p, ir.PCon)
    if not p.subpatterns:
        return p.ctor
    body = p.ctor + " " + " ".join(_pat_src(s, atom=True) for s in p.subpatterns)
    return f"({body})" if atom else body


def _term_src(t: ir.Term, atom: bool = False) -> str:
    if isinstance(t, ir.Var):
        return t.name
    if isinstance(t, ir.Ref):
        return t.name
    if isinstance(t, ir.Lit):
        if isinstance(t.value, str):
            escaped = t.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return str(t.value)
    if isinstance(t, ir.App):
        s = f"{_term_src(t.fun)} {_term_src(t.arg, atom=True)}"
        return f"({s})" if atom else s
    if isinstance(t, ir.Abs):
        s = f"\\{t.binder}. {_term_src(t.body)}"
        return f"({s})" if atom else s
    if isinstance(t, ir.Case):
        clauses = " | ".join(
            f"{_pat_src(p)} => {_term_src(b)}" for p, b in t.clauses
        )
        s = f"case {_term_src(t.scrutinee)} of {clauses}"
        return f"({s})" if atom else s
    raise TypeError(f"cannot print {t!r}")


def _eq_src(name: str, eq: ir.Equation) -> str:
    params, rhs = eq
    lhs = " ".join([name] + [_pat_src(p, atom=True) for p in params])
    return f"{lhs} = {_term_src(rhs)}"


def program_to_source(p: ir.Program) -> str:
    """Surface text that reparses to an identical program."""
    lines: list[str] = []
    for d in p.decls:
        if isinstance(d, ir.Data):
            if d.name in PRELUDE_NAMES:
                continue
            params = ""
            if len(d.ty_params) == 1:
                params = f"'{d.ty_params[0]} "
            elif d.ty_params:
                params = "(" + ", ".join(f"'{v}" for v in d.ty_params) + ") "
            ctors = " | ".join(
                " ".join([c] + [_ty_atom_src(f) for f in fs]) for c, fs in d.ctors
            )
            lines.append(f"datatype {params}{d.name} = {ctors}")
        elif isinstance(d, ir.Fun):
            constraints = {v: tuple(c.class_name for c in cs) for v, cs in d.ty_params if cs}
            lines.append(f"fun {d.name} :: {_ty_src(d.signature, constraints)} where")
            lines.append("  " + "\n| ".join(_eq_src(d.name, e) for e in d.equations))
        elif isinstance(d, ir.Class):
            supers = f" <= {', '.join(d.superclasses)}" if d.superclasses else ""
            lines.append(f"class {d.name}{supers} where")
            for m, sig in d.methods:
                lines.append(f"  {m} :: {_ty_src(sig)}")
        elif isinstance(d, ir.Instance):
            cs = [
                f"'{v} :: {c.class_name}"
                for v, cons in d.ty_params
                for c in cons
            ]
            when = f" when {', '.join(cs)}" if cs else ""
            lines.append(f"instance {d.ty_con_name} :: {d.class_name}{when} where")
            eqs = [
                _eq_src(m, e)
                for m, meths in d.method_defs
                for e in meths
            ]
            lines.append("  " + "\n| ".join(eqs))
        elif isinstance(d, ir.Const):
            lines.append(f"definition {d.name} :: {_ty_src(d.signature)} where")
            lines.append(f"  {d.name} = {_term_src(d.rhs)}")
        lines.append("")
    return "\n".join(lines)


def _ty_atom_src(t: ir.TypeExpr) -> str:
    s = _ty_src(t)
    if isinstance(t, ir.TyFun) or (isinstance(t, ir.TyCon) and t.args):
        return f"({s})"
    return s
