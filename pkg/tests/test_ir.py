import pytest

from mlgo import ir
from helpers import build_fixture


def fig1_program():
    return build_fixture("fig1.fml").program


def test_fig1_validates_clean():
    assert ir.validate(fig1_program()) == []


def test_nonlinear_pattern_is_flagged():
    nat = ir.Data("nat", (), (("Zero", ()), ("Suc", (ir.TyCon("nat"),))))
    lst = ir.Data(
        "list",
        ("a",),
        (("Nil", ()), ("Cons", (ir.TyVar("a"), ir.TyCon("list", (ir.TyVar("a"),))))),
    )
    bad = ir.Fun(
        "hd2",
        (("a", ()),),
        ir.TyFun(ir.TyCon("list", (ir.TyVar("a"),)), ir.TyVar("a")),
        ((
            (ir.PCon("Cons", (ir.TyVar("a"),), (ir.PVar("x"), ir.PVar("x"))),),
            ir.Var("x"),
        ),),
    )
    diags = ir.validate(ir.Program((nat, lst, bad)))
    assert any(d.kind == "NonLinearPattern" and d.decl == "hd2" for d in diags)


def test_ctor_arity_mismatch_is_flagged():
    nat = ir.Data("nat", (), (("Zero", ()), ("Suc", (ir.TyCon("nat"),))))
    bad = ir.Fun(
        "f",
        (),
        ir.TyFun(ir.TyCon("nat"), ir.TyCon("nat")),
        ((
            (ir.PCon("Suc", (), (ir.PVar("x"), ir.PVar("y"))),),
            ir.Var("x"),
        ),),
    )
    diags = ir.validate(ir.Program((nat, bad)))
    assert any(d.kind == "CtorArityMismatch" for d in diags)


def test_equation_arity_mismatch_is_flagged():
    nat = ir.Data("nat", (), (("Zero", ()), ("Suc", (ir.TyCon("nat"),))))
    bad = ir.Fun(
        "f",
        (),
        ir.TyFun(ir.TyCon("nat"), ir.TyFun(ir.TyCon("nat"), ir.TyCon("nat"))),
        (
            ((ir.PVar("x"),), ir.Var("x")),
            ((ir.PVar("x"), ir.PVar("y")), ir.Var("x")),
        ),
    )
    diags = ir.validate(ir.Program((nat, bad)))
    assert any(d.kind == "EquationArityMismatch" for d in diags)


def test_arity_examples():
    p = fig1_program()
    assert ir.arity(p, "hd2") == 1
    assert ir.arity(p, "Suc") == 1
    assert ir.arity(p, "Zero") == 0
    assert ir.arity(p, "fold") == 3


def test_arity_of_definition_is_zero():
    consts = build_fixture("consts.fml").program
    assert ir.arity(consts, "a") == 0


def test_arity_unknown_name():
    with pytest.raises(ir.UnknownName):
        ir.arity(fig1_program(), "frobnicate")


def test_validate_is_deterministic():
    p = fig1_program()
    assert ir.validate(p) == ir.validate(p)


def test_declaration_order_is_irrelevant():
    p = fig1_program()
    reordered = ir.Program(tuple(reversed(p.decls)))
    assert ir.validate(reordered) == []


def test_term_type_of_annotated_terms():
    res = build_fixture("fig1.fml")
    idx = res.program.by_name()
    sum_fun = idx.funs["sum"]
    (params, rhs) = sum_fun.equations[0]
    env = {params[0].name: ir.uncurry(sum_fun.signature, 1)[0][0]}
    assert ir.term_type(rhs, idx, env) == ir.TyVar("a")
