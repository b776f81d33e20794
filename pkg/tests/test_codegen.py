import pytest

from mlgo import codegen, dict_pass, go_ast as ga, ir, oracle, parser, emit
from helpers import build_fixture, go_tokens, run_call


@pytest.fixture(scope="module")
def fig1():
    return build_fixture("fig1.fml")


# -- types --------------------------------------------------------------


def test_translate_type_sum_and_arrow(fig1):
    tr = fig1.translator
    assert tr.translate_type(ir.TyCon("nat"), {}) == ga.InterfaceRef("Nat")
    arrow = ir.TyFun(
        ir.TyCon("list", (ir.TyVar("a"),)), ir.TyCon("option", (ir.TyVar("a"),))
    )
    assert tr.translate_type(arrow, {"a": "a"}) == ga.FuncType(
        (ga.InterfaceRef("List", (ga.Param("a"),)),),
        (ga.InterfaceRef("Option", (ga.Param("a"),)),),
    )


def test_translate_type_adapted_bool(fig1):
    assert fig1.translator.translate_type(ir.TyCon("bool"), {}) == ga.Raw("bool")


def test_single_constructor_type_uses_struct_reference():
    src = "datatype box = Boxed int\nfun get :: box => int where get (Boxed n) = n\n"
    res = emit.build(src)
    tr = res.translator
    assert tr.translate_type(ir.TyCon("box"), {}) == ga.StructRef("Box")
    type_names = [d.name for d in res.decls if isinstance(d, ga.TypeDecl)]
    assert type_names == ["Box"]  # struct named after the type, no interface
    assert "Boxed_dest" in [d.name for d in res.decls if isinstance(d, ga.FuncDecl)]
    assert "TypeConv" not in repr(res.decls)


# -- datatypes ------------------------------------------------------------


def test_translate_datatype_nat_golden(fig1):
    decls = fig1.translator.translate_datatype(fig1.program.by_name().datatypes["nat"])
    text = ga.render(decls, "p").split("\n\n", 2)[2]
    expected = """
type Nat any;
type Zero struct { };
type Suc struct { A Nat; };
func Suc_dest(p Suc)(Nat) { return p.A; }
"""
    assert go_tokens(text) == go_tokens(expected)


def test_translate_datatype_list_golden(fig1):
    decls = fig1.translator.translate_datatype(fig1.program.by_name().datatypes["list"])
    text = ga.render(decls, "p").split("\n\n", 2)[2]
    expected = """
type List[a any] interface {};
type Nil[a any] struct { };
type Cons[a any] struct { A a; Aa List[a]; };
func Cons_dest[a any](p Cons[a])(a, List[a]) { return p.A, p.Aa; }
"""
    assert go_tokens(text) == go_tokens(expected)


def test_destructors_omitted_for_fieldless_constructors(fig1):
    decls = fig1.translator.translate_datatype(fig1.program.by_name().datatypes["nat"])
    names = [d.name for d in decls if isinstance(d, ga.FuncDecl)]
    assert names == ["Suc_dest"]


def test_invented_field_names_scheme():
    assert codegen.invented_field_names(4) == ["A", "Aa", "Ab", "Ac"]
    assert codegen.invented_field_names(28)[26] == "Az"
    assert codegen.invented_field_names(28)[27] == "Aaa"


# -- saturation -----------------------------------------------------------


def spine_of(res, text):
    return run_call(res, text)


def test_classify_exact_call_with_dictionary(fig1):
    term = spine_of(fig1, "sum (Cons Zero Nil)")
    report, args = codegen.classify_application(term, fig1.dict_program)
    assert report.kind == "function"
    assert report.declared_arity == 2 and report.dict_count == 1
    assert report.classification == "exact"


def test_classify_underapplied_method(fig1):
    term = run_call(fig1, "plus Zero")
    report, _ = codegen.classify_application(term, fig1.dict_program)
    assert report.kind == "method"
    assert (report.declared_arity, report.actual_args) == (2, 1)
    assert report.classification == "under"


def test_classify_constructor_never_over(fig1):
    term = run_call(fig1, "Suc Zero")
    report, _ = codegen.classify_application(term, fig1.dict_program)
    assert report.kind == "constructor" and report.classification == "exact"


def test_classify_over_application():
    src = (
        "datatype nat = Zero | Suc nat\n"
        "fun constf :: nat => nat => nat where constf x = \\y. x\n"
    )
    res = emit.build(src)
    term = run_call(res, "constf Zero (Suc Zero)")
    report, _ = codegen.classify_application(term, res.dict_program)
    assert report.classification == "over"
    assert (report.declared_arity, report.actual_args) == (1, 2)
    # semantics agree as well
    l = oracle.evaluate(res.dict_program.program, term)
    r = emit.eval_generated_call(res, term)
    assert oracle.render_value(l) == ga.render_gvalue(r)


def test_constructor_expression_is_conversion_wrapped(fig1):
    term = run_call(fig1, "Suc Zero")
    entry = fig1.translator.translate_entry(term, "T")
    ret = entry.body
    assert isinstance(ret, ga.Return)
    conv = ret.exprs[0]
    assert isinstance(conv, ga.TypeConv)
    assert conv.to_interface == ga.InterfaceRef("Nat")
    assert isinstance(conv.inner, ga.StructLit) and conv.inner.type_name == "Suc"


def test_eta_expansion_depth_matches_missing_arity(fig1):
    term = run_call(fig1, "plus Zero")  # method of arity 2 with one argument
    entry = fig1.translator.translate_entry(term, "T")
    e = entry.body.exprs[0]
    depth = 0
    while isinstance(e, ga.FuncLit):
        depth += 1
        assert len(e.params) == 1
        e = e.body.exprs[0]
    assert depth == 1

    # a bare method reference passed as an argument: depth two
    term = run_call(fig1, "fold (+) Nil Zero")
    entry = fig1.translator.translate_entry(term, "T")
    call = entry.body.exprs[0]
    assert isinstance(call, ga.Call) and call.func_name == "Fold"
    e = call.args[0]
    depth = 0
    while isinstance(e, ga.FuncLit):
        depth += 1
        assert len(e.params) == 1
        e = e.body.exprs[0]
    assert depth == 2


def test_dictionary_parameters_precede_user_parameters(fig1):
    decl = [d for d in fig1.decls if isinstance(d, ga.FuncDecl) and d.name == "Sum"][0]
    assert [n for n, _ in decl.params] == ["a_", "xs"]
    assert decl.params[0][1] == ga.StructRef("Monoid", (ga.Param("a"),))


# -- functions ------------------------------------------------------------


def test_case_form_and_equations_translate_identically():
    a = build_fixture("hd2_case.fml", package="p")
    b = build_fixture("hd2_equations.fml", package="p")
    assert a.source == b.source


def test_variable_parameter_names_come_from_first_clause():
    res = build_fixture("rbt.fml")
    bali = [d for d in res.decls if isinstance(d, ga.FuncDecl) and d.name == "BaliL"][0]
    assert [n for n, _ in bali.params] == ["x0", "c", "t4"]


def test_constants_become_nullary_functions():
    res = build_fixture("consts.fml")
    a = [d for d in res.decls if isinstance(d, ga.FuncDecl) and d.name == "A"][0]
    assert a.params == () and isinstance(a.body, ga.Return)
    lit = a.body.exprs[0]
    assert isinstance(lit, ga.Prim) and lit.op == "int_lit" and lit.value == 10
    # a constant referencing another constant re-evaluates it per use
    assert "(new(big.Int)).Add(A(), A())" in res.source
    v = emit.eval_generated_call(res, run_call(res, "b"))
    assert ga.render_gvalue(v) == "20"


def test_adaptation_table_arity_mismatch_rejected(fig1):
    table = codegen.AdaptationTable.default()
    table.consts["int_plus"] = codegen.ConstAdaptation("(%1)", 1, ())
    with pytest.raises(codegen.CodegenError):
        codegen.apply_adaptation(table, fig1.dict_program)


def test_empty_adaptation_table_is_identity(fig1):
    dp = fig1.dict_program
    assert codegen.apply_adaptation(codegen.AdaptationTable.empty(), dp) is dp


def test_adapted_literal_and_operation():
    res = build_fixture("int_sum.fml")
    assert '"math/big"' in res.source
    assert "(new(big.Int)).Add(" in res.source
    e = run_call(res, "sum (Cons 2 (Cons 40 Nil))")
    assert ga.render_gvalue(emit.eval_generated_call(res, e)) == "42"
    assert oracle.render_value(oracle.evaluate(res.dict_program.program, e)) == "42"


def test_unadapted_sum_types_translate_structurally():
    # with an empty table, the prelude booleans are just another datatype
    src = "fun invert :: bool => bool where invert True = False | invert False = True\n"
    parsed = parser.parse_program(src)
    assert parsed.ok()
    dp = dict_pass.elaborate(parsed.program)
    tr = codegen.Translator(dp, codegen.AdaptationTable.empty())
    decls = tr.translate_program()
    assert ga.check_wf(decls) == []
    names = [d.name for d in decls if isinstance(d, ga.TypeDecl)]
    assert "Bool" in names and "True" in names and "False" in names


def test_patterns_over_adapted_types_are_rejected():
    src = (
        "datatype holder = H bool\n"
        "fun f :: holder => bool where f (H True) = False | f (H False) = True\n"
    )
    parsed = parser.parse_program(src)
    assert parsed.ok()
    dp = dict_pass.elaborate(parsed.program)
    tr = codegen.Translator(dp, codegen.AdaptationTable.default())
    decls = tr.translate_program()  # boolean constructors compare by value
    assert ga.check_wf(decls) == []
    text = ga.render(decls)
    assert "== true" in text or "== false" in text


def test_clause_isolation_blocks(fig1):
    hd2 = [d for d in fig1.decls if isinstance(d, ga.FuncDecl) and d.name == "Hd2"][0]
    blocks = 0
    s = hd2.body
    while s is not None:
        assert isinstance(s, (ga.Block, ga.Panic))
        if isinstance(s, ga.Panic):
            break
        blocks += 1
        s = s.rest
    assert blocks == 3


def test_every_fixture_output_passes_check_wf():
    for name in ("fig1.fml", "hd2_case.fml", "rbt.fml", "int_sum.fml", "consts.fml"):
        res = build_fixture(name)
        assert ga.check_wf(res.decls) == []
