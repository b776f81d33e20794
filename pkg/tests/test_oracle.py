import random

import pytest

from mlgo import dict_pass, ir, oracle, parser
from helpers import build_fixture, run_call

ZERO = oracle.OCon("Zero")


def suc(v):
    return oracle.OCon("Suc", (v,))


def olist(*items):
    out = oracle.OCon("Nil")
    for v in reversed(items):
        out = oracle.OCon("Cons", (v, out))
    return out


@pytest.fixture(scope="module")
def fig1():
    return build_fixture("fig1.fml")


def test_hd2_nil(fig1):
    v = oracle.evaluate(fig1.dict_program.program, run_call(fig1, "hd2 Nil"))
    assert v == oracle.OCon("None")


def test_hd2_two_element_list(fig1):
    call = "hd2 (Cons Zero (Cons (Suc Zero) Nil))"
    v = oracle.evaluate(fig1.dict_program.program, run_call(fig1, call))
    assert v == oracle.OCon("Some", (suc(ZERO),))


def test_sum_of_two_ones(fig1):
    call = "sum (Cons (Suc Zero) (Cons (Suc Zero) Nil))"
    v = oracle.evaluate(fig1.dict_program.program, run_call(fig1, call))
    assert v == suc(suc(ZERO))


def test_match_variable_pattern_binds():
    assert oracle.match(ir.PVar("x"), suc(ZERO)) == {"x": suc(ZERO)}


def test_match_structural():
    pat = ir.PCon("Cons", (), (ir.PVar("x"), ir.PCon("Nil", (), ())))
    assert oracle.match(pat, olist(ZERO)) == {"x": ZERO}


def test_match_inner_mismatch():
    pat = ir.PCon(
        "Cons", (), (ir.PVar("x"), ir.PCon("Cons", (), (ir.PVar("y"), ir.PVar("ys"))))
    )
    assert oracle.match(pat, olist(ZERO)) is None


def test_match_binding_domain_is_linear_pattern_vars():
    rng = random.Random(5)
    for _ in range(50):
        depth = rng.randint(0, 3)

        def gen_pat(d):
            if d == 0 or rng.random() < 0.4:
                return ir.PVar(f"v{rng.randrange(10**6)}")
            return ir.PCon("Cons", (), (gen_pat(d - 1), gen_pat(d - 1)))

        def gen_val(d):
            if d == 0:
                return ZERO
            return oracle.OCon("Cons", (gen_val(d - 1), gen_val(d - 1)))

        pat = gen_pat(depth)
        bound = oracle.match(pat, gen_val(depth))
        if bound is not None:
            assert sorted(bound) == sorted(ir.pattern_vars(pat))


def test_determinism(fig1):
    call = run_call(fig1, "sum (Cons (Suc Zero) Nil)")
    a = oracle.evaluate(fig1.dict_program.program, call, fuel=5000)
    b = oracle.evaluate(fig1.dict_program.program, call, fuel=5000)
    assert a == b


def test_fuel_monotonicity(fig1):
    call = run_call(fig1, "sum (Cons (Suc Zero) (Cons (Suc Zero) Nil))")
    program = fig1.dict_program.program
    # find the minimal sufficient fuel, then check larger budgets agree
    lo = None
    for fuel in range(1, 3000):
        try:
            lo = (fuel, oracle.evaluate(program, call, fuel=fuel))
            break
        except oracle.OutOfFuel:
            continue
    assert lo is not None
    for extra in (1, 7, 100, 10000):
        assert oracle.evaluate(program, call, fuel=lo[0] + extra) == lo[1]


def test_out_of_fuel(fig1):
    call = run_call(fig1, "sum (Cons (Suc Zero) Nil)")
    with pytest.raises(oracle.OutOfFuel):
        oracle.evaluate(fig1.dict_program.program, call, fuel=3)


def test_match_failure_surfaces(fig1):
    src = (
        "datatype nat = Zero | Suc nat\n"
        "fun pred :: nat => nat where pred (Suc n) = n\n"
    )
    res = parser.parse_program(src)
    assert res.ok()
    term, _ = parser.parse_term("pred Zero", res.program)
    with pytest.raises(oracle.MatchFailed):
        oracle.evaluate(res.program, term)


def test_substitution_lemma_on_random_closed_terms(fig1):
    """eval((\\x. b) a) equals eval(b[x := a]) for generated closed a, b."""
    rng = random.Random(99)
    program = fig1.dict_program.program
    nat = ir.TyCon("nat")

    def gen_ground(d):
        if d == 0:
            return ir.Ref("Zero", ())
        return ir.App(ir.Ref("Suc", ()), gen_ground(d - 1))

    def gen_body(d):
        roll = rng.random()
        if d == 0 or roll < 0.3:
            return ir.Var("x")
        if roll < 0.6:
            return ir.App(ir.Ref("Suc", ()), gen_body(d - 1))
        return ir.Case(
            gen_body(d - 1),
            nat,
            (
                (ir.PCon("Zero", (), ()), ir.Var("x")),
                (ir.PCon("Suc", (), (ir.PVar("n"),)), ir.Var("n")),
            ),
        )

    def subst(t, x, a):
        if isinstance(t, ir.Var):
            return a if t.name == x else t
        if isinstance(t, ir.App):
            return ir.App(subst(t.fun, x, a), subst(t.arg, x, a))
        if isinstance(t, ir.Case):
            return ir.Case(
                subst(t.scrutinee, x, a),
                t.scrutinee_type,
                tuple(
                    (p, body if x in ir.pattern_vars(p) else subst(body, x, a))
                    for p, body in t.clauses
                ),
            )
        return t

    for _ in range(60):
        a = gen_ground(rng.randint(0, 3))
        b = gen_body(rng.randint(1, 3))
        applied = ir.App(ir.Abs("x", nat, b), a)
        direct = subst(b, "x", a)
        assert oracle.evaluate(program, applied) == oracle.evaluate(program, direct)


def test_render_value_formats():
    assert oracle.render_value(oracle.OCon("None")) == "None"
    assert (
        oracle.render_value(oracle.OCon("Some", (suc(ZERO),))) == "Some(Suc(Zero))"
    )
    assert oracle.render_value(oracle.OInt(12345678901234567890)) == "12345678901234567890"
    assert oracle.render_value(oracle.OStr('a"b')) == '"a\\"b"'
    assert oracle.render_value(oracle.OBool(True)) == "true"


def test_eval_with_instances_dispatches_dynamically(fig1):
    term, _ = parser.parse_term("sum (Cons (Suc Zero) (Cons (Suc Zero) Nil))", fig1.program)
    assert oracle.eval_with_instances(fig1.program, term) == suc(suc(ZERO))
