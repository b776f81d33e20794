"""Moderate-size randomized checks; the full budgets run in the
acceptance module."""

import random

import pytest

from mlgo import dict_pass, go_ast, ir, oracle, parser
from helpers import (
    ClassProgramGen,
    ProgramGen,
    build_generated,
    differential_check,
    generate_program,
)


def test_generated_programs_validate_and_agree():
    agree = fuel = 0
    for seed in range(40):
        program, entries = generate_program(seed)
        assert ir.validate(program) == []
        result = build_generated(program)
        for call in entries:
            elaborated = dict_pass.elaborate_term(program, call)
            outcome = differential_check(result, elaborated, o_fuel=30_000, g_fuel=150_000)
            if outcome == "agree":
                agree += 1
            else:
                fuel += 1
    assert agree >= 150
    assert agree > 3 * fuel  # the suite keeps most runs meaningful


def test_duality_of_expression_and_statement_translations():
    checked = 0
    for seed in range(25):
        gen = ProgramGen(seed)
        program, _ = gen.gen_program()
        result = build_generated(program)
        rng = random.Random(seed * 31 + 7)
        for _ in range(3):
            ty = rng.choice(gen.ground_types)
            term = gen.gen_closed(ty, 3)
            assert ir.validate(program) == []
            sides = {}
            for wrap in ("expr", "iife"):
                entry = result.translator.translate_entry(term, "Drive", wrap=wrap)
                assert go_ast.check_wf(result.decls + [entry]) == []
                try:
                    sides[wrap] = go_ast.render_gvalue(
                        go_ast.geval(result.decls + [entry], "Drive", [], fuel=200_000)
                    )
                except go_ast.GoPanic:
                    sides[wrap] = "panic: match failed"
                except go_ast.GoOutOfFuel:
                    sides[wrap] = None
            if None in sides.values():
                continue
            assert sides["expr"] == sides["iife"]
            checked += 1
    assert checked >= 40


def test_erasure_soundness_sample():
    for seed in range(12):
        gen = ClassProgramGen(seed)
        src, calls = gen.gen()
        parsed = parser.parse_program(src)
        assert parsed.ok(), [str(d) for d in parsed.diagnostics][:3]
        program = parsed.program
        dp = dict_pass.elaborate(program)
        for call in calls:
            term, _ = parser.parse_term(call, program)
            dynamic = oracle.eval_with_instances(program, term, fuel=200_000)
            static = oracle.evaluate(
                dp.program, dict_pass.elaborate_term(program, term), fuel=200_000
            )
            assert dynamic == static, call


def test_elaborated_random_class_programs_pass_wf():
    from helpers import build_generated  # noqa: F401  (signature parity)
    from mlgo import codegen

    gen = ClassProgramGen(3)
    src, calls = gen.gen()
    parsed = parser.parse_program(src)
    assert parsed.ok()
    dp = dict_pass.elaborate(parsed.program)
    tr = codegen.Translator(dp)
    decls = tr.translate_program()
    assert go_ast.check_wf(decls) == []
