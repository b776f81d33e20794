"""Pipeline front door: parse, elaborate, generate, render, run.

Subcommands:
    compile <file> --out DIR --package NAME [--adapt FILE] [--go-check]
    run <file> --entry NAME --args "<terms>" [--fuel N]
    dump-ir <file>
    vectors <file> --spec FILE [--out FILE]

Exit codes: 1 parse, 2 elaboration/type, 3 code generation, 4 external
toolchain, 5 match failure, 6 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import subprocess
import sys
from dataclasses import dataclass, field

from . import codegen, dict_pass, go_ast, ir, oracle, parser
from .prelude import PRELUDE_NAMES


@dataclass
class CompileJob:
    input_path: str
    output_dir: str = "."
    package_name: str = "main"
    adapt_path: str | None = None
    mode: str = "compile"  # compile | run | dump-ir | check | vectors
    entry: str | None = None
    entry_args: str = ""
    go_check: bool = False
    fuel: int = oracle.DEFAULT_FUEL


@dataclass
class CompileResult:
    program: ir.Program
    dict_program: dict_pass.DictProgram
    translator: codegen.Translator
    decls: list
    source: str
    diagnostics: list = field(default_factory=list)


class StageError(Exception):
    def __init__(self, code: int, messages: list[str]):
        super().__init__("; ".join(messages))
        self.code = code
        self.messages = messages


def build(src: str, table: codegen.AdaptationTable | None = None, package: str = "main") -> CompileResult:
    """Full pipeline on source text; raises StageError with the CLI exit
    code of the failing stage."""
    result = parser.parse_program(src)
    if not result.ok():
        parse_kinds = {"Lex", "Parse"}
        code = 1 if any(d.kind in parse_kinds for d in result.diagnostics) else 2
        raise StageError(code, [str(d) for d in result.diagnostics])
    program = result.program
    table = table if table is not None else codegen.AdaptationTable.default()
    try:
        dp = dict_pass.elaborate(program)
        codegen.apply_adaptation(table, dp)
    except (dict_pass.MissingInstance, dict_pass.AmbiguousInstance) as e:
        raise StageError(2, [str(e)]) from e
    except codegen.CodegenError as e:
        raise StageError(3, [str(e)]) from e
    try:
        tr = codegen.Translator(dp, table)
        decls = tr.translate_program()
    except codegen.CodegenError as e:
        raise StageError(3, [str(e)]) from e
    wf = go_ast.check_wf(decls)
    if wf:
        raise StageError(3, [f"generated code is ill-formed: {d}" for d in wf])
    return CompileResult(program, dp, tr, decls, go_ast.render(decls, package))


def load_table(path: str | None) -> codegen.AdaptationTable:
    if path is None:
        return codegen.AdaptationTable.default()
    return codegen.AdaptationTable.load(path)


def eval_generated_call(
    result: CompileResult, elaborated: ir.Term, fuel: int = oracle.DEFAULT_FUEL
) -> go_ast.GValue:
    """Run one elaborated call term against the generated program: the
    call is translated into a synthetic entry function and executed by the
    fragment evaluator."""
    entry = result.translator.translate_entry(elaborated, "Drive")
    return go_ast.geval(result.decls + [entry], "Drive", [], fuel=fuel)


# ---------------------------------------------------------------------------
# compile


def compile_file(job: CompileJob) -> int:
    try:
        src = open(job.input_path, encoding="utf-8").read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        result = build(src, load_table(job.adapt_path), job.package_name)
    except StageError as e:
        for m in e.messages:
            print(m, file=sys.stderr)
        return e.code
    os.makedirs(job.output_dir, exist_ok=True)
    out_path = os.path.join(job.output_dir, f"{job.package_name}.go")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(result.source)
    manifest = {
        "package": job.package_name,
        "renames": dict(sorted(result.translator.names.rename_map.items())),
    }
    with open(
        os.path.join(job.output_dir, f"{job.package_name}.manifest.json"),
        "w",
        encoding="utf-8",
    ) as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if job.go_check:
        code = run_go_toolchain(job.output_dir, job.package_name)
        if code != 0:
            return 4
    return 0


def run_go_toolchain(output_dir: str, package_name: str) -> int:
    go_bin = os.environ.get("GO_BIN", "go")
    if shutil.which(go_bin) is None:
        print(f"error: Go toolchain {go_bin!r} not found", file=sys.stderr)
        return 1
    mod_path = os.path.join(output_dir, "go.mod")
    if not os.path.exists(mod_path):
        with open(mod_path, "w", encoding="utf-8") as fh:
            fh.write(f"module {package_name}\n\ngo 1.18\n")
    proc = subprocess.run(
        [go_bin, "build", "./..."], cwd=output_dir, capture_output=True, text=True
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
    return proc.returncode


# ---------------------------------------------------------------------------
# run


def resolve_entry_call(
    result: CompileResult, entry: str, args_text: str
) -> tuple[ir.Term, ir.TypeExpr]:
    idx = result.program.by_name()
    if entry not in idx.funs and entry not in idx.consts:
        raise StageError(2, [f"unknown entry {entry!r}"])
    text = entry if not args_text.strip() else f"{entry} {args_text}"
    parsed = parser.parse_term(text, result.program)
    if isinstance(parsed, list):
        raise StageError(2, [str(d) for d in parsed])
    term, ty = parsed
    elaborated = dict_pass.elaborate_term(result.program, term)
    return elaborated, ty


def run_entry(job: CompileJob) -> int:
    try:
        src = open(job.input_path, encoding="utf-8").read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        result = build(src, load_table(job.adapt_path))
        term, _ = resolve_entry_call(result, job.entry or "", job.entry_args)
    except StageError as e:
        for m in e.messages:
            print(m, file=sys.stderr)
        return e.code
    try:
        value = oracle.evaluate(result.dict_program.program, term, fuel=job.fuel)
    except oracle.MatchFailed:
        print("match failed")
        return 5
    except oracle.OutOfFuel:
        print("out of fuel", file=sys.stderr)
        return 6
    print(oracle.render_value(value, result.translator.names.rename_map))
    return 0


# ---------------------------------------------------------------------------
# dump-ir


def type_to_json(t: ir.TypeExpr):
    if isinstance(t, ir.TyVar):
        return {"kind": "tyvar", "name": t.name}
    if isinstance(t, ir.TyCon):
        return {"kind": "tycon", "name": t.name, "args": [type_to_json(a) for a in t.args]}
    assert isinstance(t, ir.TyFun)
    return {"kind": "tyfun", "arg": type_to_json(t.arg), "result": type_to_json(t.result)}


def pattern_to_json(p: ir.Pattern):
    if isinstance(p, ir.PVar):
        return {"kind": "pvar", "name": p.name}
    assert isinstance(p, ir.PCon)
    return {
        "kind": "pcon",
        "name": p.ctor,
        "typeArgs": [type_to_json(a) for a in p.type_args],
        "subpatterns": [pattern_to_json(s) for s in p.subpatterns],
    }


def term_to_json(t: ir.Term):
    if isinstance(t, ir.Var):
        return {"kind": "var", "name": t.name}
    if isinstance(t, ir.Ref):
        return {"kind": "ref", "name": t.name, "typeArgs": [type_to_json(a) for a in t.type_args]}
    if isinstance(t, ir.App):
        return {"kind": "app", "fun": term_to_json(t.fun), "arg": term_to_json(t.arg)}
    if isinstance(t, ir.Abs):
        return {
            "kind": "abs",
            "binder": t.binder,
            "binderType": type_to_json(t.binder_type),
            "body": term_to_json(t.body),
        }
    if isinstance(t, ir.Case):
        return {
            "kind": "case",
            "scrutinee": term_to_json(t.scrutinee),
            "scrutineeType": type_to_json(t.scrutinee_type),
            "clauses": [
                {"pattern": pattern_to_json(p), "body": term_to_json(b)}
                for p, b in t.clauses
            ],
        }
    if isinstance(t, ir.Lit):
        return {"kind": "lit", "value": t.value, "type": type_to_json(t.type)}
    assert isinstance(t, ir.Proj)
    return {
        "kind": "proj",
        "base": term_to_json(t.base),
        "typeName": t.type_name,
        "index": t.index,
    }


def equations_to_json(eqs):
    return [
        {"params": [pattern_to_json(p) for p in ps], "rhs": term_to_json(rhs)}
        for ps, rhs in eqs
    ]


def decl_to_json(d: ir.Declaration):
    if isinstance(d, ir.Data):
        return {
            "kind": "data",
            "name": d.name,
            "tyParams": list(d.ty_params),
            "ctors": [
                {"name": c, "fields": [type_to_json(f) for f in fs]}
                for c, fs in d.ctors
            ],
        }
    if isinstance(d, ir.Fun):
        return {
            "kind": "fun",
            "name": d.name,
            "tyParams": [
                {"name": v, "constraints": [c.class_name for c in cs]}
                for v, cs in d.ty_params
            ],
            "signature": type_to_json(d.signature),
            "equations": equations_to_json(d.equations),
        }
    if isinstance(d, ir.Class):
        return {
            "kind": "class",
            "name": d.name,
            "tyParam": d.ty_param,
            "superclasses": list(d.superclasses),
            "methods": [{"name": m, "signature": type_to_json(s)} for m, s in d.methods],
        }
    if isinstance(d, ir.Instance):
        return {
            "kind": "instance",
            "name": f"{d.class_name}@{d.ty_con_name}",
            "className": d.class_name,
            "tyConName": d.ty_con_name,
            "tyParams": [
                {"name": v, "constraints": [c.class_name for c in cs]}
                for v, cs in d.ty_params
            ],
            "methodDefs": [
                {"name": m, "equations": equations_to_json(eqs)}
                for m, eqs in d.method_defs
            ],
        }
    assert isinstance(d, ir.Const)
    return {
        "kind": "const",
        "name": d.name,
        "signature": type_to_json(d.signature),
        "rhs": term_to_json(d.rhs),
    }


def program_to_json(p: ir.Program, include_prelude: bool = False) -> dict:
    decls = [
        decl_to_json(d)
        for d in p.decls
        if include_prelude or getattr(d, "name", "") not in PRELUDE_NAMES
    ]
    return {"decls": decls}


def dump_ir(job: CompileJob) -> int:
    try:
        src = open(job.input_path, encoding="utf-8").read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    result = parser.parse_program(src)
    if not result.ok():
        for d in result.diagnostics:
            print(d, file=sys.stderr)
        return 1 if any(d.kind in ("Lex", "Parse") for d in result.diagnostics) else 2
    print(json.dumps(program_to_json(result.program), indent=2))
    return 0


# ---------------------------------------------------------------------------
# vectors


def export_vectors(result: CompileResult, specs: list[dict], fuel: int) -> list[dict]:
    """Replay inputs against the reference interpreter and freeze the
    renderings for the external harness.  An argument given as JSON null
    (or "!nil") denotes the target-side nil scrutinee, whose contract is a
    "match failed" panic."""
    rename = result.translator.names.rename_map
    out: list[dict] = []
    for spec in specs:
        entry = spec["entry"]
        args = spec.get("args", [])
        go_entry = rename.get(entry, entry)
        if any(a is None or a == "!nil" for a in args):
            out.append(
                {
                    "entry": go_entry,
                    "args": [("!nil" if a in (None, "!nil") else a) for a in args],
                    "expectedPanic": True,
                }
            )
            continue
        term, _ = resolve_entry_call(result, entry, " ".join(args))
        try:
            value = oracle.evaluate(result.dict_program.program, term, fuel=fuel)
        except oracle.MatchFailed:
            out.append({"entry": go_entry, "args": list(args), "expectedPanic": True})
            continue
        except oracle.OutOfFuel:
            raise StageError(6, [f"fuel exhausted evaluating {entry}"]) from None
        out.append(
            {
                "entry": go_entry,
                "args": list(args),
                "expected": oracle.render_value(value, rename),
            }
        )
    return out


def vectors_cmd(job: CompileJob, spec_path: str, out_path: str | None) -> int:
    try:
        src = open(job.input_path, encoding="utf-8").read()
        with open(spec_path, encoding="utf-8") as fh:
            specs = json.load(fh)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if isinstance(specs, dict):
        specs = specs.get("vectors", [])
    try:
        result = build(src, load_table(job.adapt_path))
        vectors = export_vectors(result, specs, job.fuel)
    except StageError as e:
        for m in e.messages:
            print(m, file=sys.stderr)
        return e.code
    text = json.dumps(vectors, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="mlgo", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("compile", help="translate a source file to a Go package")
    c.add_argument("file")
    c.add_argument("--out", default=".")
    c.add_argument("--package", default="main")
    c.add_argument("--adapt")
    c.add_argument("--go-check", action="store_true")

    r = sub.add_parser("run", help="evaluate an entry call with the reference interpreter")
    r.add_argument("file")
    r.add_argument("--entry", required=True)
    r.add_argument("--args", default="")
    r.add_argument("--adapt")
    r.add_argument("--fuel", type=int, default=oracle.DEFAULT_FUEL)

    d = sub.add_parser("dump-ir", help="print the elaborated program as JSON")
    d.add_argument("file")

    v = sub.add_parser("vectors", help="export oracle-checked input/output vectors")
    v.add_argument("file")
    v.add_argument("--spec", required=True)
    v.add_argument("--out")
    v.add_argument("--adapt")
    v.add_argument("--fuel", type=int, default=oracle.DEFAULT_FUEL)

    ns = ap.parse_args(argv)
    if ns.cmd == "compile":
        job = CompileJob(
            ns.file,
            output_dir=ns.out,
            package_name=ns.package,
            adapt_path=ns.adapt,
            go_check=ns.go_check,
        )
        return compile_file(job)
    if ns.cmd == "run":
        job = CompileJob(ns.file, adapt_path=ns.adapt, mode="run", entry=ns.entry, entry_args=ns.args, fuel=ns.fuel)
        return run_entry(job)
    if ns.cmd == "dump-ir":
        return dump_ir(CompileJob(ns.file, mode="dump-ir"))
    if ns.cmd == "vectors":
        job = CompileJob(ns.file, adapt_path=ns.adapt, mode="vectors", fuel=ns.fuel)
        return vectors_cmd(job, ns.spec, ns.out)
    return 2


if __name__ == "__main__":
    sys.exit(main())
