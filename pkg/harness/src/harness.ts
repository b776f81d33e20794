// Vector replay: decode constructor terms into the generated encoding,
// invoke entries through the evaluator, and compare canonical renderings.

import * as fs from "node:fs";
import * as path from "node:path";

import { Interp, render, TEnv, Type, Value } from "./eval";
import { parseProgram, Program } from "./goparse";

export interface Vector {
  entry: string;
  args: string[];
  expected?: string;
  expectedPanic?: boolean;
}

export interface Sexp {
  head: string;
  args: Sexp[];
}

export function parseSexp(src: string): Sexp {
  const toks = src.replace(/\(/g, " ( ").replace(/\)/g, " ) ").trim().split(/\s+/);
  let pos = 0;
  function node(): Sexp {
    const tok = toks[pos++];
    if (tok === undefined || tok === ")") throw new Error(`bad term ${src}`);
    if (tok !== "(") return { head: tok, args: [] };
    const head = toks[pos++];
    const out: Sexp = { head, args: [] };
    while (pos < toks.length && toks[pos] !== ")") out.args.push(node());
    if (toks[pos++] !== ")") throw new Error(`missing ')' in ${src}`);
    return out;
  }
  const n = node();
  if (pos !== toks.length) throw new Error(`trailing input in ${src}`);
  return n;
}

export interface FixtureConfig {
  // per-entry instantiation and leading dictionary arguments, the
  // hand-written wrapper knowledge of the replay
  entries: Record<string, { typeArgs: Type[]; dictCalls?: string[] }>;
}

export class Fixture {
  program: Program;
  interp: Interp;
  renames: Record<string, string>;
  config: FixtureConfig;

  constructor(dir: string, pkg: string, config: FixtureConfig) {
    const source = fs.readFileSync(path.join(dir, `${pkg}.go`), "utf-8");
    this.program = parseProgram(source);
    this.interp = new Interp(this.program);
    const manifest = JSON.parse(
      fs.readFileSync(path.join(dir, `${pkg}.manifest.json`), "utf-8")
    );
    this.renames = manifest.renames;
    this.config = config;
  }

  vectors(dir: string): Vector[] {
    return JSON.parse(fs.readFileSync(path.join(dir, "vectors.json"), "utf-8"));
  }

  /** Build a value of the target encoding from a constructor term. */
  decode(term: Sexp, expected: Type): Value {
    if (/^[0-9]+$/.test(term.head)) {
      return { k: "int", v: BigInt(term.head) };
    }
    if (term.head === "true" || term.head === "false") {
      return { k: "bool", v: term.head === "true" };
    }
    const goName = this.renames[term.head] ?? term.head;
    if (expected.k !== "named") throw new Error(`cannot decode at type ${JSON.stringify(expected)}`);
    const expectedDecl = this.interp.types.get(expected.name);
    if (expectedDecl === undefined) throw new Error(`unknown type ${expected.name}`);

    // the struct the constructor builds: either the expected type itself
    // (single-constructor encoding) or a constructor struct of the
    // expected interface
    const structName = expectedDecl.body.kind === "struct" ? expected.name : goName;
    const structDecl = this.interp.types.get(structName);
    if (structDecl === undefined || structDecl.body.kind !== "struct") {
      throw new Error(`no constructor struct for ${term.head}`);
    }
    const tenv: TEnv = new Map(structDecl.params.map((p, i) => [p, expected.args[i]]));
    const fields = structDecl.body.fields.map((f, i) => {
      const want = substTypeShallow(f.ty, tenv);
      return this.decode(term.args[i], want);
    });
    const value: Value = { k: "struct", name: structName, targs: expected.args, fields };
    if (expectedDecl.body.kind === "iface") {
      return { k: "iface", dyn: { k: "named", name: structName, args: expected.args }, inner: value };
    }
    return value;
  }

  invoke(vec: Vector): string {
    const decl = this.interp.funcs.get(vec.entry);
    if (decl === undefined) throw new Error(`no entry ${vec.entry}`);
    const cfg = this.config.entries[vec.entry];
    if (cfg === undefined) throw new Error(`no replay configuration for ${vec.entry}`);
    const tenv: TEnv = new Map(decl.tparams.map((p, i) => [p, cfg.typeArgs[i]]));

    const args: Value[] = [];
    const dicts = cfg.dictCalls?.length ?? 0;
    for (const dict of cfg.dictCalls ?? []) {
      const dictDecl = this.interp.funcs.get(dict);
      if (dictDecl === undefined) throw new Error(`no dictionary builder ${dict}`);
      args.push(this.interp.callFunc(dictDecl, [], []));
    }
    vec.args.forEach((raw, i) => {
      const paramTy = substTypeShallow(decl.params[dicts + i].ty, tenv);
      if (raw === "!nil") {
        args.push({ k: "nil" });
      } else {
        args.push(this.decode(parseSexp(raw), paramTy));
      }
    });
    return render(this.interp.callFunc(decl, args, cfg.typeArgs));
  }
}

function substTypeShallow(t: Type, tenv: TEnv): Type {
  switch (t.k) {
    case "param": {
      const hit = tenv.get(t.name);
      return hit !== undefined ? hit : t;
    }
    case "named":
      return { k: "named", name: t.name, args: t.args.map((a) => substTypeShallow(a, tenv)) };
    case "func":
      return {
        k: "func",
        params: t.params.map((a) => substTypeShallow(a, tenv)),
        results: t.results.map((a) => substTypeShallow(a, tenv)),
      };
    case "ptr":
      return t;
  }
}
