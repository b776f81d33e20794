import * as path from "node:path";
import { describe, expect, it } from "vitest";

import { GoPanic, Interp, render } from "../src/eval";
import { Fixture, parseSexp } from "../src/harness";
import { parseProgram } from "../src/goparse";

const ROOT = path.resolve(__dirname, "..", "..");

const SMALL = `package p

import (
)

type Nat any

type Zero struct {}

type Suc struct {
\tA Nat
}

func Suc_dest(p Suc) (Nat) {
\treturn p.A
}

func Pred(x0 Nat) Nat {
\t{
\t\tq, m := x0.(Suc)
\t\tif (m) {
\t\t\tn := Suc_dest(q)
\t\t\treturn n
\t\t}
\t}
\tpanic("match failed")
}

func Two() Nat {
\treturn (Nat(Suc{(Nat(Suc{(Nat(Zero{}))}))}))
}

func Twice(f func(Nat) Nat, x Nat) Nat {
\treturn f(f(x))
}

func Iife() Nat {
\treturn func() Nat {
\t\t{
\t\t\tif (Two() == (Nat(Suc{(Nat(Zero{}))}))) {
\t\t\t\treturn (Nat(Zero{}))
\t\t\t}
\t\t}
\t\treturn Two()
\t}()
}
`;

describe("fragment evaluator", () => {
  const interp = new Interp(parseProgram(SMALL));

  it("constructs and renders values", () => {
    expect(render(interp.callFunc(interp.funcs.get("Two")!, [], []))).toBe(
      "Suc(Suc(Zero))"
    );
  });

  it("asserts, destructures and panics on match failure", () => {
    const two = interp.callFunc(interp.funcs.get("Two")!, [], []);
    const one = interp.callFunc(interp.funcs.get("Pred")!, [two], []);
    expect(render(one)).toBe("Suc(Zero)");
    const zero = interp.callFunc(interp.funcs.get("Pred")!, [one], []);
    expect(() => interp.callFunc(interp.funcs.get("Pred")!, [zero], [])).toThrow(
      GoPanic
    );
  });

  it("treats interface equality structurally", () => {
    expect(render(interp.callFunc(interp.funcs.get("Iife")!, [], []))).toBe(
      "Suc(Suc(Zero))"
    );
  });

  it("calls closures passed as arguments", () => {
    const prog = parseProgram(SMALL);
    const i2 = new Interp(prog);
    const two = i2.callFunc(i2.funcs.get("Two")!, [], []);
    const pred = i2.funcs.get("Pred")!;
    const closure = {
      k: "closure" as const,
      params: pred.params.map((p) => ({ name: p.name, ty: p.ty })),
      body: pred.body,
      env: new Map(),
      tenv: new Map(),
    };
    const out = i2.callFunc(i2.funcs.get("Twice")!, [closure, two], []);
    expect(render(out)).toBe("Zero");
  });
});

describe("decoding constructor terms", () => {
  const abs = path.join(ROOT, "goharness", "example");
  const fixture = new Fixture(abs, "example", {
    entries: { Hd2: { typeArgs: [{ k: "named", name: "Nat", args: [] }] } },
  });

  it("builds the documented encoding of the number one", () => {
    const v = fixture.decode(parseSexp("(Suc Zero)"), {
      k: "named",
      name: "Nat",
      args: [],
    });
    expect(v.k).toBe("iface");
    expect(render(v)).toBe("Suc(Zero)");
  });

  it("builds generic list values", () => {
    const v = fixture.decode(parseSexp("(Cons Zero Nil)"), {
      k: "named",
      name: "List",
      args: [{ k: "named", name: "Nat", args: [] }],
    });
    expect(render(v)).toBe("Cons(Zero, Nil)");
  });
});
