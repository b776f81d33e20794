// Evaluator for the emitted fragment: an independent implementation of
// the target semantics, used to replay oracle-exported vectors against
// the generated source text.

import {
  Decl,
  Expr,
  FuncDecl,
  Program,
  Stmt,
  Type,
  TypeDecl,
} from "./goparse";

export type Value =
  | { k: "struct"; name: string; targs: Type[]; fields: Value[] }
  | { k: "iface"; dyn: Type; inner: Value }
  | { k: "closure"; params: { name: string; ty: Type }[]; body: Stmt[]; env: Env; tenv: TEnv }
  | { k: "nil" }
  | { k: "bool"; v: boolean }
  | { k: "int"; v: bigint }
  | { k: "str"; v: string }
  | { k: "multi"; vs: Value[] }
  | { k: "bigcell" }; // result of new(big.Int)

export type Env = Map<string, Value>;
export type TEnv = Map<string, Type>;

export class GoPanic extends Error {
  constructor(public message2: string) {
    super(`panic: ${message2}`);
  }
}

export function substType(t: Type, tenv: TEnv): Type {
  switch (t.k) {
    case "named": {
      return { k: "named", name: t.name, args: t.args.map((a) => substType(a, tenv)) };
    }
    case "param": {
      const hit = tenv.get(t.name);
      return hit !== undefined ? hit : t;
    }
    case "func":
      return {
        k: "func",
        params: t.params.map((a) => substType(a, tenv)),
        results: t.results.map((a) => substType(a, tenv)),
      };
    case "ptr":
      return t;
  }
}

export function typeEq(a: Type, b: Type): boolean {
  if (a.k !== b.k) return false;
  if (a.k === "named" && b.k === "named") {
    return (
      a.name === b.name &&
      a.args.length === b.args.length &&
      a.args.every((x, i) => typeEq(x, b.args[i]))
    );
  }
  if (a.k === "param" && b.k === "param") return a.name === b.name;
  if (a.k === "ptr" && b.k === "ptr") return a.name === b.name;
  if (a.k === "func" && b.k === "func") {
    return (
      a.params.length === b.params.length &&
      a.results.length === b.results.length &&
      a.params.every((x, i) => typeEq(x, b.params[i])) &&
      a.results.every((x, i) => typeEq(x, b.results[i]))
    );
  }
  return false;
}

export class Interp {
  types = new Map<string, TypeDecl>();
  funcs = new Map<string, FuncDecl>();
  fuel: number;

  constructor(program: Program, fuel = 2_000_000) {
    this.fuel = fuel;
    for (const d of program.decls) {
      if (d.k === "type") this.types.set(d.name, d);
      else this.funcs.set(d.name, d);
    }
  }

  spend() {
    if (this.fuel-- <= 0) throw new Error("fuel exhausted");
  }

  isTypeName(name: string): boolean {
    return this.types.has(name);
  }

  fieldIndex(typeName: string, field: string): number {
    const decl = this.types.get(typeName);
    if (decl === undefined || decl.body.kind !== "struct") {
      throw new Error(`no struct ${typeName}`);
    }
    const i = decl.body.fields.findIndex((f) => f.name === field);
    if (i < 0) throw new Error(`no field ${field} on ${typeName}`);
    return i;
  }

  // the declared parameter types of a generic function, unified against
  // the dynamic types of the argument values (used for the destructor
  // calls the renderer prints without explicit instantiation)
  inferTargs(decl: FuncDecl, args: Value[]): TEnv {
    const tenv: TEnv = new Map();
    const unify = (declared: Type, actual: Type) => {
      if (declared.k === "param") {
        if (!tenv.has(declared.name)) tenv.set(declared.name, actual);
        return;
      }
      if (declared.k === "named" && actual.k === "named" && declared.name === actual.name) {
        declared.args.forEach((d, i) => unify(d, actual.args[i]));
      }
    };
    decl.params.forEach((p, i) => {
      const v = args[i];
      const dyn = this.dynType(v);
      if (dyn !== undefined) unify(p.ty, dyn);
    });
    for (const tp of decl.tparams) {
      if (!tenv.has(tp)) throw new Error(`cannot infer type argument ${tp} of ${decl.name}`);
    }
    return tenv;
  }

  dynType(v: Value): Type | undefined {
    switch (v.k) {
      case "struct":
        return { k: "named", name: v.name, args: v.targs };
      case "iface":
        return v.dyn;
      case "bool":
        return { k: "named", name: "bool", args: [] };
      case "int":
        return { k: "ptr", name: "big.Int" };
      case "str":
        return { k: "named", name: "string", args: [] };
      default:
        return undefined;
    }
  }

  callFunc(decl: FuncDecl, args: Value[], targs: Type[]): Value {
    let tenv: TEnv;
    if (decl.tparams.length > 0 && targs.length === 0) {
      tenv = this.inferTargs(decl, args);
    } else {
      tenv = new Map(decl.tparams.map((p, i) => [p, targs[i]]));
    }
    const env: Env = new Map();
    decl.params.forEach((p, i) => env.set(p.name, args[i]));
    const out = this.exec(decl.body, env, tenv);
    if (out === undefined) throw new Error(`${decl.name} fell through`);
    return out;
  }

  exec(stmts: Stmt[], env: Env, tenv: TEnv): Value | undefined {
    for (const s of stmts) {
      this.spend();
      switch (s.k) {
        case "return": {
          const vs = s.exprs.map((e) => this.eval(e, env, tenv));
          return vs.length === 1 ? vs[0] : { k: "multi", vs };
        }
        case "panic":
          throw new GoPanic(s.message);
        case "define": {
          if (s.rhs.k === "assert") {
            const v = this.eval(s.rhs.target, env, tenv);
            const want = substType(s.rhs.ty, tenv);
            let bound: Value = { k: "nil" };
            let ok = false;
            if (v.k === "iface" && typeEq(v.dyn, want)) {
              bound = v.inner;
              ok = true;
            }
            if (s.names[0] !== "_") env.set(s.names[0], bound);
            if (s.names[1] !== "_") env.set(s.names[1], { k: "bool", v: ok });
            break;
          }
          const v = this.eval(s.rhs, env, tenv);
          const vs = v.k === "multi" ? v.vs : [v];
          if (vs.length !== s.names.length) throw new Error("destructuring arity mismatch");
          s.names.forEach((n, i) => {
            if (n !== "_") env.set(n, vs[i]);
          });
          break;
        }
        case "if": {
          const c = this.eval(s.cond, env, tenv);
          if (c.k !== "bool") throw new Error("non-boolean condition");
          if (c.v) {
            const out = this.exec(s.then, new Map(env), tenv);
            if (out !== undefined) return out;
          }
          break;
        }
        case "block": {
          const out = this.exec(s.body, new Map(env), tenv);
          if (out !== undefined) return out;
          break;
        }
      }
    }
    return undefined;
  }

  eval(e: Expr, env: Env, tenv: TEnv): Value {
    this.spend();
    switch (e.k) {
      case "var": {
        const v = env.get(e.name);
        if (v !== undefined) return v;
        // a bare reference to a type or zero-parameter function never
        // appears; a name used as a value must be bound
        throw new Error(`unbound name ${e.name}`);
      }
      case "int":
        return { k: "int", v: e.value };
      case "str":
        return { k: "str", v: e.value };
      case "bool":
        return { k: "bool", v: e.value };
      case "nil":
        return { k: "nil" };
      case "new":
        return { k: "bigcell" };
      case "funclit":
        return {
          k: "closure",
          params: e.params.map((p) => ({ name: p.name, ty: substType(p.ty, tenv) })),
          body: e.body,
          env,
          tenv,
        };
      case "lit": {
        const targs = e.targs.map((t) => substType(t, tenv));
        return { k: "struct", name: e.name, targs, fields: e.args.map((a) => this.eval(a, env, tenv)) };
      }
      case "inst":
        throw new Error(`instantiation of ${e.name} must be called or built`);
      case "sel": {
        const v = this.eval(e.target, env, tenv);
        if (v.k === "nil") throw new GoPanic("nil dereference");
        if (v.k !== "struct") throw new Error("field selection on a non-struct value");
        return v.fields[this.fieldIndex(v.name, e.field)];
      }
      case "assert":
        throw new Error("type assertion outside a binding");
      case "bin":
        return this.binop(e.op, e.lhs, e.rhs, env, tenv);
      case "call":
        return this.call(e, env, tenv);
    }
  }

  binop(op: string, lhsE: Expr, rhsE: Expr, env: Env, tenv: TEnv): Value {
    if (op === "&&") {
      const l = this.eval(lhsE, env, tenv);
      if (l.k !== "bool") throw new Error("non-boolean && operand");
      if (!l.v) return { k: "bool", v: false };
      const r = this.eval(rhsE, env, tenv);
      if (r.k !== "bool") throw new Error("non-boolean && operand");
      return r;
    }
    const l = this.eval(lhsE, env, tenv);
    const r = this.eval(rhsE, env, tenv);
    switch (op) {
      case "==":
        if (l.k === "int" && r.k === "int") return { k: "bool", v: l.v === r.v };
        return { k: "bool", v: valueEq(l, r) };
      case "<":
        return { k: "bool", v: asInt(l) < asInt(r) };
      case "<=":
        return { k: "bool", v: asInt(l) <= asInt(r) };
      case "+":
        if (l.k === "str" && r.k === "str") return { k: "str", v: l.v + r.v };
        return { k: "int", v: asInt(l) + asInt(r) };
    }
    throw new Error(`unknown operator ${op}`);
  }

  call(e: Expr & { k: "call" }, env: Env, tenv: TEnv): Value {
    const target = e.target;

    // math/big adapter forms
    if (target.k === "sel") {
      const recv = target.target;
      if (recv.k === "var" && recv.name === "big" && target.field === "NewInt") {
        const n = this.eval(e.args[0], env, tenv);
        return { k: "int", v: asInt(n) };
      }
      if (recv.k === "var" && recv.name === "big" && target.field === "SetString") {
        throw new Error("unreachable");
      }
      const recvV = this.evalMaybeBig(recv, env, tenv);
      if (recvV !== undefined) {
        const args = e.args.map((a) => this.eval(a, env, tenv));
        switch (target.field) {
          case "Add":
            return { k: "int", v: asInt(args[0]) + asInt(args[1]) };
          case "Sub":
            return { k: "int", v: asInt(args[0]) - asInt(args[1]) };
          case "Mul":
            return { k: "int", v: asInt(args[0]) * asInt(args[1]) };
          case "Cmp": {
            const a = asInt(recvV);
            const b = asInt(args[0]);
            return { k: "int", v: BigInt(a < b ? -1 : a > b ? 1 : 0) };
          }
          case "SetString": {
            const s = args[0];
            if (s.k !== "str") throw new Error("SetString takes a string");
            return {
              k: "multi",
              vs: [{ k: "int", v: BigInt(s.v) }, { k: "bool", v: true }],
            };
          }
        }
      }
    }

    // named target: type conversion, generic function, plain function
    if (target.k === "var" || target.k === "inst") {
      const name = target.k === "var" ? target.name : target.name;
      const targs = (target.k === "inst" ? target.targs : []).map((t) => substType(t, tenv));
      if (this.isTypeName(name)) {
        const inner = this.eval(e.args[0], env, tenv);
        if (inner.k === "iface" || inner.k === "nil") return inner;
        const dyn = this.dynType(inner);
        if (dyn === undefined) throw new Error("conversion of an untypeable value");
        return { k: "iface", dyn, inner };
      }
      const decl = this.funcs.get(name);
      if (decl !== undefined) {
        const args = e.args.map((a) => this.eval(a, env, tenv));
        return this.callFunc(decl, args, targs);
      }
    }

    const f = this.eval(target, env, tenv);
    if (f.k === "nil") throw new GoPanic("nil dereference");
    if (f.k !== "closure") throw new Error("calling a non-function value");
    const args = e.args.map((a) => this.eval(a, env, tenv));
    const inner: Env = new Map(f.env);
    f.params.forEach((p, i) => inner.set(p.name, args[i]));
    const out = this.exec(f.body, inner, f.tenv);
    if (out === undefined) throw new Error("function literal fell through");
    return out;
  }

  evalMaybeBig(e: Expr, env: Env, tenv: TEnv): Value | undefined {
    // receivers of big.Int methods: new(big.Int) cells or integer values
    try {
      const v = this.eval(e, env, tenv);
      if (v.k === "bigcell" || v.k === "int") return v;
      return undefined;
    } catch {
      return undefined;
    }
  }
}

function asInt(v: Value): bigint {
  if (v.k === "int") return v.v;
  if (v.k === "bigcell") return 0n;
  throw new Error(`expected an integer, got ${v.k}`);
}

export function valueEq(a: Value, b: Value): boolean {
  if (a.k === "nil" || b.k === "nil") return a.k === "nil" && b.k === "nil";
  if (a.k === "iface" && b.k === "iface") {
    return typeEq(a.dyn, b.dyn) && valueEq(a.inner, b.inner);
  }
  if (a.k === "struct" && b.k === "struct") {
    if (a.name !== b.name || a.targs.length !== b.targs.length) return false;
    if (!a.targs.every((t, i) => typeEq(t, b.targs[i]))) return false;
    if (a.fields.length !== b.fields.length) throw new Error("field count mismatch");
    return a.fields.every((f, i) => valueEq(f, b.fields[i]));
  }
  if (a.k === "bool" && b.k === "bool") return a.v === b.v;
  if (a.k === "int" && b.k === "int") return a.v === b.v;
  if (a.k === "str" && b.k === "str") return a.v === b.v;
  throw new Error(`comparing incomparable values ${a.k} and ${b.k}`);
}

export function render(v: Value): string {
  switch (v.k) {
    case "iface":
      return render(v.inner);
    case "struct":
      if (v.fields.length === 0) return v.name;
      return `${v.name}(${v.fields.map(render).join(", ")})`;
    case "bool":
      return v.v ? "true" : "false";
    case "int":
      return v.v.toString(10);
    case "str":
      return JSON.stringify(v.v);
    case "nil":
      return "nil";
    default:
      throw new Error(`cannot render a ${v.k}`);
  }
}
