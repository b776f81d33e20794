// Parser for the emitted functional fragment of Go: struct/interface type
// declarations, generic functions, returns, ifs, type assertions, blocks,
// discard assignments, panic, `==`/`&&`/`<`/`<=`/`+`, composite literals,
// conversions, function literals, and the math/big call forms the
// adaptation templates print.

export type Type =
  | { k: "named"; name: string; args: Type[] }
  | { k: "param"; name: string }
  | { k: "func"; params: Type[]; results: Type[] }
  | { k: "ptr"; name: string };

export interface Field {
  name: string;
  ty: Type;
}

export interface TypeDecl {
  k: "type";
  name: string;
  params: string[];
  body: { kind: "struct"; fields: Field[] } | { kind: "iface" };
}

export interface FuncDecl {
  k: "func";
  name: string;
  tparams: string[];
  params: { name: string; ty: Type }[];
  results: Type[];
  body: Stmt[];
}

export type Decl = TypeDecl | FuncDecl;

export type Expr =
  | { k: "var"; name: string }
  | { k: "int"; value: bigint }
  | { k: "str"; value: string }
  | { k: "bool"; value: boolean }
  | { k: "nil" }
  | { k: "call"; target: Expr; args: Expr[] }
  | { k: "inst"; name: string; targs: Type[] } // Name[T, ...] before ( or {
  | { k: "lit"; name: string; targs: Type[]; args: Expr[] } // composite literal
  | { k: "sel"; target: Expr; field: string }
  | { k: "assert"; target: Expr; ty: Type }
  | { k: "funclit"; params: { name: string; ty: Type }[]; results: Type[]; body: Stmt[] }
  | { k: "bin"; op: string; lhs: Expr; rhs: Expr }
  | { k: "new"; ty: Type };

export type Stmt =
  | { k: "return"; exprs: Expr[] }
  | { k: "panic"; message: string }
  | { k: "define"; names: string[]; rhs: Expr; declare: boolean }
  | { k: "if"; cond: Expr; then: Stmt[] }
  | { k: "block"; body: Stmt[] };

export interface Program {
  pkg: string;
  decls: Decl[];
}

// ---------------------------------------------------------------------------

interface Token {
  kind: "ident" | "int" | "str" | "punct" | "eof";
  text: string;
}

const PUNCTS = [
  ":=", "==", "&&", "<=", "(", ")", "{", "}", "[", "]", ",", ";", "<", "=",
  ".", "*", "+",
];

function tokenize(src: string): Token[] {
  const toks: Token[] = [];
  let i = 0;
  while (i < src.length) {
    const c = src[i];
    if (c === " " || c === "\t" || c === "\n" || c === "\r") {
      i++;
      continue;
    }
    if (src.startsWith("//", i)) {
      while (i < src.length && src[i] !== "\n") i++;
      continue;
    }
    if (/[A-Za-z_]/.test(c)) {
      let j = i;
      while (j < src.length && /[A-Za-z0-9_]/.test(src[j])) j++;
      toks.push({ kind: "ident", text: src.slice(i, j) });
      i = j;
      continue;
    }
    if (/[0-9]/.test(c)) {
      let j = i;
      while (j < src.length && /[0-9]/.test(src[j])) j++;
      toks.push({ kind: "int", text: src.slice(i, j) });
      i = j;
      continue;
    }
    if (c === '"') {
      let j = i + 1;
      let out = "";
      while (j < src.length && src[j] !== '"') {
        if (src[j] === "\\") {
          const esc = src[j + 1];
          out += esc === "n" ? "\n" : esc === "t" ? "\t" : esc;
          j += 2;
        } else {
          out += src[j];
          j++;
        }
      }
      toks.push({ kind: "str", text: out });
      i = j + 1;
      continue;
    }
    const punct = PUNCTS.find((p) => src.startsWith(p, i));
    if (punct !== undefined) {
      toks.push({ kind: "punct", text: punct });
      i += punct.length;
      continue;
    }
    throw new Error(`unexpected character ${JSON.stringify(c)} at offset ${i}`);
  }
  toks.push({ kind: "eof", text: "" });
  return toks;
}

class Parser {
  toks: Token[];
  pos = 0;

  constructor(src: string) {
    this.toks = tokenize(src);
  }

  peek(off = 0): Token {
    return this.toks[Math.min(this.pos + off, this.toks.length - 1)];
  }

  at(text: string): boolean {
    const t = this.peek();
    return (t.kind === "punct" || t.kind === "ident") && t.text === text;
  }

  take(): Token {
    const t = this.toks[this.pos];
    if (t.kind !== "eof") this.pos++;
    return t;
  }

  expect(text: string): Token {
    if (!this.at(text)) {
      throw new Error(`expected ${JSON.stringify(text)}, found ${JSON.stringify(this.peek().text)}`);
    }
    return this.take();
  }

  ident(): string {
    const t = this.peek();
    if (t.kind !== "ident") throw new Error(`expected identifier, found ${t.text}`);
    return this.take().text;
  }

  skipSemis() {
    while (this.at(";")) this.take();
  }

  // -- program ------------------------------------------------------------

  program(): Program {
    this.expect("package");
    const pkg = this.ident();
    if (this.at("import")) {
      this.take();
      this.expect("(");
      while (!this.at(")")) this.take();
      this.expect(")");
    }
    const decls: Decl[] = [];
    this.skipSemis();
    while (this.peek().kind !== "eof") {
      if (this.at("type")) decls.push(this.typeDecl());
      else if (this.at("func")) decls.push(this.funcDecl());
      else throw new Error(`expected declaration, found ${this.peek().text}`);
      this.skipSemis();
    }
    return { pkg, decls };
  }

  typeParams(): string[] {
    if (!this.at("[")) return [];
    this.take();
    const names: string[] = [];
    while (!this.at("]")) {
      if (this.at(",")) {
        this.take();
        continue;
      }
      const name = this.ident();
      if (name !== "any") names.push(name);
    }
    this.expect("]");
    return names;
  }

  typeDecl(): TypeDecl {
    this.expect("type");
    const name = this.ident();
    const params = this.typeParams();
    if (this.at("any")) {
      this.take();
      return { k: "type", name, params, body: { kind: "iface" } };
    }
    if (this.at("interface")) {
      this.take();
      this.expect("{");
      this.expect("}");
      return { k: "type", name, params, body: { kind: "iface" } };
    }
    this.expect("struct");
    this.expect("{");
    const fields: Field[] = [];
    this.skipSemis();
    while (!this.at("}")) {
      const fname = this.ident();
      const ty = this.type();
      fields.push({ name: fname, ty });
      this.skipSemis();
    }
    this.expect("}");
    return { k: "type", name, params, body: { kind: "struct", fields } };
  }

  funcDecl(): FuncDecl {
    this.expect("func");
    const name = this.ident();
    const tparams = this.typeParams();
    const params = this.paramList();
    const results = this.resultList();
    const body = this.blockBody();
    return { k: "func", name, tparams, params, results, body };
  }

  paramList(): { name: string; ty: Type }[] {
    this.expect("(");
    const out: { name: string; ty: Type }[] = [];
    while (!this.at(")")) {
      if (this.at(",")) {
        this.take();
        continue;
      }
      const name = this.peek().text === "_" ? this.take().text : this.ident();
      out.push({ name, ty: this.type() });
    }
    this.expect(")");
    return out;
  }

  resultList(): Type[] {
    if (this.at("{")) return [];
    if (this.at("(")) {
      this.take();
      const out: Type[] = [];
      while (!this.at(")")) {
        if (this.at(",")) {
          this.take();
          continue;
        }
        out.push(this.type());
      }
      this.expect(")");
      return out;
    }
    return [this.type()];
  }

  type(): Type {
    if (this.at("*")) {
      this.take();
      const base = this.ident();
      this.expect(".");
      const inner = this.ident();
      return { k: "ptr", name: `${base}.${inner}` };
    }
    if (this.at("func")) {
      this.take();
      this.expect("(");
      const params: Type[] = [];
      while (!this.at(")")) {
        if (this.at(",")) {
          this.take();
          continue;
        }
        params.push(this.type());
      }
      this.expect(")");
      let results: Type[] = [];
      if (this.at("(")) {
        this.take();
        while (!this.at(")")) {
          if (this.at(",")) {
            this.take();
            continue;
          }
          results.push(this.type());
        }
        this.expect(")");
      } else if (!this.at(")") && !this.at(",") && !this.at("{") && !this.at("]")) {
        results = [this.type()];
      }
      return { k: "func", params, results };
    }
    const name = this.ident();
    if (this.at("[")) {
      this.take();
      const args: Type[] = [];
      while (!this.at("]")) {
        if (this.at(",")) {
          this.take();
          continue;
        }
        args.push(this.type());
      }
      this.expect("]");
      return { k: "named", name, args };
    }
    return { k: "named", name, args: [] };
  }

  // -- statements -----------------------------------------------------------

  blockBody(): Stmt[] {
    this.expect("{");
    const out: Stmt[] = [];
    this.skipSemis();
    while (!this.at("}")) {
      out.push(this.stmt());
      this.skipSemis();
    }
    this.expect("}");
    return out;
  }

  stmt(): Stmt {
    if (this.at("return")) {
      this.take();
      const exprs = [this.expr()];
      while (this.at(",")) {
        this.take();
        exprs.push(this.expr());
      }
      return { k: "return", exprs };
    }
    if (this.at("panic")) {
      this.take();
      this.expect("(");
      const msg = this.take();
      if (msg.kind !== "str") throw new Error("panic takes a string literal");
      this.expect(")");
      return { k: "panic", message: msg.text };
    }
    if (this.at("if")) {
      this.take();
      const cond = this.expr();
      const then = this.blockBody();
      return { k: "if", cond, then };
    }
    if (this.at("{")) {
      return { k: "block", body: this.blockBody() };
    }
    // name list followed by := or =
    const names: string[] = [this.take().text];
    while (this.at(",")) {
      this.take();
      names.push(this.take().text);
    }
    const declare = this.at(":=");
    if (!declare && !this.at("=")) throw new Error(`expected := or = after ${names.join(", ")}`);
    this.take();
    const rhs = this.expr();
    return { k: "define", names, rhs, declare };
  }

  // -- expressions ------------------------------------------------------------

  expr(): Expr {
    let lhs = this.cmp();
    while (this.at("&&")) {
      this.take();
      lhs = { k: "bin", op: "&&", lhs, rhs: this.cmp() };
    }
    return lhs;
  }

  cmp(): Expr {
    let lhs = this.add();
    while (this.at("==") || this.at("<=") || this.at("<")) {
      const op = this.take().text;
      lhs = { k: "bin", op, lhs, rhs: this.add() };
    }
    return lhs;
  }

  add(): Expr {
    let lhs = this.postfix();
    while (this.at("+")) {
      this.take();
      lhs = { k: "bin", op: "+", lhs, rhs: this.postfix() };
    }
    return lhs;
  }

  postfix(): Expr {
    let e = this.primary();
    for (;;) {
      if (this.at("(")) {
        this.take();
        const args: Expr[] = [];
        while (!this.at(")")) {
          if (this.at(",")) {
            this.take();
            continue;
          }
          args.push(this.expr());
        }
        this.expect(")");
        e = { k: "call", target: e, args };
        continue;
      }
      if (this.at(".")) {
        this.take();
        if (this.at("(")) {
          this.take();
          const ty = this.type();
          this.expect(")");
          e = { k: "assert", target: e, ty };
          continue;
        }
        e = { k: "sel", target: e, field: this.ident() };
        continue;
      }
      if (this.at("{") && (e.k === "var" || e.k === "inst")) {
        this.take();
        const args: Expr[] = [];
        while (!this.at("}")) {
          if (this.at(",")) {
            this.take();
            continue;
          }
          args.push(this.expr());
        }
        this.expect("}");
        if (e.k === "var") e = { k: "lit", name: e.name, targs: [], args };
        else e = { k: "lit", name: e.name, targs: e.targs, args };
        continue;
      }
      break;
    }
    return e;
  }

  primary(): Expr {
    const t = this.peek();
    if (t.kind === "int") {
      this.take();
      return { k: "int", value: BigInt(t.text) };
    }
    if (t.kind === "str") {
      this.take();
      return { k: "str", value: t.text };
    }
    if (this.at("true") || this.at("false")) {
      return { k: "bool", value: this.take().text === "true" };
    }
    if (this.at("nil")) {
      this.take();
      return { k: "nil" };
    }
    if (this.at("new")) {
      this.take();
      this.expect("(");
      const base = this.ident();
      this.expect(".");
      const inner = this.ident();
      this.expect(")");
      return { k: "new", ty: { k: "ptr", name: `${base}.${inner}` } };
    }
    if (this.at("func")) {
      this.take();
      const params = this.paramList();
      const results = this.resultList();
      const body = this.blockBody();
      return { k: "funclit", params, results, body };
    }
    if (this.at("(")) {
      this.take();
      const inner = this.expr();
      this.expect(")");
      return inner;
    }
    if (t.kind === "ident" || t.text === "_") {
      this.take();
      if (this.at("[")) {
        // generic instantiation: must be followed by a call or a literal
        this.take();
        const targs: Type[] = [];
        while (!this.at("]")) {
          if (this.at(",")) {
            this.take();
            continue;
          }
          targs.push(this.type());
        }
        this.expect("]");
        return { k: "inst", name: t.text, targs };
      }
      return { k: "var", name: t.text };
    }
    throw new Error(`unexpected token ${JSON.stringify(t.text)}`);
  }
}

export function parseProgram(src: string): Program {
  return new Parser(src).program();
}
