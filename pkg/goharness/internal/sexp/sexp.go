// Package sexp parses the constructor-term syntax used in vector files:
// bare atoms and parenthesized applications, e.g. (Cons Zero Nil).
package sexp

import (
	"fmt"
	"strings"
)

type Node struct {
	Head string
	Args []Node
}

func MustParse(s string) Node {
	p := &parser{toks: tokenize(s)}
	n, err := p.node()
	if err != nil {
		panic(err)
	}
	if p.pos != len(p.toks) {
		panic(fmt.Sprintf("trailing input in term %q", s))
	}
	return n
}

func tokenize(s string) []string {
	var toks []string
	i := 0
	for i < len(s) {
		c := s[i]
		switch {
		case c == ' ' || c == '\t' || c == '\n' || c == '\r':
			i++
		case c == '(' || c == ')':
			toks = append(toks, string(c))
			i++
		default:
			j := i
			for j < len(s) && !strings.ContainsRune(" \t\n\r()", rune(s[j])) {
				j++
			}
			toks = append(toks, s[i:j])
			i = j
		}
	}
	return toks
}

type parser struct {
	toks []string
	pos  int
}

func (p *parser) node() (Node, error) {
	if p.pos >= len(p.toks) {
		return Node{}, fmt.Errorf("unexpected end of term")
	}
	tok := p.toks[p.pos]
	p.pos++
	if tok == ")" {
		return Node{}, fmt.Errorf("unexpected ')'")
	}
	if tok != "(" {
		return Node{Head: tok}, nil
	}
	if p.pos >= len(p.toks) {
		return Node{}, fmt.Errorf("unexpected end after '('")
	}
	head := p.toks[p.pos]
	p.pos++
	out := Node{Head: head}
	for p.pos < len(p.toks) && p.toks[p.pos] != ")" {
		arg, err := p.node()
		if err != nil {
			return Node{}, err
		}
		out.Args = append(out.Args, arg)
	}
	if p.pos >= len(p.toks) || p.toks[p.pos] != ")" {
		return Node{}, fmt.Errorf("missing ')'")
	}
	p.pos++
	return out, nil
}
