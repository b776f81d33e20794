package rbt

import (
)

type Color any

type Red struct {}

type Black struct {}

type Tree[a any] interface {}

type Leaf[a any] struct {}

type Node[a any] struct {
	A Tree[a]
	Aa a
	Ab Tree[a]
}

func Node_dest[a any](p Node[a]) (Tree[a], a, Tree[a]) {
	return p.A, p.Aa, p.Ab
}

type Prod[a, b any] struct {
	A a
	Aa b
}

func Pair_dest[a, b any](p Prod[a, b]) (a, b) {
	return p.A, p.Aa
}

func BaliL[a any](x0 Tree[Prod[a, Color]], c a, t4 Tree[Prod[a, Color]]) Tree[Prod[a, Color]] {
	{
		r, m := x0.(Node[Prod[a, Color]])
		if (m) {
			q, p, t3 := Node_dest(r)
			t, m := q.(Node[Prod[a, Color]])
			if (m) {
				t1, s, t2 := Node_dest(t)
				aa, d := Pair_dest(s)
				if (d == (Color(Red{}))) {
					b, e := Pair_dest(p)
					if (e == (Color(Red{}))) {
						return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{t1, Prod[a, Color]{aa, (Color(Black{}))}, t2})), Prod[a, Color]{b, (Color(Red{}))}, (Tree[Prod[a, Color]](Node[Prod[a, Color]]{t3, Prod[a, Color]{c, (Color(Black{}))}, t4}))}))
					}
				}
			}
		}
	}
	{
		r, m := x0.(Node[Prod[a, Color]])
		if (m) {
			d, q, p := Node_dest(r)
			if (d == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
				aa, e := Pair_dest(q)
				if (e == (Color(Red{}))) {
					t, m := p.(Node[Prod[a, Color]])
					if (m) {
						t2, s, t3 := Node_dest(t)
						b, f := Pair_dest(s)
						if (f == (Color(Red{}))) {
							return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})), Prod[a, Color]{aa, (Color(Black{}))}, t2})), Prod[a, Color]{b, (Color(Red{}))}, (Tree[Prod[a, Color]](Node[Prod[a, Color]]{t3, Prod[a, Color]{c, (Color(Black{}))}, t4}))}))
						}
					}
				}
			}
		}
	}
	{
		s, m := x0.(Node[Prod[a, Color]])
		if (m) {
			r, q, p := Node_dest(s)
			u, m := r.(Node[Prod[a, Color]])
			if (m) {
				v, t, vb := Node_dest(u)
				vc, d := Pair_dest(t)
				if (d == (Color(Black{}))) {
					aa, e := Pair_dest(q)
					if (e == (Color(Red{}))) {
						x, m := p.(Node[Prod[a, Color]])
						if (m) {
							t2, w, t3 := Node_dest(x)
							b, f := Pair_dest(w)
							if (f == (Color(Red{}))) {
								return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{v, Prod[a, Color]{vc, (Color(Black{}))}, vb})), Prod[a, Color]{aa, (Color(Black{}))}, t2})), Prod[a, Color]{b, (Color(Red{}))}, (Tree[Prod[a, Color]](Node[Prod[a, Color]]{t3, Prod[a, Color]{c, (Color(Black{}))}, t4}))}))
							}
						}
					}
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		if (x0 == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
			return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
		}
	}
	{
		aa := c
		t2 := t4
		q, m := x0.(Node[Prod[a, Color]])
		if (m) {
			d, p, vb := Node_dest(q)
			if (d == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
				v, e := Pair_dest(p)
				if (e == (Color(Black{}))) {
					return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})), Prod[a, Color]{v, (Color(Black{}))}, vb})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		q, m := x0.(Node[Prod[a, Color]])
		if (m) {
			e, va, d := Node_dest(q)
			if (e == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})) && d == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
				return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})), va, (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
			}
		}
	}
	{
		aa := c
		t2 := t4
		q, m := x0.(Node[Prod[a, Color]])
		if (m) {
			d, va, p := Node_dest(q)
			if (d == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
				s, m := p.(Node[Prod[a, Color]])
				if (m) {
					v, r, vd := Node_dest(s)
					ve, e := Pair_dest(r)
					if (e == (Color(Black{}))) {
						return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{})), va, (Tree[Prod[a, Color]](Node[Prod[a, Color]]{v, Prod[a, Color]{ve, (Color(Black{}))}, vd}))})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
					}
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		r, m := x0.(Node[Prod[a, Color]])
		if (m) {
			q, p, vb := Node_dest(r)
			t, m := q.(Node[Prod[a, Color]])
			if (m) {
				vc, s, ve := Node_dest(t)
				vf, d := Pair_dest(s)
				if (d == (Color(Black{}))) {
					v, e := Pair_dest(p)
					if (e == (Color(Black{}))) {
						return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{vc, Prod[a, Color]{vf, (Color(Black{}))}, ve})), Prod[a, Color]{v, (Color(Black{}))}, vb})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
					}
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		q, m := x0.(Node[Prod[a, Color]])
		if (m) {
			p, va, d := Node_dest(q)
			if (d == (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))) {
				s, m := p.(Node[Prod[a, Color]])
				if (m) {
					vc, r, ve := Node_dest(s)
					vf, e := Pair_dest(r)
					if (e == (Color(Black{}))) {
						return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{vc, Prod[a, Color]{vf, (Color(Black{}))}, ve})), va, (Tree[Prod[a, Color]](Leaf[Prod[a, Color]]{}))})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
					}
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		r, m := x0.(Node[Prod[a, Color]])
		if (m) {
			q, va, p := Node_dest(r)
			t, m := q.(Node[Prod[a, Color]])
			if (m) {
				vc, s, ve := Node_dest(t)
				vf, d := Pair_dest(s)
				if (d == (Color(Black{}))) {
					w, m := p.(Node[Prod[a, Color]])
					if (m) {
						v, u, vg := Node_dest(w)
						vh, e := Pair_dest(u)
						if (e == (Color(Black{}))) {
							return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{vc, Prod[a, Color]{vf, (Color(Black{}))}, ve})), va, (Tree[Prod[a, Color]](Node[Prod[a, Color]]{v, Prod[a, Color]{vh, (Color(Black{}))}, vg}))})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
						}
					}
				}
			}
		}
	}
	{
		aa := c
		t2 := t4
		q, m := x0.(Node[Prod[a, Color]])
		if (m) {
			v, p, vb := Node_dest(q)
			vc, d := Pair_dest(p)
			if (d == (Color(Black{}))) {
				return (Tree[Prod[a, Color]](Node[Prod[a, Color]]{(Tree[Prod[a, Color]](Node[Prod[a, Color]]{v, Prod[a, Color]{vc, (Color(Black{}))}, vb})), Prod[a, Color]{aa, (Color(Black{}))}, t2}))
			}
		}
	}
	panic("match failed")
}
