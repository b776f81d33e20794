package ints

import (
	"math/big"
)

type List[a any] interface {}

type Nil[a any] struct {}

type Cons[a any] struct {
	A a
	Aa List[a]
}

func Cons_dest[a any](p Cons[a]) (a, List[a]) {
	return p.A, p.Aa
}

func Fold[a, b any](f func(a) func(b) b, x1 List[a], y b) b {
	{
		if (x1 == (List[a](Nil[a]{}))) {
			return y
		}
	}
	{
		q, m := x1.(Cons[a])
		if (m) {
			x, xs := Cons_dest(q)
			return Fold[a, b](f, xs, f(x)(y))
		}
	}
	panic("match failed")
}

type Semigroup[a any] struct {
	Plus func(a, a) a
}

type Monoid[a any] struct {
	Semigroup_monoid Semigroup[a]
	Zero func() a
}

func Plus_int_semigroup(a *big.Int, b *big.Int) *big.Int {
	return (new(big.Int)).Add(a, b)
}

func Semigroup_int() Semigroup[*big.Int] {
	return Semigroup[*big.Int]{func(a *big.Int, b *big.Int) *big.Int {
		return Plus_int_semigroup(a, b)
	}}
}

func Zero_int_monoid() *big.Int {
	return big.NewInt(0)
}

func Monoid_int() Monoid[*big.Int] {
	return Monoid[*big.Int]{Semigroup_int(), func() *big.Int {
		return Zero_int_monoid()
	}}
}

func Sum[a any](a_ Monoid[a], xs List[a]) a {
	return Fold[a, a](func(aa a) func(a) a {
		return func(b a) a {
			return a_.Semigroup_monoid.Plus(aa, b)
		}
	}, xs, a_.Zero())
}
