from hypothesis import given, settings, strategies as st

from sstt.parser import parse_declarations, parse_term
from sstt.printer import show, show_declaration
from sstt.terms import (
    App,
    First,
    IdType,
    Lam,
    One,
    Pair,
    Pi,
    Restrict,
    Second,
    Sigma,
    TopeAnd,
    TopeBot,
    TopeEq,
    TopeLeq,
    TopeOr,
    TopeTop,
    Universe,
    Var,
    Zero,
    alpha_eq,
)


def roundtrip(term):
    return parse_term(show(term))


def test_identity_roundtrip():
    (decl,) = parse_declarations("#def identity ( A : U) : A → A := \\ a → a")
    (again,) = parse_declarations(show_declaration(decl))
    assert alpha_eq(again.type, decl.type) and alpha_eq(again.body, decl.body)
    assert again.params == decl.params


def test_two_clause_restriction():
    term = Restrict(Var("A"), ((TopeEq(Var("t"), Zero()), Var("x")), (TopeEq(Var("t"), One()), Var("y"))))
    assert show(term) == "A [t ≡ 0₂ ↦ x , t ≡ 1₂ ↦ y]"
    assert roundtrip(term) == term


def test_conjunction_binds_tighter():
    a, b, c = (TopeEq(Var(n), Zero()) for n in "abc")
    assert show(TopeOr(a, TopeAnd(b, c))) == "a ≡ 0₂ ∨ b ≡ 0₂ ∧ c ≡ 0₂"
    assert show(TopeAnd(TopeOr(a, b), c)) == "(a ≡ 0₂ ∨ b ≡ 0₂) ∧ c ≡ 0₂"


def test_non_dependent_shape_arrow_resugars():
    term = parse_term("Δ² → A")
    assert show(term) == "Δ² → A"
    dependent = parse_term("(t : Δ¹) → B t")
    assert show(dependent) == "(t : Δ¹) → B t"


points = st.sampled_from([Var("s"), Var("t"), Zero(), One(), First(Var("p")), Second(Var("p"))])
atoms = st.one_of(
    st.just(TopeTop()),
    st.just(TopeBot()),
    st.tuples(points, points).map(lambda p: TopeEq(*p)),
    st.tuples(points, points).map(lambda p: TopeLeq(*p)),
)
surface_topes = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: TopeAnd(*p)),
        st.tuples(inner, inner).map(lambda p: TopeOr(*p)),
    ),
    max_leaves=16,
)


@given(surface_topes)
@settings(max_examples=400)
def test_tope_roundtrip(tope):
    assert roundtrip(tope) == tope


names = st.sampled_from(["x", "y", "z"])
leaves = st.one_of(names.map(Var), st.just(Universe(0)), st.just(Zero()))


def _compound(inner):
    return st.one_of(
        st.tuples(inner, inner).map(lambda p: App(*p)),
        st.tuples(names, inner).map(lambda p: Lam(*p)),
        st.tuples(names, inner, inner).map(lambda p: Pi(*p)),
        st.tuples(names, inner, inner).map(lambda p: Sigma(*p)),
        st.tuples(inner, inner).map(lambda p: Pair(*p)),
        st.tuples(inner, inner).map(lambda p: IdType(*p)),
        inner.map(First),
        st.tuples(inner, surface_topes, inner).map(lambda p: Restrict(p[0], ((p[1], p[2]),))),
    )


terms = st.recursive(leaves, _compound, max_leaves=8)


@given(terms)
@settings(max_examples=400)
def test_term_roundtrip_up_to_alpha(term):
    assert alpha_eq(roundtrip(term), term)
