from hypothesis import given, strategies as st

from sstt.cube import (
    BOT,
    BOUNDARY1,
    DELTA1,
    DELTA2,
    HORN21,
    INTERVAL,
    ONE,
    SQUARE,
    TOP,
    ZERO,
    And,
    CProj1,
    CProj2,
    CTuple,
    CVar,
    Eq,
    Leq,
    Or,
    ProductSort,
    Shape,
    ShapeError,
    SortError,
    pushout_product,
    shape_product,
    shape_union,
    subst_cube,
)
from sstt.terms import App, Lam, Var, alpha_eq, free_vars, subst1
from sstt.topes import equivalent, subshape

import pytest

t, s = CVar("t"), CVar("s")


def test_subst_cube_replaces_in_disjunction():
    assert subst_cube(Or(Eq(t, ZERO), Eq(t, ONE)), "t", ZERO) == Or(Eq(ZERO, ZERO), Eq(ZERO, ONE))


def test_subst_cube_under_projection():
    assert subst_cube(CProj1(CTuple(s, t)), "s", ZERO) == CProj1(CTuple(ZERO, t))


def test_subst_cube_without_occurrence():
    assert subst_cube(TOP, "t", ONE) == TOP


def test_subst_cube_rejects_wrong_sort():
    with pytest.raises(SortError):
        subst_cube(Eq(t, ZERO), "t", CTuple(ZERO, ONE), {"t": INTERVAL})


def test_subst_term_examples():
    a = Var("a")
    assert subst1(Var("b"), "x", a) == Var("b")
    assert subst1(Var("x"), "x", a) == a
    assert subst1(Lam("x", Var("x")), "x", a) == Lam("x", Var("x"))


def test_subst_term_avoids_capture():
    out = subst1(Lam("y", App(Var("x"), Var("y"))), "x", Var("y"))
    assert isinstance(out, Lam) and out.name != "y"
    assert alpha_eq(out, Lam("z", App(Var("y"), Var("z"))))
    assert free_vars(out) == {"y"}


names = st.sampled_from(["x", "y", "z"])
leaves = st.one_of(st.just(ZERO), st.just(ONE), names.map(CVar))
points = st.recursive(
    leaves,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: CTuple(*p)),
        inner.map(CProj1),
        inner.map(CProj2),
    ),
    max_leaves=4,
)
topes = st.recursive(
    st.one_of(
        st.just(TOP),
        st.just(BOT),
        st.tuples(points, points).map(lambda p: Eq(*p)),
        st.tuples(points, points).map(lambda p: Leq(*p)),
    ),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: And(*p)),
        st.tuples(inner, inner).map(lambda p: Or(*p)),
    ),
    max_leaves=5,
)


@given(topes, points, points)
def test_subst_cube_composition(e, a, b):
    from sstt.cube import point_vars

    if "x" in point_vars(b):
        return
    lhs = subst_cube(subst_cube(e, "x", a), "y", b)
    rhs = subst_cube(subst_cube(e, "y", b), "x", subst_cube(a, "y", b))
    assert lhs == rhs


def test_union_of_endpoints_is_boundary():
    u = shape_union(Shape("t", INTERVAL, Eq(t, ZERO)), Shape("u", INTERVAL, Eq(CVar("u"), ONE)))
    assert equivalent(((u.var, INTERVAL),), u.tope, BOUNDARY1.at(CVar(u.var)))


def test_union_with_empty_shape():
    phi = Shape("t", INTERVAL, Leq(t, CVar("t")))
    u = shape_union(phi, Shape("t", INTERVAL, BOT))
    assert u.tope == Or(phi.tope, BOT)
    assert equivalent((("t", INTERVAL),), u.tope, phi.tope)


def test_union_of_edges_is_horn():
    p = CVar("p")
    right = Shape("p", SQUARE, Eq(CProj1(p), ONE))
    bottom = Shape("p", SQUARE, Eq(CProj2(p), ZERO))
    u = shape_union(right, bottom)
    assert equivalent((("p", SQUARE),), u.tope, HORN21.tope)


def test_union_requires_same_sort():
    with pytest.raises(ShapeError):
        shape_union(DELTA1, DELTA2)


def test_product_of_intervals_has_trivial_tope():
    square = shape_product(DELTA1, DELTA1)
    assert square.sort == SQUARE
    assert square.tope == And(TOP, TOP)


def test_product_with_empty_shape_is_empty():
    prod = shape_product(BOUNDARY1, Shape("t", INTERVAL, BOT))
    assert equivalent(((prod.var, prod.sort),), prod.tope, BOT)


def test_prism_sort():
    assert shape_product(DELTA1, DELTA2).sort == ProductSort(INTERVAL, SQUARE)


def test_pushout_product_of_boundaries_is_square_boundary():
    pp = pushout_product(BOUNDARY1, DELTA1, BOUNDARY1, DELTA1)
    p = CVar(pp.var)
    four = Or(Or(Eq(CProj1(p), ZERO), Eq(CProj1(p), ONE)), Or(Eq(CProj2(p), ZERO), Eq(CProj2(p), ONE)))
    assert equivalent(((pp.var, SQUARE),), pp.tope, four)


def test_pushout_product_with_empty_left_is_product():
    empty = Shape("t", INTERVAL, BOT)
    pp = pushout_product(empty, DELTA1, HORN21, DELTA2)
    prod = shape_product(DELTA1, HORN21)
    assert equivalent(((pp.var, pp.sort),), pp.tope, prod.at(CVar(pp.var)))


def test_pushout_product_requires_subshapes():
    with pytest.raises(ShapeError):
        pushout_product(DELTA1, BOUNDARY1, BOUNDARY1, DELTA1)


SHAPES_2 = [
    DELTA1,
    BOUNDARY1,
    Shape("t", INTERVAL, Eq(t, ZERO)),
    Shape("t", INTERVAL, Eq(t, ONE)),
    Shape("t", INTERVAL, BOT),
]
SHAPES_SQ = [DELTA2, HORN21, Shape("p", SQUARE, TOP), Shape("p", SQUARE, BOT)]


def _swap(shape):
    """The product tope with its two coordinates exchanged."""
    p = CVar(shape.var)
    return shape.at(CTuple(CProj2(p), CProj1(p)))


@given(st.sampled_from(SHAPES_2), st.sampled_from(SHAPES_2))
def test_union_commutes(a, b):
    ab, ba = shape_union(a, b), shape_union(b, a)
    assert equivalent(((ab.var, INTERVAL),), ab.tope, ba.at(CVar(ab.var)))


@given(st.sampled_from(SHAPES_2 + SHAPES_SQ), st.sampled_from(SHAPES_2 + SHAPES_SQ))
def test_product_commutes_up_to_swap(a, b):
    ab, ba = shape_product(a, b), shape_product(b, a)
    assert equivalent(((ab.var, ab.sort),), ab.tope, _swap(Shape(ab.var, ba.sort, ba.at(CVar(ab.var)))))


PAIRS = [(sub, sup) for sup in SHAPES_2 for sub in SHAPES_2 if subshape(sub, sup)]
PAIRS += [(sub, sup) for sup in SHAPES_SQ for sub in SHAPES_SQ if subshape(sub, sup)]


@given(st.sampled_from(PAIRS), st.sampled_from(PAIRS))
def test_pushout_product_inside_product(left, right):
    pp = pushout_product(*left, *right)
    prod = shape_product(left[1], right[1])
    assert subshape(pp, Shape(pp.var, prod.sort, prod.at(CVar(pp.var))))
