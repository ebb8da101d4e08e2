"""Cube points, tope formulas and shapes (the two lower layers)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union


class SortError(Exception):
    """A cube expression was used at the wrong sort."""


class ShapeError(Exception):
    """A shape operation was applied to incompatible shapes."""


# Cube sorts


@dataclass(frozen=True)
class UnitSort:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class IntervalSort:
    def __str__(self):
        return "2"


@dataclass(frozen=True)
class ProductSort:
    left: "CubeSort"
    right: "CubeSort"

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, ProductSort) else str(self.right)
        return f"{self.left} × {right}"


@dataclass(frozen=True)
class SortVar:
    """A cube supplied by a variable of type CUBE; its points are opaque."""

    name: str

    def __str__(self):
        return self.name


CubeSort = Union[UnitSort, IntervalSort, ProductSort, SortVar]
UNIT = UnitSort()
INTERVAL = IntervalSort()


# Cube points


@dataclass(frozen=True)
class CStar:
    def __str__(self):
        return "⋆"


@dataclass(frozen=True)
class CZero:
    def __str__(self):
        return "0₂"


@dataclass(frozen=True)
class COne:
    def __str__(self):
        return "1₂"


@dataclass(frozen=True)
class CVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class CTuple:
    left: "CubeExpr"
    right: "CubeExpr"

    def __str__(self):
        return f"({self.left} , {self.right})"


@dataclass(frozen=True)
class CProj1:
    arg: "CubeExpr"

    def __str__(self):
        return f"π₁ {_atomic_point(self.arg)}"


@dataclass(frozen=True)
class CProj2:
    arg: "CubeExpr"

    def __str__(self):
        return f"π₂ {_atomic_point(self.arg)}"


CubeExpr = Union[CStar, CZero, COne, CVar, CTuple, CProj1, CProj2]
STAR, ZERO, ONE = CStar(), CZero(), COne()


def _atomic_point(e):
    return f"({e})" if isinstance(e, (CProj1, CProj2)) else str(e)


# Topes


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "⊤"


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "⊥"


@dataclass(frozen=True)
class And:
    left: "Tope"
    right: "Tope"

    def __str__(self):
        return f"{_tope_str(self.left, 3)} ∧ {_tope_str(self.right, 3)}"


@dataclass(frozen=True)
class Or:
    left: "Tope"
    right: "Tope"

    def __str__(self):
        return f"{_tope_str(self.left, 2)} ∨ {_tope_str(self.right, 2)}"


@dataclass(frozen=True)
class Eq:
    left: CubeExpr
    right: CubeExpr

    def __str__(self):
        return f"{self.left} ≡ {self.right}"


@dataclass(frozen=True)
class Leq:
    left: CubeExpr
    right: CubeExpr

    def __str__(self):
        return f"{self.left} ≤ {self.right}"


@dataclass(frozen=True)
class Atom:
    """An opaque tope such as `ψ t` where ψ is a tope-valued variable."""

    head: str
    args: tuple

    def __str__(self):
        return " ".join([self.head, *(f"({a})" for a in self.args)])


Tope = Union[Top, Bot, And, Or, Eq, Leq, Atom]
TOP, BOT = Top(), Bot()


def _tope_str(t, prec):
    own = {Or: 2, And: 3}.get(type(t), 4)
    return f"({t})" if own < prec else str(t)


def conj(*topes):
    parts = [t for t in topes if not isinstance(t, Top)]
    if not parts:
        return TOP
    out = parts[-1]
    for t in reversed(parts[:-1]):
        out = And(t, out)
    return out


def disj(*topes):
    parts = [t for t in topes if not isinstance(t, Bot)]
    if not parts:
        return BOT
    out = parts[-1]
    for t in reversed(parts[:-1]):
        out = Or(t, out)
    return out


# Sorts and substitution


def sort_of(e, sorts: Mapping[str, CubeSort]) -> CubeSort:
    match e:
        case CStar():
            return UNIT
        case CZero() | COne():
            return INTERVAL
        case CVar(name):
            if name not in sorts:
                raise SortError(f"unknown cube variable {name}")
            return sorts[name]
        case CTuple(a, b):
            return ProductSort(sort_of(a, sorts), sort_of(b, sorts))
        case CProj1(a) | CProj2(a):
            s = sort_of(a, sorts)
            if not isinstance(s, ProductSort):
                raise SortError(f"projection of {a} which has sort {s}")
            return s.left if isinstance(e, CProj1) else s.right
    raise SortError(f"not a cube expression: {e!r}")


def point_vars(e) -> set:
    match e:
        case CVar(name):
            return {name}
        case CTuple(a, b):
            return point_vars(a) | point_vars(b)
        case CProj1(a) | CProj2(a):
            return point_vars(a)
    return set()


def tope_vars(t) -> set:
    match t:
        case And(a, b) | Or(a, b):
            return tope_vars(a) | tope_vars(b)
        case Eq(a, b) | Leq(a, b):
            return point_vars(a) | point_vars(b)
        case Atom(_, args):
            return set().union(*(point_vars(a) for a in args))
    return set()


def subst_cube(target, var: str, value, sorts: Mapping[str, CubeSort] | None = None):
    """Replace the cube variable `var` by `value` in a point or a tope.

    Points and topes bind nothing, so no capture can occur.
    """
    if sorts is not None and var in sorts:
        if sort_of(value, sorts) != sorts[var]:
            raise SortError(f"cannot substitute {value} for {var} : {sorts[var]}")
    return _subst(target, var, value)


def _subst(t, var, value):
    match t:
        case CVar(name):
            return value if name == var else t
        case CTuple(a, b):
            return CTuple(_subst(a, var, value), _subst(b, var, value))
        case CProj1(a):
            return CProj1(_subst(a, var, value))
        case CProj2(a):
            return CProj2(_subst(a, var, value))
        case And(a, b):
            return And(_subst(a, var, value), _subst(b, var, value))
        case Or(a, b):
            return Or(_subst(a, var, value), _subst(b, var, value))
        case Eq(a, b):
            return Eq(_subst(a, var, value), _subst(b, var, value))
        case Leq(a, b):
            return Leq(_subst(a, var, value), _subst(b, var, value))
        case Atom(head, args):
            return Atom(head, tuple(_subst(a, var, value) for a in args))
    return t


# Shapes


@dataclass(frozen=True)
class Shape:
    var: str
    sort: CubeSort
    tope: Tope

    def __str__(self):
        return f"{{{self.var} : {self.sort} | {self.tope}}}"

    def at(self, point) -> Tope:
        """The shape's tope instantiated at a point of its cube."""
        return subst_cube(self.tope, self.var, point)


def _fresh(base, avoid):
    name, i = base, 0
    while name in avoid:
        i += 1
        name = f"{base}{i}"
    return name


def shape_union(a: Shape, b: Shape) -> Shape:
    if a.sort != b.sort:
        raise ShapeError(f"union of shapes over {a.sort} and {b.sort}")
    return Shape(a.var, a.sort, Or(a.tope, b.at(CVar(a.var))))


def shape_product(a: Shape, b: Shape) -> Shape:
    var = _fresh("p", {a.var, b.var})
    p = CVar(var)
    return Shape(var, ProductSort(a.sort, b.sort), And(a.at(CProj1(p)), b.at(CProj2(p))))


def pushout_product(sub_a: Shape, super_a: Shape, sub_b: Shape, super_b: Shape) -> Shape:
    """(sub_a × super_b) ∪ (super_a × sub_b) inside super_a × super_b."""
    from .topes import subshape

    if not subshape(sub_a, super_a):
        raise ShapeError(f"{sub_a} is not a subshape of {super_a}")
    if not subshape(sub_b, super_b):
        raise ShapeError(f"{sub_b} is not a subshape of {super_b}")
    var = _fresh("p", {sub_a.var, super_a.var, sub_b.var, super_b.var})
    p = CVar(var)
    left, right = CProj1(p), CProj2(p)
    tope = Or(
        And(sub_a.at(left), super_b.at(right)),
        And(super_a.at(left), sub_b.at(right)),
    )
    return Shape(var, ProductSort(super_a.sort, super_b.sort), tope)


# Standard shapes

_t, _p = CVar("t"), CVar("p")
SQUARE = ProductSort(INTERVAL, INTERVAL)
CUBE3 = ProductSort(SQUARE, INTERVAL)

DELTA1 = Shape("t", INTERVAL, TOP)
BOUNDARY1 = Shape("t", INTERVAL, Or(Eq(_t, ZERO), Eq(_t, ONE)))
# p = (t, s) with s ≤ t
DELTA2 = Shape("p", SQUARE, Leq(CProj2(_p), CProj1(_p)))
HORN21 = Shape("p", SQUARE, Or(Eq(CProj1(_p), ONE), Eq(CProj2(_p), ZERO)))
BOUNDARY2 = Shape(
    "p",
    SQUARE,
    conj(
        Leq(CProj2(_p), CProj1(_p)),
        disj(Eq(CProj2(_p), ZERO), Eq(CProj1(_p), ONE), Eq(CProj1(_p), CProj2(_p))),
    ),
)
# p = ((t1, t2), t3) with t3 ≤ t2 ≤ t1
DELTA3 = Shape(
    "p",
    CUBE3,
    And(Leq(CProj2(_p), CProj2(CProj1(_p))), Leq(CProj2(CProj1(_p)), CProj1(CProj1(_p)))),
)

STANDARD_SHAPES = {
    "Δ¹": DELTA1,
    "Δ²": DELTA2,
    "Δ³": DELTA3,
    "∂Δ¹": BOUNDARY1,
    "∂Δ²": BOUNDARY2,
    "Λ": HORN21,
}
