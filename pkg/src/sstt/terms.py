"""Type-layer terms, declarations, substitution and alpha-equivalence.

Cube points and topes occurring inside types are terms too; the checker
converts them to the lower-layer representation when it asks the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional


class Term:
    __slots__ = ()

    def __str__(self):
        from .printer import show

        return show(self)


def _term(cls):
    return dataclass(frozen=True, eq=True, repr=True)(cls)


@_term
class Var(Term):
    name: str


@_term
class Global(Term):
    name: str


@_term
class Universe(Term):
    level: int = 0


@_term
class CubeUniverse(Term):
    pass


@_term
class TopeUniverse(Term):
    pass


@_term
class UnitCube(Term):
    pass


@_term
class IntervalCube(Term):
    pass


@_term
class CubeProduct(Term):
    left: Term
    right: Term


@_term
class Times(Term):
    """Surface `A × B`; elaborates to a cube product or a pair type."""

    left: Term
    right: Term


@_term
class Star(Term):
    pass


@_term
class Zero(Term):
    pass


@_term
class One(Term):
    pass


@_term
class TopeTop(Term):
    pass


@_term
class TopeBot(Term):
    pass


@_term
class TopeAnd(Term):
    left: Term
    right: Term


@_term
class TopeOr(Term):
    left: Term
    right: Term


@_term
class TopeEq(Term):
    left: Term
    right: Term


@_term
class TopeLeq(Term):
    left: Term
    right: Term


@_term
class ShapeConst(Term):
    """A built-in shape such as Δ¹, used as a tope-valued function."""

    name: str


@_term
class Pi(Term):
    """(name : dom) → cod, optionally restricted to points satisfying `tope`.

    When `tope` is present, `dom` is a cube and the binder ranges over a shape.
    """

    name: str
    dom: Term
    cod: Term
    tope: Optional[Term] = None


@_term
class Lam(Term):
    name: str
    body: Term
    dom: Optional[Term] = None


@_term
class App(Term):
    fn: Term
    arg: Term


@_term
class Sigma(Term):
    name: str
    dom: Term
    cod: Term


@_term
class Pair(Term):
    left: Term
    right: Term


@_term
class First(Term):
    arg: Term


@_term
class Second(Term):
    arg: Term


@_term
class IdType(Term):
    left: Term
    right: Term
    ambient: Optional[Term] = None


@_term
class Refl(Term):
    term: Optional[Term] = None
    ambient: Optional[Term] = None


@_term
class IdJ(Term):
    ambient: Term
    base: Term
    motive: Term
    case: Term
    end: Term
    path: Term


@_term
class UnitType(Term):
    pass


@_term
class UnitElem(Term):
    pass


@_term
class RecBot(Term):
    pass


@_term
class RecOr(Term):
    clauses: tuple  # of (tope, term)


@_term
class Restrict(Term):
    base: Term
    clauses: tuple  # of (tope, term)


# Binders: the field holding the bound name and the fields it scopes over.
BINDERS = {Pi: ("cod", "tope"), Lam: ("body",), Sigma: ("cod",)}


def _term_fields(t):
    return [f.name for f in fields(t)]


def free_vars(t) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case None | str() | int():
            return frozenset()
        case tuple():
            out = frozenset()
            for x in t:
                out |= free_vars(x)
            return out
    out = frozenset()
    scoped = BINDERS.get(type(t), ())
    for name in _term_fields(t):
        if name == "name":
            continue
        fv = free_vars(getattr(t, name))
        if name in scoped:
            fv = fv - {t.name}
        out |= fv
    return out


def fresh_name(base: str, avoid) -> str:
    if base == "_":
        base = "x"
    stem = base.rstrip("0123456789")
    if base not in avoid:
        return base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def subst(t, mapping: dict):
    """Capture-avoiding simultaneous substitution of variables."""
    if not mapping:
        return t
    range_fv = frozenset()
    for v in mapping.values():
        range_fv |= free_vars(v)
    return _subst(t, mapping, range_fv)


def subst1(t, name: str, value):
    return subst(t, {name: value})


def _subst(t, mapping, range_fv):
    match t:
        case Var(name):
            return mapping.get(name, t)
        case None | str() | int():
            return t
        case tuple():
            return tuple(_subst(x, mapping, range_fv) for x in t)
    cls = type(t)
    scoped = BINDERS.get(cls)
    if not any(True for _ in _term_fields(t)):
        return t
    if scoped is None:
        return cls(*(_subst(getattr(t, n), mapping, range_fv) for n in _term_fields(t)))
    inner = {k: v for k, v in mapping.items() if k != t.name}
    name = t.name
    values = {}
    if inner and name in range_fv and name != "_":
        body_fv = frozenset()
        for n in scoped:
            body_fv |= free_vars(getattr(t, n))
        new = fresh_name(name, range_fv | body_fv | set(inner))
        inner = dict(inner)
        inner[name] = Var(new)
        name = new
    inner_fv = range_fv if name == t.name else range_fv | {name}
    for n in _term_fields(t):
        if n == "name":
            values[n] = name
        elif n in scoped:
            values[n] = _subst(getattr(t, n), inner, inner_fv) if inner else getattr(t, n)
        else:
            values[n] = _subst(getattr(t, n), mapping, range_fv)
    return cls(**values)


def rename_binder(t, new: str):
    """The same binder term with its bound variable renamed to `new`."""
    scoped = BINDERS[type(t)]
    values = {}
    for n in _term_fields(t):
        if n == "name":
            values[n] = new
        elif n in scoped:
            values[n] = subst1(getattr(t, n), t.name, Var(new)) if t.name != "_" else getattr(t, n)
        else:
            values[n] = getattr(t, n)
    return type(t)(**values)


def alpha_eq(a, b) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a, b, env_a, env_b, depth):
    if a is b and not env_a and not env_b:
        return True
    if type(a) is not type(b):
        return False
    match a:
        case Var(name):
            ia, ib = env_a.get(name), env_b.get(b.name)
            if ia is None and ib is None:
                return name == b.name
            return ia == ib
        case None:
            return True
        case str() | int():
            return a == b
        case tuple():
            return len(a) == len(b) and all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(a, b))
    scoped = BINDERS.get(type(a))
    if scoped is None:
        return all(
            _alpha(getattr(a, n), getattr(b, n), env_a, env_b, depth) for n in _term_fields(a)
        )
    inner_a = dict(env_a)
    inner_a[a.name] = depth
    inner_b = dict(env_b)
    inner_b[b.name] = depth
    for n in _term_fields(a):
        if n == "name":
            continue
        if n in scoped:
            if not _alpha(getattr(a, n), getattr(b, n), inner_a, inner_b, depth + 1):
                return False
        elif not _alpha(getattr(a, n), getattr(b, n), env_a, env_b, depth):
            return False
    return True


def spine(t):
    """Split an application into its head and argument list."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


def apply(fn, *args):
    for a in args:
        fn = App(fn, a)
    return fn


def arrow(dom, cod):
    return Pi("_", dom, cod)


# Declarations


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple  # of (name, type)
    type: Term
    body: Term


@dataclass(frozen=True)
class Postulate:
    name: str
    params: tuple
    type: Term


@dataclass(frozen=True)
class Assumption:
    names: tuple
    type: Term
    params: tuple = ()


@dataclass(frozen=True)
class CheckCommand:
    term: Term
    type: Term
    params: tuple = ()


@dataclass(frozen=True)
class ComputeCommand:
    term: Term
    params: tuple = ()


Declaration = Definition | Postulate | Assumption | CheckCommand | ComputeCommand


def declaration_eq(a, b) -> bool:
    """Alpha-equivalence of declarations, with parameters acting as binders."""
    if type(a) is not type(b):
        return False
    match a:
        case Definition() | Postulate():
            if a.name != b.name:
                return False
            wrap_a = _wrap(a.params, (a.type, getattr(a, "body", None)))
            wrap_b = _wrap(b.params, (b.type, getattr(b, "body", None)))
            return alpha_eq(wrap_a, wrap_b)
        case Assumption():
            return a.names == b.names and alpha_eq(a.type, b.type)
        case CheckCommand():
            return alpha_eq(_wrap(a.params, (a.term, a.type)), _wrap(b.params, (b.term, b.type)))
        case ComputeCommand():
            return alpha_eq(_wrap(a.params, a.term), _wrap(b.params, b.term))
    return False


def _wrap(params, inner):
    out = Pair(*inner) if isinstance(inner, tuple) else inner
    if isinstance(inner, tuple) and inner[1] is None:
        out = inner[0]
    for name, ty in reversed(params):
        out = Pi(name, ty, out)
    return out
