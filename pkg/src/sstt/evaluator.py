"""Contexts, weak-head reduction and tope-aware definitional equality."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

from . import cube as C
from .diagnostics import CheckError, FuelExhausted, SourceSpan
from .terms import (
    App,
    CubeProduct,
    CubeUniverse,
    First,
    Global,
    IdJ,
    IdType,
    IntervalCube,
    Lam,
    One,
    Pair,
    Pi,
    RecOr,
    Refl,
    Restrict,
    Second,
    ShapeConst,
    Sigma,
    Star,
    TopeAnd,
    TopeBot,
    TopeEq,
    TopeLeq,
    TopeOr,
    TopeTop,
    TopeUniverse,
    UnitCube,
    UnitType,
    Universe,
    Var,
    Zero,
    alpha_eq,
    fresh_name,
    free_vars,
    spine,
    subst1,
)
from .topes import Sequent, entails, split_branches

DEFAULT_FUEL = 100_000
MAX_SPLIT_DEPTH = 6


@dataclass(frozen=True)
class CheckedDeclaration:
    name: str
    type: object
    body: Optional[object]
    is_assumption: bool = False
    span: Optional[SourceSpan] = None


@dataclass
class Options:
    type_in_type: bool = False
    fuel: int = DEFAULT_FUEL


class Budget:
    def __init__(self, fuel):
        self.fuel = fuel
        self.remaining = fuel

    def reset(self):
        self.remaining = self.fuel


@dataclass(frozen=True)
class Context:
    """The zones Ξ | Φ | Γ plus the global signature.

    `cubes` holds (name, CubeSort, cube term); `topes` holds solver topes;
    `types` holds (name, type) with a None type for untyped comparisons.
    """

    signature: dict = field(default_factory=dict, compare=False)
    cubes: tuple = ()
    topes: tuple = ()
    types: tuple = ()
    options: Options = field(default_factory=Options, compare=False)
    budget: Budget = field(default_factory=lambda: Budget(DEFAULT_FUEL), compare=False)

    @staticmethod
    def empty(options: Options | None = None, signature: dict | None = None):
        options = options or Options()
        return Context(signature if signature is not None else {}, options=options, budget=Budget(options.fuel))

    def tick(self):
        self.budget.remaining -= 1
        if self.budget.remaining < 0:
            raise FuelExhausted(f"evaluation budget of {self.budget.fuel} steps exhausted")

    def lookup(self, name):
        """('type', T) or ('cube', term) for a bound variable, else None."""
        for n, ty in reversed(self.types):
            if n == name:
                return ("type", ty)
        for n, _, term in reversed(self.cubes):
            if n == name:
                return ("cube", term)
        return None

    def type_of_var(self, name):
        found = self.lookup(name)
        return None if found is None else found[1]

    def names(self):
        return {n for n, *_ in self.cubes} | {n for n, _ in self.types}

    def fresh(self, base, *terms):
        avoid = self.names()
        for t in terms:
            avoid |= free_vars(t)
        return fresh_name(base, avoid)

    @property
    def cube_zone(self):
        return tuple((n, s) for n, s, _ in self.cubes)

    def with_cube(self, name, cube_term):
        sort = cube_sort(self, cube_term)
        return replace(self, cubes=self.cubes + ((name, sort, cube_term),))

    def with_tope(self, tope):
        return replace(self, topes=self.topes + (tope,))

    def with_topes(self, topes):
        return replace(self, topes=tuple(topes))

    def with_type(self, name, ty):
        return replace(self, types=self.types + ((name, ty),))

    def entails(self, goal) -> bool:
        return _entails(self.cube_zone, self.topes, goal)

    def inconsistent(self) -> bool:
        return bool(self.topes) and self.entails(C.BOT)

    def bind(self, name, dom, tope=None):
        """Extend with a binder of the given domain (cube, shape or type)."""
        if is_cube(self, dom):
            ctx = self.with_cube(name, whnf(self, dom))
            if tope is not None:
                ctx = ctx.with_tope(to_tope(ctx, tope))
            return ctx
        return self.with_type(name, dom)


@lru_cache(maxsize=200_000)
def _entails(zone, hyps, goal):
    return entails(Sequent(zone, hyps, goal))


# Lower-layer views of terms


def cube_sort(ctx, term):
    w = whnf(ctx, term)
    match w:
        case IntervalCube():
            return C.INTERVAL
        case UnitCube():
            return C.UNIT
        case CubeProduct(a, b):
            return C.ProductSort(cube_sort(ctx, a), cube_sort(ctx, b))
        case Var(name):
            return C.SortVar(name)
    raise CheckError("E-MISMATCH", f"{w} is not a cube")


def is_cube(ctx, term) -> bool:
    w = whnf(ctx, term)
    match w:
        case IntervalCube() | UnitCube() | CubeProduct():
            return True
        case Var(name):
            ty = ctx.type_of_var(name)
            return ty is not None and isinstance(whnf(ctx, ty), CubeUniverse)
    return False


def to_point(ctx, term):
    w = whnf(ctx, term)
    match w:
        case Zero():
            return C.ZERO
        case One():
            return C.ONE
        case Star():
            return C.STAR
        case Var(name):
            return C.CVar(name)
        case Pair(a, b):
            return C.CTuple(to_point(ctx, a), to_point(ctx, b))
        case First(a):
            return C.CProj1(to_point(ctx, a))
        case Second(a):
            return C.CProj2(to_point(ctx, a))
    raise CheckError("E-TOPE", f"{w} is not a cube point")


def to_tope(ctx, term):
    w = whnf(ctx, term)
    match w:
        case TopeTop():
            return C.TOP
        case TopeBot():
            return C.BOT
        case TopeAnd(a, b):
            return C.And(to_tope(ctx, a), to_tope(ctx, b))
        case TopeOr(a, b):
            return C.Or(to_tope(ctx, a), to_tope(ctx, b))
        case TopeEq(a, b):
            return C.Eq(to_point(ctx, a), to_point(ctx, b))
        case TopeLeq(a, b):
            return C.Leq(to_point(ctx, a), to_point(ctx, b))
    head, args = spine(w)
    if isinstance(head, (Var, Global)):
        return C.Atom(head.name, tuple(to_point(ctx, a) for a in args))
    raise CheckError("E-TOPE", f"{w} is not a tope")


def shape_tope_term(name, point):
    """The tope term of a built-in shape at a point term."""
    shape = C.STANDARD_SHAPES[name]
    return _tope_term(shape.at(C.CVar(_PLACEHOLDER)), point)


_PLACEHOLDER = "\u2022point"


def _tope_term(tope, point):
    match tope:
        case C.Top():
            return TopeTop()
        case C.Bot():
            return TopeBot()
        case C.And(a, b):
            return TopeAnd(_tope_term(a, point), _tope_term(b, point))
        case C.Or(a, b):
            return TopeOr(_tope_term(a, point), _tope_term(b, point))
        case C.Eq(a, b):
            return TopeEq(_point_term(a, point), _point_term(b, point))
        case C.Leq(a, b):
            return TopeLeq(_point_term(a, point), _point_term(b, point))
    raise ValueError(tope)


def _point_term(p, point):
    match p:
        case C.CZero():
            return Zero()
        case C.COne():
            return One()
        case C.CStar():
            return Star()
        case C.CVar():
            return point
        case C.CTuple(a, b):
            return Pair(_point_term(a, point), _point_term(b, point))
        case C.CProj1(a):
            return First(_point_term(a, point))
        case C.CProj2(a):
            return Second(_point_term(a, point))
    raise ValueError(p)


SHAPE_SORTS = {
    "Δ¹": IntervalCube(),
    "∂Δ¹": IntervalCube(),
    "Δ²": CubeProduct(IntervalCube(), IntervalCube()),
    "∂Δ²": CubeProduct(IntervalCube(), IntervalCube()),
    "Λ": CubeProduct(IntervalCube(), IntervalCube()),
    "Δ³": CubeProduct(CubeProduct(IntervalCube(), IntervalCube()), IntervalCube()),
}


# Weak-head reduction


def whnf(ctx: Context, t, unfold: bool = True):
    ctx.tick()
    match t:
        case App(fn, arg):
            f = whnf(ctx, fn, unfold)
            match f:
                case Lam(name, body):
                    return whnf(ctx, subst1(body, name, arg), unfold)
                case ShapeConst(name):
                    return whnf(ctx, shape_tope_term(name, arg), unfold)
            return _neutral(ctx, t if f is fn else App(f, arg), unfold)
        case First(p) | Second(p):
            q = whnf(ctx, p, unfold)
            if isinstance(q, Pair):
                return whnf(ctx, q.left if isinstance(t, First) else q.right, unfold)
            if q is not p:
                t = First(q) if isinstance(t, First) else Second(q)
            return _neutral(ctx, t, unfold)
        case IdJ(A, a, motive, case, end, path):
            q = whnf(ctx, path, unfold)
            if isinstance(q, Refl):
                return whnf(ctx, case, unfold)
            return _neutral(ctx, IdJ(A, a, motive, case, end, q), unfold)
        case RecOr(clauses):
            for tope, body in clauses:
                if ctx.entails(to_tope(ctx, tope)):
                    return whnf(ctx, body, unfold)
            first = clauses[0][1]
            if all(alpha_eq(first, body) for _, body in clauses[1:]):
                return whnf(ctx, first, unfold)
            return t
        case Global(name):
            decl = ctx.signature.get(name)
            if unfold and decl is not None and decl.body is not None:
                return whnf(ctx, decl.body, unfold)
            return _neutral(ctx, t, unfold)
        case Var():
            return _neutral(ctx, t, unfold)
    return t


def _neutral(ctx, n, unfold):
    """A stuck term whose type is a restriction computes to the clause value."""
    ty = type_of_neutral(ctx, n)
    if ty is None:
        return n
    ty = whnf(ctx, ty)
    while isinstance(ty, Restrict):
        for tope, value in ty.clauses:
            if ctx.entails(to_tope(ctx, tope)):
                return whnf(ctx, value, unfold)
        ty = whnf(ctx, ty.base)
    return n


def strip_restrict(ctx, ty):
    ty = whnf(ctx, ty)
    while isinstance(ty, Restrict):
        ty = whnf(ctx, ty.base)
    return ty


def type_of_neutral(ctx, n):
    match n:
        case Var(name):
            return ctx.type_of_var(name)
        case Global(name):
            decl = ctx.signature.get(name)
            return None if decl is None else decl.type
        case App(fn, arg):
            ty = type_of_neutral(ctx, fn)
            if ty is None:
                return None
            ty = strip_restrict(ctx, ty)
            if isinstance(ty, Pi):
                return subst1(ty.cod, ty.name, arg)
            return None
        case First(p) | Second(p):
            ty = type_of_neutral(ctx, p)
            if ty is None:
                return None
            ty = strip_restrict(ctx, ty)
            match ty:
                case Sigma(name, dom, cod):
                    return dom if isinstance(n, First) else subst1(cod, name, First(p))
                case CubeProduct(a, b):
                    return a if isinstance(n, First) else b
            return None
        case IdJ(_, _, motive, _, end, path):
            return App(App(motive, end), path)
    return None


# Definitional equality


def def_equal(ctx: Context, ty, a, b, depth: int = 0) -> bool:
    if alpha_eq(a, b) or ctx.inconsistent():
        return True
    if _typed_equal(ctx, ty, a, b, depth):
        return True
    return _split(ctx, a, b, depth, lambda c: def_equal(c, ty, a, b, depth + 1))


def _typed_equal(ctx, ty, a, b, depth):
    tyw = strip_restrict(ctx, ty)
    match tyw:
        case Pi(name, dom, cod, tope):
            x = ctx.fresh(name, a, b, cod)
            inner = ctx.bind(x, dom, None if tope is None else subst1(tope, name, Var(x)))
            return def_equal(inner, subst1(cod, name, Var(x)), App(a, Var(x)), App(b, Var(x)), depth)
        case Sigma(name, dom, cod):
            if not def_equal(ctx, dom, First(a), First(b), depth):
                return False
            return def_equal(ctx, subst1(cod, name, First(a)), Second(a), Second(b), depth)
        case UnitType():
            return True
        case TopeUniverse():
            return points_or_topes_equal(ctx, a, b, tope=True)
        case Universe():
            return conv(ctx, a, b, depth)
    if is_cube(ctx, tyw):
        return points_or_topes_equal(ctx, a, b, tope=False)
    return conv(ctx, a, b, depth)


def points_or_topes_equal(ctx, a, b, tope):
    try:
        if tope:
            x, y = to_tope(ctx, a), to_tope(ctx, b)
            return ctx.entails(C.Or(C.And(x, y), C.BOT)) if x == y else (
                _entails(ctx.cube_zone, ctx.topes + (x,), y) and _entails(ctx.cube_zone, ctx.topes + (y,), x)
            )
        return ctx.entails(C.Eq(to_point(ctx, a), to_point(ctx, b)))
    except CheckError:
        return False


def _split(ctx, a, b, depth, again):
    """Case-split the tope zone (or a stuck recOr) and compare in every branch."""
    if depth >= MAX_SPLIT_DEPTH or not ctx.cubes:
        return False
    branches = split_branches(ctx.cube_zone, ctx.topes)
    if len(branches) > 1:
        return all(again(ctx.with_topes(branch)) for branch in branches)
    for side in (a, b):
        stuck = _stuck_recor(ctx, side)
        if stuck is None:
            continue
        topes = [to_tope(ctx, tope) for tope, _ in stuck.clauses]
        if not ctx.entails(C.disj(*topes)):
            continue
        return all(again(ctx.with_tope(t)) for t in topes if not ctx.with_tope(t).inconsistent())
    return False


def _stuck_recor(ctx, t):
    w = whnf(ctx, t)
    while True:
        match w:
            case RecOr():
                return w
            case App(fn, _):
                w = fn
            case First(p) | Second(p):
                w = p
            case _:
                return None


def conv(ctx: Context, a, b, depth: int = 0) -> bool:
    """Untyped comparison after weak-head reduction, unfolding globals lazily."""
    if alpha_eq(a, b):
        return True
    wa, wb = whnf(ctx, a, unfold=False), whnf(ctx, b, unfold=False)
    if _conv_whnf(ctx, wa, wb, depth):
        return True
    ua, ub = whnf(ctx, wa), whnf(ctx, wb)
    if alpha_eq(ua, wa) and alpha_eq(ub, wb):
        return _split(ctx, ua, ub, depth, lambda c: conv(c, ua, ub, depth + 1))
    return _conv_whnf(ctx, ua, ub, depth) or _split(
        ctx, ua, ub, depth, lambda c: conv(c, ua, ub, depth + 1)
    )


def _binder_ctx(ctx, name, dom, tope, *terms):
    x = ctx.fresh(name, *terms)
    t = None if tope is None else subst1(tope, name, Var(x))
    return x, ctx.bind(x, dom, t) if dom is not None else ctx.with_type(x, None)


def _conv_whnf(ctx, a, b, depth):
    if alpha_eq(a, b):
        return True
    if isinstance(a, Restrict) or isinstance(b, Restrict):
        return restriction_types_equal(ctx, a, b, depth)
    match a, b:
        case Pi(), Pi():
            if not conv(ctx, a.dom, b.dom, depth):
                return False
            x, inner = _binder_ctx(ctx, a.name, a.dom, None, a.cod, b.cod, a.tope, b.tope)
            if a.tope is not None or b.tope is not None:
                ta = C.TOP if a.tope is None else to_tope(inner, subst1(a.tope, a.name, Var(x)))
                tb = C.TOP if b.tope is None else to_tope(inner, subst1(b.tope, b.name, Var(x)))
                if not (inner.with_tope(ta).entails(tb) and inner.with_tope(tb).entails(ta)):
                    return False
                inner = inner.with_tope(ta)
            return conv(inner, subst1(a.cod, a.name, Var(x)), subst1(b.cod, b.name, Var(x)), depth)
        case Sigma(), Sigma():
            if not conv(ctx, a.dom, b.dom, depth):
                return False
            x, inner = _binder_ctx(ctx, a.name, a.dom, None, a.cod, b.cod)
            return conv(inner, subst1(a.cod, a.name, Var(x)), subst1(b.cod, b.name, Var(x)), depth)
        case IdType(), IdType():
            amb = a.ambient if a.ambient is not None else b.ambient
            if a.ambient is not None and b.ambient is not None and not conv(ctx, a.ambient, b.ambient, depth):
                return False
            if amb is None:
                return conv(ctx, a.left, b.left, depth) and conv(ctx, a.right, b.right, depth)
            return def_equal(ctx, amb, a.left, b.left, depth) and def_equal(ctx, amb, a.right, b.right, depth)
        case Universe(i), Universe(j):
            return i == j or ctx.options.type_in_type
        case CubeProduct(), CubeProduct():
            return conv(ctx, a.left, b.left, depth) and conv(ctx, a.right, b.right, depth)
        case Lam(), Lam():
            x, inner = _binder_ctx(ctx, a.name, None, None, a.body, b.body)
            return conv(inner, subst1(a.body, a.name, Var(x)), subst1(b.body, b.name, Var(x)), depth)
        case Lam(), _:
            x, inner = _eta_binder(ctx, a, b)
            return conv(inner, subst1(a.body, a.name, Var(x)), App(b, Var(x)), depth)
        case _, Lam():
            return _conv_whnf(ctx, b, a, depth)
        case Pair(), Pair():
            return conv(ctx, a.left, b.left, depth) and conv(ctx, a.right, b.right, depth)
        case Pair(), _:
            return conv(ctx, a.left, First(b), depth) and conv(ctx, a.right, Second(b), depth)
        case _, Pair():
            return _conv_whnf(ctx, b, a, depth)
        case Refl(), Refl():
            return True
        case (TopeTop() | TopeBot() | TopeAnd() | TopeOr() | TopeEq() | TopeLeq()), _:
            return points_or_topes_equal(ctx, a, b, tope=True)
        case (Zero() | One() | Star()), _:
            return points_or_topes_equal(ctx, a, b, tope=False)
    return _conv_neutral(ctx, a, b, depth)


def _eta_binder(ctx, lam, other):
    """Bind the lambda's variable at the domain the neutral side expects."""
    if lam.dom is None:
        ty = type_of_neutral(ctx, other)
        ty = None if ty is None else strip_restrict(ctx, ty)
        if isinstance(ty, Pi):
            x = ctx.fresh(lam.name, lam.body, other, ty.cod, ty.tope)
            tope = None if ty.tope is None else subst1(ty.tope, ty.name, Var(x))
            return x, ctx.bind(x, ty.dom, tope)
    return _binder_ctx(ctx, lam.name, lam.dom, None, lam.body, other)


def _conv_neutral(ctx, a, b, depth):
    match a, b:
        case Var(x), Var(y):
            if x == y:
                return True
            if ctx.lookup(x) and ctx.lookup(x)[0] == "cube":
                return points_or_topes_equal(ctx, a, b, tope=False)
            return False
        case Global(x), Global(y):
            return x == y
        case App(f, x), App(g, y):
            if not _conv_neutral(ctx, whnf(ctx, f, unfold=False), whnf(ctx, g, unfold=False), depth):
                return conv(ctx, f, g, depth) and _arg_equal(ctx, f, x, y, depth)
            return _arg_equal(ctx, f, x, y, depth)
        case First(p), First(q):
            return conv(ctx, p, q, depth)
        case Second(p), Second(q):
            return conv(ctx, p, q, depth)
        case IdJ(), IdJ():
            pairs = zip(
                (a.ambient, a.base, a.motive, a.case, a.end, a.path),
                (b.ambient, b.base, b.motive, b.case, b.end, b.path),
            )
            return all(conv(ctx, x, y, depth) for x, y in pairs)
    return False


def _arg_equal(ctx, fn, x, y, depth):
    ty = type_of_neutral(ctx, fn)
    if ty is not None:
        ty = strip_restrict(ctx, ty)
        if isinstance(ty, Pi):
            if is_cube(ctx, ty.dom):
                return points_or_topes_equal(ctx, x, y, tope=False)
            return def_equal(ctx, ty.dom, x, y, depth)
    return conv(ctx, x, y, depth)


def restriction_types_equal(ctx, a, b, depth):
    base_a, clauses_a = _restriction_parts(ctx, a)
    base_b, clauses_b = _restriction_parts(ctx, b)
    if not conv(ctx, base_a, base_b, depth):
        return False
    return honors(ctx, a, base_b, clauses_b, depth) and honors(ctx, b, base_a, clauses_a, depth)


def _restriction_parts(ctx, t):
    clauses = []
    t = whnf(ctx, t)
    while isinstance(t, Restrict):
        clauses += list(t.clauses)
        t = whnf(ctx, t.base)
    return t, clauses


def honors(ctx, source_type, base, clauses, depth=0) -> bool:
    """Every element of `source_type` agrees with each clause where its tope holds."""
    z = ctx.fresh("z", source_type, base, *[c for clause in clauses for c in clause])
    inner = ctx.with_type(z, source_type)
    for tope, value in clauses:
        branch = inner.with_tope(to_tope(inner, tope))
        if branch.inconsistent():
            continue
        if not def_equal(branch, base, Var(z), value, depth):
            return False
    return True
